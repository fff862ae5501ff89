#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cata/brick.hpp"
#include "cata/gsvd.hpp"

namespace cata {

enum class Side { Row, Column };

// Correspondence Analysis model of a (pseudo-)contingency table.
struct CAModel {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    Eigen::VectorXd row_masses;        // r, sums to 1
    Eigen::VectorXd col_masses;        // c, sums to 1
    Eigen::VectorXd eigenvalues;       // lambda = delta^2, descending
    Eigen::VectorXd explained;         // tau = lambda / sum(lambda)
    Eigen::MatrixXd row_scores;        // F, I x L
    Eigen::MatrixXd col_scores;        // G, J x L
    double total_inertia = 0.0;        // sum(lambda) = chi^2 / n
    bool rank_zero = false;            // independence table, no structure
    Decomposition decomposition;

    Eigen::Index dimensions() const { return eigenvalues.size(); }
};

// Signed contributions with the average-contribution importance mask.
struct ContributionTable {
    std::vector<std::string> labels;
    Eigen::MatrixXd signed_contributions;  // points x dimensions
    double threshold = 0.0;                // 1 / number of points
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> important;
};

// Squared cosines per point per retained dimension; rows sum to 1 except for
// points at the origin, which are flagged and left all-zero.
struct SquaredCosines {
    std::vector<std::string> labels;
    Eigen::MatrixXd values;
    std::vector<bool> at_origin;
};

CAModel fit_ca(const ContingencyTable& table);

// Project a supplementary profile into a fitted space via the transition
// formula. `counts` lives on the opposite side's registry.
Eigen::VectorXd project_supplementary(const CAModel& model, const Eigen::VectorXd& counts,
                                      Side side);

ContributionTable contributions(const CAModel& model, Side side);
SquaredCosines squared_cosines(const CAModel& model, Side side);

void save_ca(const CAModel& model, const std::string& path);
CAModel load_ca(const std::string& path);

}  // namespace cata
