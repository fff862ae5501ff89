#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cata/brick.hpp"
#include "cata/ca.hpp"

namespace cata {

// Partial Least Squares Correlation of two tables sharing a row registry.
struct LatentPair {
    std::vector<std::string> row_labels;
    std::vector<std::string> x_labels;     // after dropping constant columns
    std::vector<std::string> y_labels;
    std::vector<std::string> dropped_x;    // constant columns, reported
    std::vector<std::string> dropped_y;
    Eigen::MatrixXd x_saliences;           // U, J1 x L, orthonormal
    Eigen::MatrixXd y_saliences;           // V, J2 x L, orthonormal
    Eigen::VectorXd singular_values;       // descending
    Eigen::MatrixXd x_latent;              // L_x = X U
    Eigen::MatrixXd y_latent;              // L_y = Y V
    Eigen::VectorXd explained;             // delta^2 / sum(delta^2)

    Eigen::Index dimensions() const { return singular_values.size(); }
};

struct PLSCOptions {
    // correlation mode: center columns and scale to unit norm (default);
    // covariance mode: center only
    bool unit_norm = true;
};

LatentPair fit_plsc(const LabeledMatrix& x, const LabeledMatrix& y, const PLSCOptions& opts = {});

// Signed salience contributions, same contract as CA contributions.
ContributionTable salience_contributions(const LatentPair& pair, Side side);

// Drop rows present in only one registry; returns the removed labels.
std::pair<LabeledMatrix, LabeledMatrix> align_rows(const LabeledMatrix& x, const LabeledMatrix& y,
                                                   std::vector<std::string>* removed = nullptr);

void save_plsc(const LatentPair& pair, const std::string& path);
LatentPair load_plsc(const std::string& path);

}  // namespace cata
