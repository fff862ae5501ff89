#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cata/brick.hpp"

namespace cata {

// One preprocessed table of a multi-table analysis: CA-style standardized
// residual with pooled row masses, weighted so its first singular value is 1.
struct MFABlock {
    std::string id;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    Eigen::MatrixXd residual;        // S_k, unweighted
    double first_singular = 0.0;     // delta_1 of S_k
    double weight = 0.0;             // alpha_k = 1 / delta_1
};

struct MFAModel {
    std::vector<std::string> row_labels;
    std::vector<std::string> block_ids;
    Eigen::VectorXd eigenvalues;             // global, descending
    Eigen::VectorXd explained;
    Eigen::MatrixXd compromise;              // F, rows x L
    std::vector<Eigen::MatrixXd> partial;    // F_k per block, rows x L
    std::vector<Eigen::MatrixXd> loadings;   // block k's slice of V, cols_k x L

    Eigen::Index dimensions() const { return eigenvalues.size(); }
};

// Pooled row masses of a set of tables sharing a row registry: row sums of
// the pooled correspondence matrix (sum N_k) / (sum n_k).
Eigen::VectorXd pooled_row_masses(const std::vector<ContingencyTable>& tables);

MFABlock preprocess_block(const ContingencyTable& table, const Eigen::VectorXd& shared_row_masses,
                          const std::string& id = "");

MFAModel fit_mfa(const std::vector<MFABlock>& blocks);

void save_mfa(const MFAModel& model, const std::string& path);
MFAModel load_mfa(const std::string& path);

}  // namespace cata
