#pragma once

#include <Eigen/Dense>

namespace cata {

// Generalized (metric-weighted) SVD: X = P * diag(delta) * Q^T with
// P^T M P = I and Q^T W Q = I for diagonal metrics M = diag(m), W = diag(w).
struct Decomposition {
    Eigen::MatrixXd left;             // P, I x L
    Eigen::MatrixXd right;            // Q, J x L
    Eigen::VectorXd singular_values;  // delta, descending
    Eigen::VectorXd row_metric;       // m
    Eigen::VectorXd col_metric;       // w

    Eigen::Index rank() const { return singular_values.size(); }
};

// Computed as a plain SVD of diag(sqrt(m)) * X * diag(sqrt(w)), back-
// transformed. Singular values <= tol are dropped; tol < 0 selects the
// default 1e-12 * max(I,J) * delta_1. Columns are sign-fixed so each left
// vector's largest-magnitude entry is positive.
Decomposition gsvd(const Eigen::MatrixXd& x, const Eigen::VectorXd& row_metric,
                   const Eigen::VectorXd& col_metric, double tol = -1.0);

// Flip each column pair so the largest-magnitude entry of `left`'s column is
// positive (first such entry on ties). Shared by the plain-SVD users.
void fix_signs(Eigen::MatrixXd& left, Eigen::MatrixXd& right);

}  // namespace cata
