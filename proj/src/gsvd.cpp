#include "cata/gsvd.hpp"

#include <cmath>

#include "cata/errors.hpp"

namespace cata {

void fix_signs(Eigen::MatrixXd& left, Eigen::MatrixXd& right) {
    for (Eigen::Index l = 0; l < left.cols(); ++l) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < left.rows(); ++i) {
            double a = std::abs(left(i, l));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        if (left(imax, l) < 0.0) {
            left.col(l) = -left.col(l);
            if (l < right.cols()) right.col(l) = -right.col(l);
        }
    }
}

Decomposition gsvd(const Eigen::MatrixXd& x, const Eigen::VectorXd& row_metric,
                   const Eigen::VectorXd& col_metric, double tol) {
    const Eigen::Index I = x.rows(), J = x.cols();
    if (row_metric.size() != I || col_metric.size() != J)
        throw DimensionMismatch("gsvd: metric length does not match matrix shape");
    if ((row_metric.array() <= 0.0).any() || (col_metric.array() <= 0.0).any())
        throw NonPositiveWeight("gsvd: metrics must be strictly positive");
    if (!x.allFinite() || !row_metric.allFinite() || !col_metric.allFinite())
        throw NonFiniteInput("gsvd: non-finite input");

    const Eigen::VectorXd sm = row_metric.array().sqrt();
    const Eigen::VectorXd sw = col_metric.array().sqrt();
    const Eigen::MatrixXd xt = sm.asDiagonal() * x * sw.asDiagonal();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(xt, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();

    double cutoff = tol;
    if (cutoff < 0.0)
        cutoff = 1e-12 * static_cast<double>(std::max(I, J)) * (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;

    Decomposition d;
    d.row_metric = row_metric;
    d.col_metric = col_metric;
    d.singular_values = sv.head(rank);
    d.left = sm.cwiseInverse().asDiagonal() * svd.matrixU().leftCols(rank);
    d.right = sw.cwiseInverse().asDiagonal() * svd.matrixV().leftCols(rank);
    fix_signs(d.left, d.right);
    return d;
}

}  // namespace cata
