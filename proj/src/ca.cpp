#include "cata/ca.hpp"

#include <cmath>

#include "cata/errors.hpp"
#include "cata/serialize.hpp"

namespace cata {

CAModel fit_ca(const ContingencyTable& table) {
    const Eigen::MatrixXd& counts = table.table.values;
    const Eigen::Index I = counts.rows(), J = counts.cols();
    if (table.n <= 0.0) throw DegenerateTable("table has zero grand total");
    if ((counts.array() < 0.0).any()) throw DegenerateTable("table has negative cells");

    const Eigen::MatrixXd z = counts / table.n;
    const Eigen::VectorXd r = z.rowwise().sum();
    const Eigen::VectorXd c = z.colwise().sum();
    if ((r.array() <= 0.0).any()) throw DegenerateTable("table has an all-zero row");
    if ((c.array() <= 0.0).any()) throw DegenerateTable("table has an all-zero column");

    const Eigen::MatrixXd residual = z - r * c.transpose();

    CAModel model;
    model.row_labels = table.table.row_labels;
    model.col_labels = table.table.col_labels;
    model.row_masses = r;
    model.col_masses = c;
    model.decomposition = gsvd(residual, r.cwiseInverse(), c.cwiseInverse());

    const Eigen::Index L = model.decomposition.rank();
    const Eigen::VectorXd& delta = model.decomposition.singular_values;
    model.eigenvalues = delta.array().square();
    model.total_inertia = model.eigenvalues.sum();
    if (L == 0) {
        model.rank_zero = true;
        model.explained.resize(0);
        model.row_scores.resize(I, 0);
        model.col_scores.resize(J, 0);
        return model;
    }
    model.explained = model.eigenvalues / model.total_inertia;
    // F = M P Delta with M = diag(1/r); likewise for columns
    model.row_scores = r.cwiseInverse().asDiagonal() * model.decomposition.left * delta.asDiagonal();
    model.col_scores =
        c.cwiseInverse().asDiagonal() * model.decomposition.right * delta.asDiagonal();
    return model;
}

Eigen::VectorXd project_supplementary(const CAModel& model, const Eigen::VectorXd& counts,
                                      Side side) {
    if (model.dimensions() == 0) throw EmptyModel("cannot project into a zero-dimension model");
    const Eigen::MatrixXd& opposite = side == Side::Row ? model.col_scores : model.row_scores;
    if (counts.size() != opposite.rows())
        throw DimensionMismatch("supplementary profile length does not match registry");
    const double total = counts.sum();
    if (total <= 0.0) throw ZeroProfile("supplementary counts sum to zero");
    const Eigen::VectorXd profile = counts / total;
    // transition formula: f = p^T G Delta^-1
    return model.decomposition.singular_values.cwiseInverse().asDiagonal() *
           (opposite.transpose() * profile);
}

ContributionTable contributions(const CAModel& model, Side side) {
    if (model.dimensions() == 0) throw EmptyModel("model has no dimensions");
    const Eigen::MatrixXd& scores = side == Side::Row ? model.row_scores : model.col_scores;
    const Eigen::VectorXd& masses = side == Side::Row ? model.row_masses : model.col_masses;
    ContributionTable t;
    t.labels = side == Side::Row ? model.row_labels : model.col_labels;
    const Eigen::Index n = scores.rows(), L = model.dimensions();
    t.signed_contributions.resize(n, L);
    for (Eigen::Index l = 0; l < L; ++l)
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ctr = masses(i) * scores(i, l) * scores(i, l) / model.eigenvalues(l);
            t.signed_contributions(i, l) = scores(i, l) < 0.0 ? -ctr : ctr;
        }
    t.threshold = 1.0 / static_cast<double>(n);
    t.important = t.signed_contributions.array().abs() > t.threshold;
    return t;
}

SquaredCosines squared_cosines(const CAModel& model, Side side) {
    if (model.dimensions() == 0) throw EmptyModel("model has no dimensions");
    const Eigen::MatrixXd& scores = side == Side::Row ? model.row_scores : model.col_scores;
    SquaredCosines sc;
    sc.labels = side == Side::Row ? model.row_labels : model.col_labels;
    const Eigen::Index n = scores.rows(), L = model.dimensions();
    sc.values = Eigen::MatrixXd::Zero(n, L);
    sc.at_origin.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d2 = scores.row(i).squaredNorm();
        if (d2 <= 0.0) {
            sc.at_origin[static_cast<std::size_t>(i)] = true;
            continue;
        }
        sc.values.row(i) = scores.row(i).array().square() / d2;
    }
    return sc;
}

void save_ca(const CAModel& model, const std::string& path) {
    ModelDoc doc;
    doc.kind = "ca";
    doc.set_scalar("total_inertia", model.total_inertia);
    doc.set_scalar("rank_zero", model.rank_zero ? 1.0 : 0.0);
    doc.set_vector("row_masses", model.row_masses, model.row_labels);
    doc.set_vector("col_masses", model.col_masses, model.col_labels);
    doc.set_vector("eigenvalues", model.eigenvalues);
    doc.set_vector("explained", model.explained);
    doc.set_vector("singular_values", model.decomposition.singular_values);
    doc.set_matrix("row_scores", model.row_scores, model.row_labels, {});
    doc.set_matrix("col_scores", model.col_scores, model.col_labels, {});
    doc.set_matrix("left", model.decomposition.left, model.row_labels, {});
    doc.set_matrix("right", model.decomposition.right, model.col_labels, {});
    doc.save(path);
}

CAModel load_ca(const std::string& path) {
    auto doc = ModelDoc::load(path);
    if (doc.kind != "ca") throw Error("not a CA model file: " + path);
    CAModel m;
    m.total_inertia = doc.scalar("total_inertia");
    m.rank_zero = doc.scalar("rank_zero") != 0.0;
    m.row_masses = doc.vector("row_masses");
    m.row_labels = doc.vector_labels("row_masses");
    m.col_masses = doc.vector("col_masses");
    m.col_labels = doc.vector_labels("col_masses");
    m.eigenvalues = doc.vector("eigenvalues");
    m.explained = doc.vector("explained");
    m.row_scores = doc.matrix("row_scores").values;
    m.col_scores = doc.matrix("col_scores").values;
    m.decomposition.singular_values = doc.vector("singular_values");
    m.decomposition.left = doc.matrix("left").values;
    m.decomposition.right = doc.matrix("right").values;
    m.decomposition.row_metric = m.row_masses.cwiseInverse();
    m.decomposition.col_metric = m.col_masses.cwiseInverse();
    return m;
}

}  // namespace cata
