#include "cata/mds.hpp"

#include <cmath>

#include "cata/errors.hpp"
#include "cata/gsvd.hpp"
#include "cata/serialize.hpp"

namespace cata {

namespace {

MDSModel scale_from_squared_distances(const Eigen::MatrixXd& d2,
                                      std::vector<std::string> labels, double tol) {
    const Eigen::Index n = d2.rows();
    // double centering: B = -1/2 * Cn * D2 * Cn
    const Eigen::VectorXd row_mean = d2.rowwise().mean();
    const double grand_mean = d2.mean();
    Eigen::MatrixXd b(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            b(i, j) = -0.5 * (d2(i, j) - row_mean(i) - row_mean(j) + grand_mean);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
    // ascending from Eigen; walk from the top
    const Eigen::VectorXd& vals = eig.eigenvalues();
    const Eigen::MatrixXd& vecs = eig.eigenvectors();

    double lmax = vals.size() > 0 ? vals(vals.size() - 1) : 0.0;
    const double cutoff = tol * std::max(lmax, 0.0);

    std::vector<Eigen::Index> keep;
    double negative_mass = 0.0;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        if (vals(i) > cutoff && vals(i) > 0.0)
            keep.push_back(i);
        else if (vals(i) < 0.0)
            negative_mass += -vals(i);
    }

    MDSModel model;
    model.labels = std::move(labels);
    model.negative_mass = negative_mass;
    const auto L = static_cast<Eigen::Index>(keep.size());
    model.eigenvalues.resize(L);
    model.scores.resize(n, L);
    for (Eigen::Index l = 0; l < L; ++l) {
        model.eigenvalues(l) = vals(keep[static_cast<std::size_t>(l)]);
        model.scores.col(l) =
            vecs.col(keep[static_cast<std::size_t>(l)]) * std::sqrt(model.eigenvalues(l));
    }
    Eigen::MatrixXd dummy(0, L);
    fix_signs(model.scores, dummy);
    model.explained =
        L > 0 ? Eigen::VectorXd(model.eigenvalues / model.eigenvalues.sum()) : Eigen::VectorXd();
    return model;
}

}  // namespace

MDSModel fit_mds(const DistanceMatrix& input, double tol) {
    const Eigen::MatrixXd& d = input.distances;
    if (d.rows() != d.cols() || !d.isApprox(d.transpose(), 1e-12))
        throw AsymmetricInput("distance matrix must be symmetric");
    if ((d.array() < 0.0).any()) throw NegativeDistance("distances must be nonnegative");
    return scale_from_squared_distances(d.array().square(), input.labels, tol);
}

MDSModel fit_mds(const CoOccurrenceMatrix& input, double tol) {
    const Eigen::MatrixXd& c = input.cells;
    if (c.rows() != c.cols() || !c.isApprox(c.transpose(), 1e-12))
        throw AsymmetricInput("co-occurrence matrix must be symmetric");
    const Eigen::Index n = c.rows();
    Eigen::MatrixXd d2(n, n);
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = 0; q < n; ++q)
            d2(p, q) = std::max(c(p, p) + c(q, q) - 2.0 * c(p, q), 0.0);
    return scale_from_squared_distances(d2, input.participants, tol);
}

std::pair<std::vector<std::string>, Eigen::MatrixXd> group_means(const MDSModel& model) {
    if (model.groups.size() != model.labels.size())
        throw EmptyGroup("model carries no group labels");
    std::vector<std::string> order;
    for (const auto& g : model.groups)
        if (std::find(order.begin(), order.end(), g) == order.end()) order.push_back(g);
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(order.size()),
                                                  model.scores.cols());
    for (std::size_t gi = 0; gi < order.size(); ++gi) {
        Eigen::Index count = 0;
        for (std::size_t p = 0; p < model.groups.size(); ++p)
            if (model.groups[p] == order[gi]) {
                means.row(static_cast<Eigen::Index>(gi)) +=
                    model.scores.row(static_cast<Eigen::Index>(p));
                ++count;
            }
        means.row(static_cast<Eigen::Index>(gi)) /= static_cast<double>(count);
    }
    return {order, means};
}

void save_mds(const MDSModel& model, const std::string& path) {
    ModelDoc doc;
    doc.kind = "mds";
    doc.set_scalar("negative_mass", model.negative_mass);
    doc.set_vector("eigenvalues", model.eigenvalues);
    doc.set_vector("explained", model.explained);
    doc.set_matrix("scores", model.scores, model.labels, {});
    if (!model.groups.empty()) {
        Eigen::VectorXd dummy = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.groups.size()));
        doc.set_vector("group_of", dummy, model.groups);
    }
    doc.save(path);
}

MDSModel load_mds(const std::string& path) {
    auto doc = ModelDoc::load(path);
    if (doc.kind != "mds") throw Error("not an MDS model file: " + path);
    MDSModel m;
    m.negative_mass = doc.scalar("negative_mass");
    m.eigenvalues = doc.vector("eigenvalues");
    m.explained = doc.vector("explained");
    m.scores = doc.matrix("scores").values;
    m.labels = doc.matrix("scores").row_labels;
    if (doc.has("group_of")) m.groups = doc.vector_labels("group_of");
    return m;
}

}  // namespace cata
