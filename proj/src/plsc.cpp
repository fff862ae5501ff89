#include "cata/plsc.hpp"

#include <algorithm>
#include <cmath>

#include "cata/errors.hpp"
#include "cata/gsvd.hpp"
#include "cata/serialize.hpp"

namespace cata {

namespace {

// Center (and optionally unit-norm) columns; constant columns are dropped
// and their labels reported.
void preprocess(const LabeledMatrix& in, bool unit_norm, Eigen::MatrixXd& out,
                std::vector<std::string>& kept, std::vector<std::string>& dropped) {
    const Eigen::Index n = in.rows();
    std::vector<Eigen::Index> keep;
    Eigen::MatrixXd centered = in.values.rowwise() - in.values.colwise().mean();
    for (Eigen::Index j = 0; j < in.cols(); ++j) {
        const double norm = centered.col(j).norm();
        if (norm <= 1e-12 * std::sqrt(static_cast<double>(n))) {
            dropped.push_back(in.col_labels[static_cast<std::size_t>(j)]);
        } else {
            keep.push_back(j);
            kept.push_back(in.col_labels[static_cast<std::size_t>(j)]);
        }
    }
    out.resize(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = centered.col(keep[j]);
        if (unit_norm) out.col(static_cast<Eigen::Index>(j)).normalize();
    }
}

}  // namespace

LatentPair fit_plsc(const LabeledMatrix& x, const LabeledMatrix& y, const PLSCOptions& opts) {
    if (x.row_labels != y.row_labels)
        throw RowRegistryMismatch("PLSC tables must share a row registry (align_rows first)");

    LatentPair pair;
    pair.row_labels = x.row_labels;
    Eigen::MatrixXd xp, yp;
    preprocess(x, opts.unit_norm, xp, pair.x_labels, pair.dropped_x);
    preprocess(y, opts.unit_norm, yp, pair.y_labels, pair.dropped_y);

    const Eigen::MatrixXd r = xp.transpose() * yp;
    Eigen::MatrixXd u, v;
    Eigen::VectorXd sv;
    if (xp.rows() == yp.rows() && xp.cols() == yp.cols() && xp.cwiseEqual(yp).all()) {
        // identical tables: R is symmetric PSD, take its eigendecomposition
        // so the two latent sets come out identical
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
        const Eigen::Index m = r.rows();
        sv.resize(m);
        u.resize(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            sv(i) = std::max(eig.eigenvalues()(m - 1 - i), 0.0);
            u.col(i) = eig.eigenvectors().col(m - 1 - i);
        }
        v = u;
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
        sv = svd.singularValues();
        u = svd.matrixU();
        v = svd.matrixV();
    }

    const double cutoff = 1e-12 * static_cast<double>(std::max(r.rows(), r.cols())) *
                          (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;

    pair.x_saliences = u.leftCols(rank);
    pair.y_saliences = v.leftCols(rank);
    fix_signs(pair.x_saliences, pair.y_saliences);
    pair.singular_values = sv.head(rank);
    pair.x_latent = xp * pair.x_saliences;
    pair.y_latent = yp * pair.y_saliences;
    const double total = sv.array().square().sum();
    pair.explained = total > 0.0
                         ? Eigen::VectorXd(pair.singular_values.array().square() / total)
                         : Eigen::VectorXd::Zero(rank);
    return pair;
}

ContributionTable salience_contributions(const LatentPair& pair, Side side) {
    if (pair.dimensions() == 0) throw EmptyModel("latent pair has no dimensions");
    const Eigen::MatrixXd& s = side == Side::Row ? pair.x_saliences : pair.y_saliences;
    ContributionTable t;
    t.labels = side == Side::Row ? pair.x_labels : pair.y_labels;
    const Eigen::Index n = s.rows(), L = s.cols();
    t.signed_contributions.resize(n, L);
    for (Eigen::Index l = 0; l < L; ++l) {
        const double norm = s.col(l).squaredNorm();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ctr = s(i, l) * s(i, l) / norm;
            t.signed_contributions(i, l) = s(i, l) < 0.0 ? -ctr : ctr;
        }
    }
    t.threshold = 1.0 / static_cast<double>(n);
    t.important = t.signed_contributions.array().abs() > t.threshold;
    return t;
}

std::pair<LabeledMatrix, LabeledMatrix> align_rows(const LabeledMatrix& x, const LabeledMatrix& y,
                                                   std::vector<std::string>* removed) {
    std::vector<std::string> shared;
    for (const auto& label : x.row_labels)
        if (std::find(y.row_labels.begin(), y.row_labels.end(), label) != y.row_labels.end())
            shared.push_back(label);
    if (removed) {
        removed->clear();
        for (const auto& label : x.row_labels)
            if (std::find(shared.begin(), shared.end(), label) == shared.end())
                removed->push_back(label);
        for (const auto& label : y.row_labels)
            if (std::find(shared.begin(), shared.end(), label) == shared.end())
                removed->push_back(label);
    }
    auto select = [&](const LabeledMatrix& m) {
        LabeledMatrix out;
        out.col_labels = m.col_labels;
        out.row_labels = shared;
        out.values.resize(static_cast<Eigen::Index>(shared.size()), m.cols());
        for (std::size_t i = 0; i < shared.size(); ++i)
            out.values.row(static_cast<Eigen::Index>(i)) = m.values.row(m.row_index(shared[i]));
        return out;
    };
    return {select(x), select(y)};
}

void save_plsc(const LatentPair& pair, const std::string& path) {
    ModelDoc doc;
    doc.kind = "plsc";
    doc.set_vector("singular_values", pair.singular_values);
    doc.set_vector("explained", pair.explained);
    doc.set_matrix("x_saliences", pair.x_saliences, pair.x_labels, {});
    doc.set_matrix("y_saliences", pair.y_saliences, pair.y_labels, {});
    doc.set_matrix("x_latent", pair.x_latent, pair.row_labels, {});
    doc.set_matrix("y_latent", pair.y_latent, pair.row_labels, {});
    std::string dx, dy;
    for (const auto& s : pair.dropped_x) dx += (dx.empty() ? "" : "|") + s;
    for (const auto& s : pair.dropped_y) dy += (dy.empty() ? "" : "|") + s;
    doc.set_text("dropped_x", dx);
    doc.set_text("dropped_y", dy);
    doc.save(path);
}

LatentPair load_plsc(const std::string& path) {
    auto doc = ModelDoc::load(path);
    if (doc.kind != "plsc") throw Error("not a PLSC model file: " + path);
    LatentPair pair;
    pair.singular_values = doc.vector("singular_values");
    pair.explained = doc.vector("explained");
    pair.x_saliences = doc.matrix("x_saliences").values;
    pair.x_labels = doc.matrix("x_saliences").row_labels;
    pair.y_saliences = doc.matrix("y_saliences").values;
    pair.y_labels = doc.matrix("y_saliences").row_labels;
    pair.x_latent = doc.matrix("x_latent").values;
    pair.y_latent = doc.matrix("y_latent").values;
    pair.row_labels = doc.matrix("x_latent").row_labels;
    auto split = [](const std::string& joined) {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (start <= joined.size() && !joined.empty()) {
            const std::size_t bar = joined.find('|', start);
            out.push_back(joined.substr(start, bar - start));
            if (bar == std::string::npos) break;
            start = bar + 1;
        }
        return out;
    };
    pair.dropped_x = split(doc.text("dropped_x"));
    pair.dropped_y = split(doc.text("dropped_y"));
    return pair;
}

}  // namespace cata
