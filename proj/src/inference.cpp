#include "cata/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "cata/errors.hpp"
#include "cata/ingest.hpp"
#include "cata/rng.hpp"
#include "cata/serialize.hpp"
#include "cata/stats.hpp"

namespace cata {

namespace {

// Run one function per replicate, serial or replicate-parallel. Each
// replicate draws from its own stream, so the schedule cannot change the
// numbers.
template <typename Fn>
void for_each_replicate(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1) {
        for (std::size_t r = 0; r < count; ++r) fn(r);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            while (true) {
                const std::size_t r = next.fetch_add(1);
                if (r >= count) return;
                fn(r);
            }
        });
    for (auto& th : pool) th.join();
}

std::vector<std::vector<std::size_t>> members_by_group(const std::vector<std::string>& groups,
                                                       std::vector<std::string>& order) {
    order.clear();
    for (const auto& g : groups)
        if (std::find(order.begin(), order.end(), g) == order.end()) order.push_back(g);
    std::vector<std::vector<std::size_t>> members(order.size());
    for (std::size_t p = 0; p < groups.size(); ++p) {
        const auto gi = static_cast<std::size_t>(
            std::find(order.begin(), order.end(), groups[p]) - order.begin());
        members[gi].push_back(p);
    }
    for (const auto& m : members)
        if (m.empty()) throw EmptyGroup("group with no members");
    return members;
}

ContingencyTable clean_table(LabeledMatrix m) {
    std::vector<Eigen::Index> rows, cols;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m.values.row(i).sum() > 0.0) rows.push_back(i);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (m.values.col(j).sum() > 0.0) cols.push_back(j);
    LabeledMatrix out;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row_labels.push_back(m.row_labels[static_cast<std::size_t>(rows[i])]);
        for (std::size_t j = 0; j < cols.size(); ++j)
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m.values(rows[i], cols[j]);
    }
    for (std::size_t j = 0; j < cols.size(); ++j)
        out.col_labels.push_back(m.col_labels[static_cast<std::size_t>(cols[j])]);
    return ContingencyTable::from(std::move(out));
}

void finalize_ellipses(ResampleResult& result, double level) {
    const auto n_groups = result.group_labels.size();
    for (std::size_t g = 0; g < n_groups; ++g) {
        Eigen::MatrixXd cloud(result.replicate_stats.rows(), 2);
        cloud.col(0) = result.replicate_stats.col(static_cast<Eigen::Index>(2 * g));
        cloud.col(1) = result.replicate_stats.col(static_cast<Eigen::Index>(2 * g + 1));
        auto ellipse = covariance_ellipse(cloud, level);
        ellipse.group = result.group_labels[g];
        result.ellipses.push_back(ellipse);
    }
}

}  // namespace

bool ConfidenceEllipse::contains(const Eigen::Vector2d& point) const {
    const Eigen::Vector2d d = point - center;
    const double ca = std::cos(angle), sa = std::sin(angle);
    const double u = ca * d.x() + sa * d.y();
    const double v = -sa * d.x() + ca * d.y();
    const double eps = 1e-12;
    const double a = std::max(semi_major, eps), b = std::max(semi_minor, eps);
    return (u / a) * (u / a) + (v / b) * (v / b) <= 1.0;
}

ConfidenceEllipse covariance_ellipse(const Eigen::MatrixXd& cloud, double level) {
    ConfidenceEllipse e;
    e.level = level;
    e.center = cloud.colwise().mean().transpose();
    const Eigen::MatrixXd centered = cloud.rowwise() - cloud.colwise().mean();
    const Eigen::Matrix2d cov =
        centered.transpose() * centered / std::max<double>(1.0, static_cast<double>(cloud.rows() - 1));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    const double q = chi2_quantile_2df(level);
    const double l0 = std::max(eig.eigenvalues()(0), 0.0);  // minor
    const double l1 = std::max(eig.eigenvalues()(1), 0.0);  // major
    e.semi_minor = std::sqrt(l0 * q);
    e.semi_major = std::sqrt(l1 * q);
    e.angle = std::atan2(eig.eigenvectors()(1, 1), eig.eigenvectors()(0, 1));
    e.degenerate = e.semi_minor <= 1e-12;
    return e;
}

ResampleResult bootstrap_group_means(const ResponseBrick& brick, const CAModel& space,
                                     const ResampleOptions& opts) {
    if (opts.replicates < 1) throw Error("bootstrap: need at least one replicate");
    if (space.dimensions() < 2) throw SpaceMismatch("CA space has fewer than two dimensions");
    // map model columns onto brick levels
    const auto level_labels = brick.level_labels();
    std::vector<std::size_t> level_of_col;
    for (const auto& col : space.col_labels) {
        auto it = std::find(level_labels.begin(), level_labels.end(), col);
        if (it == level_labels.end())
            throw SpaceMismatch("CA column not found in brick levels: " + col);
        level_of_col.push_back(static_cast<std::size_t>(it - level_labels.begin()));
    }

    std::vector<std::string> order;
    const auto members = members_by_group(brick.groups, order);

    auto group_profile = [&](const std::vector<std::size_t>& picks) {
        Eigen::VectorXd profile = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(level_of_col.size()));
        for (auto p : picks) {
            const Eigen::RowVectorXd level_sums = brick.values[p].colwise().sum();
            for (std::size_t j = 0; j < level_of_col.size(); ++j)
                profile(static_cast<Eigen::Index>(j)) +=
                    level_sums(static_cast<Eigen::Index>(level_of_col[j]));
        }
        return profile;
    };

    ResampleResult result;
    result.kind = ResampleResult::Kind::Bootstrap;
    result.seed = opts.seed;
    result.replicates = opts.replicates;
    result.group_labels = order;
    result.replicate_stats.resize(static_cast<Eigen::Index>(opts.replicates),
                                  static_cast<Eigen::Index>(2 * order.size()));

    for_each_replicate(opts.replicates, opts.threads, [&](std::size_t r) {
        auto rng = RandomStream::for_replicate(opts.seed, r);
        for (std::size_t g = 0; g < order.size(); ++g) {
            std::vector<std::size_t> picks(members[g].size());
            for (auto& p : picks) p = members[g][rng.uniform_index(members[g].size())];
            const Eigen::VectorXd f =
                project_supplementary(space, group_profile(picks), Side::Row);
            result.replicate_stats(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(2 * g)) =
                f(0);
            result.replicate_stats(static_cast<Eigen::Index>(r),
                                   static_cast<Eigen::Index>(2 * g + 1)) = f(1);
        }
    });
    finalize_ellipses(result, opts.level);
    return result;
}

ResampleResult bootstrap_group_means(const MDSModel& space, const ResampleOptions& opts) {
    if (opts.replicates < 1) throw Error("bootstrap: need at least one replicate");
    if (space.groups.size() != space.labels.size())
        throw SpaceMismatch("MDS model carries no group labels");
    std::vector<std::string> order;
    const auto members = members_by_group(space.groups, order);
    const Eigen::Index dims = space.scores.cols();

    ResampleResult result;
    result.kind = ResampleResult::Kind::Bootstrap;
    result.seed = opts.seed;
    result.replicates = opts.replicates;
    result.group_labels = order;
    result.replicate_stats.resize(static_cast<Eigen::Index>(opts.replicates),
                                  static_cast<Eigen::Index>(2 * order.size()));

    for_each_replicate(opts.replicates, opts.threads, [&](std::size_t r) {
        auto rng = RandomStream::for_replicate(opts.seed, r);
        for (std::size_t g = 0; g < order.size(); ++g) {
            Eigen::Vector2d mean = Eigen::Vector2d::Zero();
            for (std::size_t i = 0; i < members[g].size(); ++i) {
                const auto p =
                    static_cast<Eigen::Index>(members[g][rng.uniform_index(members[g].size())]);
                if (dims > 0) mean(0) += space.scores(p, 0);
                if (dims > 1) mean(1) += space.scores(p, 1);
            }
            mean /= static_cast<double>(members[g].size());
            result.replicate_stats(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(2 * g)) =
                mean(0);
            result.replicate_stats(static_cast<Eigen::Index>(r),
                                   static_cast<Eigen::Index>(2 * g + 1)) = mean(1);
        }
    });
    finalize_ellipses(result, opts.level);
    return result;
}

ResampleResult permutation_test_eigen(const ResponseBrick& brick, const ResampleOptions& opts) {
    if (opts.replicates < 1) throw Error("permutation: need at least one replicate");
    const auto observed_table = clean_table(sum_to_contingency(brick).table);
    const auto observed_model = fit_ca(observed_table);
    const Eigen::Index dims = observed_model.dimensions();

    ResampleResult result;
    result.kind = ResampleResult::Kind::Permutation;
    result.seed = opts.seed;
    result.replicates = opts.replicates;
    result.alpha = opts.alpha;
    result.observed = observed_model.eigenvalues;
    result.replicate_stats = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(opts.replicates), dims);

    const auto P = brick.n_participants();
    const auto E = static_cast<Eigen::Index>(brick.n_excerpts());

    for_each_replicate(opts.replicates, opts.threads, [&](std::size_t r) {
        auto rng = RandomStream::for_replicate(opts.seed, r);
        // shuffle each participant's excerpt labels among presented excerpts
        Eigen::MatrixXd sum =
            Eigen::MatrixXd::Zero(E, static_cast<Eigen::Index>(brick.n_levels()));
        for (std::size_t p = 0; p < P; ++p) {
            std::vector<Eigen::Index> presented;
            for (Eigen::Index e = 0; e < E; ++e)
                if (brick.presented(static_cast<Eigen::Index>(p), e)) presented.push_back(e);
            std::vector<Eigen::Index> target = presented;
            rng.shuffle(target);
            for (std::size_t i = 0; i < presented.size(); ++i)
                sum.row(target[i]) += brick.values[p].row(presented[i]);
        }
        LabeledMatrix m;
        m.row_labels = brick.excerpts;
        m.col_labels = brick.level_labels();
        m.values = std::move(sum);
        const auto model = fit_ca(clean_table(std::move(m)));
        const Eigen::Index got = std::min(dims, model.dimensions());
        result.replicate_stats.row(static_cast<Eigen::Index>(r)).head(got) =
            model.eigenvalues.head(got);
    });

    result.p_values.resize(dims);
    result.significant.resize(static_cast<std::size_t>(dims));
    for (Eigen::Index l = 0; l < dims; ++l) {
        std::size_t count = 0;
        for (std::size_t r = 0; r < opts.replicates; ++r)
            if (result.replicate_stats(static_cast<Eigen::Index>(r), l) >= result.observed(l))
                ++count;
        result.p_values(l) =
            static_cast<double>(count + 1) / static_cast<double>(opts.replicates + 1);
        result.significant[static_cast<std::size_t>(l)] = result.p_values(l) < opts.alpha;
    }
    return result;
}

ResampleResult permutation_test_plsc(const LabeledMatrix& x, const LabeledMatrix& y,
                                     const ResampleOptions& opts, const PLSCOptions& plsc) {
    if (opts.replicates < 1) throw Error("permutation: need at least one replicate");
    const auto observed = fit_plsc(x, y, plsc);
    const Eigen::Index dims = observed.dimensions();

    ResampleResult result;
    result.kind = ResampleResult::Kind::Permutation;
    result.seed = opts.seed;
    result.replicates = opts.replicates;
    result.alpha = opts.alpha;
    result.observed = observed.singular_values;
    result.replicate_stats = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(opts.replicates), dims);

    const Eigen::Index n = y.rows();
    for_each_replicate(opts.replicates, opts.threads, [&](std::size_t r) {
        auto rng = RandomStream::for_replicate(opts.seed, r);
        std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        rng.shuffle(perm);
        LabeledMatrix yp = y;
        for (Eigen::Index i = 0; i < n; ++i)
            yp.values.row(i) = y.values.row(perm[static_cast<std::size_t>(i)]);
        const auto model = fit_plsc(x, yp, plsc);
        const Eigen::Index got = std::min(dims, model.dimensions());
        result.replicate_stats.row(static_cast<Eigen::Index>(r)).head(got) =
            model.singular_values.head(got);
    });

    result.p_values.resize(dims);
    result.significant.resize(static_cast<std::size_t>(dims));
    for (Eigen::Index l = 0; l < dims; ++l) {
        std::size_t count = 0;
        for (std::size_t r = 0; r < opts.replicates; ++r)
            if (result.replicate_stats(static_cast<Eigen::Index>(r), l) >= result.observed(l))
                ++count;
        result.p_values(l) =
            static_cast<double>(count + 1) / static_cast<double>(opts.replicates + 1);
        result.significant[static_cast<std::size_t>(l)] = result.p_values(l) < opts.alpha;
    }
    return result;
}

void save_resample(const ResampleResult& result, const std::string& path) {
    ModelDoc doc;
    doc.kind = "resample";
    doc.set_text("resample_kind",
                 result.kind == ResampleResult::Kind::Bootstrap ? "bootstrap" : "permutation");
    doc.set_scalar("seed", static_cast<double>(result.seed));
    doc.set_scalar("replicates", static_cast<double>(result.replicates));
    doc.set_scalar("alpha", result.alpha);
    doc.set_matrix("replicate_stats", result.replicate_stats);
    if (result.observed.size() > 0) doc.set_vector("observed", result.observed);
    if (result.p_values.size() > 0) doc.set_vector("p_values", result.p_values);
    if (!result.ellipses.empty()) {
        Eigen::MatrixXd em(static_cast<Eigen::Index>(result.ellipses.size()), 7);
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < result.ellipses.size(); ++i) {
            const auto& e = result.ellipses[i];
            em.row(static_cast<Eigen::Index>(i)) << e.center.x(), e.center.y(), e.semi_major,
                e.semi_minor, e.angle, e.level, e.degenerate ? 1.0 : 0.0;
            labels.push_back(e.group);
        }
        doc.set_matrix("ellipses", em, labels,
                       {"cx", "cy", "semi_major", "semi_minor", "angle", "level", "degenerate"});
    }
    doc.save(path);
}

ResampleResult load_resample(const std::string& path) {
    auto doc = ModelDoc::load(path);
    if (doc.kind != "resample") throw Error("not a resample file: " + path);
    ResampleResult r;
    r.kind = doc.text("resample_kind") == "bootstrap" ? ResampleResult::Kind::Bootstrap
                                                      : ResampleResult::Kind::Permutation;
    r.seed = static_cast<std::uint64_t>(doc.scalar("seed"));
    r.replicates = static_cast<std::size_t>(doc.scalar("replicates"));
    r.alpha = doc.scalar("alpha");
    r.replicate_stats = doc.matrix("replicate_stats").values;
    if (doc.has("observed")) r.observed = doc.vector("observed");
    if (doc.has("p_values")) {
        r.p_values = doc.vector("p_values");
        for (Eigen::Index l = 0; l < r.p_values.size(); ++l)
            r.significant.push_back(r.p_values(l) < r.alpha);
    }
    if (doc.has("ellipses")) {
        const auto& em = doc.matrix("ellipses");
        for (Eigen::Index i = 0; i < em.rows(); ++i) {
            ConfidenceEllipse e;
            e.group = em.row_labels[static_cast<std::size_t>(i)];
            e.center << em.values(i, 0), em.values(i, 1);
            e.semi_major = em.values(i, 2);
            e.semi_minor = em.values(i, 3);
            e.angle = em.values(i, 4);
            e.level = em.values(i, 5);
            e.degenerate = em.values(i, 6) != 0.0;
            r.ellipses.push_back(e);
            r.group_labels.push_back(e.group);
        }
    }
    return r;
}

}  // namespace cata
