#include <doctest.h>

#include "cata/errors.hpp"
#include "cata/inference.hpp"
#include "cata/ingest.hpp"
#include "cata/stats.hpp"
#include "test_util.hpp"

using namespace cata;

namespace {

// two groups of participants with different selection habits
ResponseBrick grouped_brick(std::uint64_t seed, std::size_t per_group = 5) {
    auto brick = test_util::make_brick(2 * per_group, 6, test_util::simple_levels(4));
    auto rng = RandomStream(seed);
    for (std::size_t p = 0; p < brick.values.size(); ++p) {
        brick.groups[p] = p < per_group ? "F" : "A";
        const double bias = p < per_group ? 0.8 : 0.2;
        for (Eigen::Index e = 0; e < 6; ++e)
            for (Eigen::Index l = 0; l < 4; ++l) {
                const double pr = (l < 2) ? bias : 1.0 - bias;
                brick.values[p](e, l) = rng.next_double() < pr ? 1.0 : 0.0;
            }
    }
    return brick;
}

}  // namespace

TEST_CASE("covariance ellipse matches a hand-built cloud") {
    Eigen::MatrixXd cloud(4, 2);
    cloud << 1, 0, -1, 0, 0, 2, 0, -2;
    auto e = covariance_ellipse(cloud, 0.95);
    CHECK(e.center.norm() == doctest::Approx(0.0).epsilon(1e-15));
    const double q = chi2_quantile_2df(0.95);
    CHECK(e.semi_major == doctest::Approx(std::sqrt(8.0 / 3.0 * q)).epsilon(1e-12));
    CHECK(e.semi_minor == doctest::Approx(std::sqrt(2.0 / 3.0 * q)).epsilon(1e-12));
    // major axis is vertical
    CHECK(std::abs(std::sin(e.angle)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.contains(Eigen::Vector2d(0.0, 0.0)));
    CHECK(!e.contains(Eigen::Vector2d(10.0, 10.0)));
    CHECK(!e.degenerate);
}

TEST_CASE("zero-variance cloud gives a degenerate ellipse") {
    Eigen::MatrixXd cloud = Eigen::MatrixXd::Constant(10, 2, 3.0);
    auto e = covariance_ellipse(cloud, 0.95);
    CHECK(e.degenerate);
    CHECK(e.center.x() == doctest::Approx(3.0));
    CHECK(e.contains(Eigen::Vector2d(3.0, 3.0)));
}

TEST_CASE("MDS bootstrap: determinism and thread independence") {
    auto brick = grouped_brick(81);
    auto model = fit_mds(co_occurrence(brick));
    model.groups = brick.groups;

    ResampleOptions opts;
    opts.replicates = 50;
    opts.seed = 7;
    auto r1 = bootstrap_group_means(model, opts);
    auto r2 = bootstrap_group_means(model, opts);
    CHECK((r1.replicate_stats - r2.replicate_stats).cwiseAbs().maxCoeff() == 0.0);

    opts.threads = 4;
    auto r4 = bootstrap_group_means(model, opts);
    CHECK((r1.replicate_stats - r4.replicate_stats).cwiseAbs().maxCoeff() == 0.0);

    opts.threads = 1;
    opts.seed = 8;
    auto other = bootstrap_group_means(model, opts);
    CHECK((r1.replicate_stats - other.replicate_stats).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("MDS bootstrap ellipse centers on the observed group mean") {
    auto brick = grouped_brick(82);
    auto model = fit_mds(co_occurrence(brick));
    model.groups = brick.groups;

    ResampleOptions opts;
    opts.replicates = 1000;
    opts.seed = 3;
    auto result = bootstrap_group_means(model, opts);
    auto [labels, means] = group_means(model);
    REQUIRE(result.ellipses.size() == labels.size());
    const double scale = model.scores.cwiseAbs().maxCoeff();
    for (std::size_t g = 0; g < labels.size(); ++g) {
        CHECK(result.ellipses[g].group == labels[g]);
        CHECK(std::abs(result.ellipses[g].center.x() - means(static_cast<Eigen::Index>(g), 0)) <
              0.1 * scale);
        CHECK(std::abs(result.ellipses[g].center.y() - means(static_cast<Eigen::Index>(g), 1)) <
              0.1 * scale);
    }
}

TEST_CASE("single-member group bootstraps to a degenerate ellipse") {
    auto brick = grouped_brick(83, 3);
    auto model = fit_mds(co_occurrence(brick));
    model.groups = brick.groups;
    model.groups[0] = "solo";
    ResampleOptions opts;
    opts.replicates = 30;
    opts.seed = 1;
    auto result = bootstrap_group_means(model, opts);
    REQUIRE(result.group_labels[0] == "solo");
    CHECK(result.ellipses[0].degenerate);
    // the solo member's scores are reproduced exactly every replicate
    CHECK(result.replicate_stats.col(0).maxCoeff() == result.replicate_stats.col(0).minCoeff());
}

TEST_CASE("CA bootstrap projects into the fixed space deterministically") {
    auto brick = grouped_brick(84);
    auto model = fit_ca(sum_to_contingency(brick));
    REQUIRE(model.dimensions() >= 2);

    ResampleOptions opts;
    opts.replicates = 40;
    opts.seed = 11;
    auto r1 = bootstrap_group_means(brick, model, opts);
    CHECK(r1.replicate_stats.rows() == 40);
    CHECK(r1.replicate_stats.allFinite());
    CHECK(r1.group_labels == std::vector<std::string>{"F", "A"});

    opts.threads = 3;
    auto r3 = bootstrap_group_means(brick, model, opts);
    CHECK((r1.replicate_stats - r3.replicate_stats).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("permutation leaves single-presentation bricks invariant: p = 1") {
    // each participant saw exactly one excerpt, so shuffling labels within
    // a participant is the identity and every replicate equals the observed
    auto brick = test_util::make_brick(4, 4, test_util::simple_levels(3));
    brick.presented.setConstant(false);
    auto rng = RandomStream(85);
    for (std::size_t p = 0; p < 4; ++p) {
        const auto e = static_cast<Eigen::Index>(p);
        brick.presented(static_cast<Eigen::Index>(p), e) = true;
        for (Eigen::Index l = 0; l < 3; ++l)
            brick.values[p](e, l) = rng.next_double() < 0.6 ? 1.0 : 0.0;
        if (brick.values[p].row(e).sum() == 0.0) brick.values[p](e, 0) = 1.0;
    }
    auto result = permutation_test_eigen(brick, {.replicates = 20, .seed = 2});
    for (Eigen::Index l = 0; l < result.p_values.size(); ++l)
        CHECK(result.p_values(l) == doctest::Approx(1.0));
}

TEST_CASE("planted diagonal structure is significant") {
    // every participant tags excerpt e with level e only: maximal association
    auto brick = test_util::make_brick(8, 3, test_util::simple_levels(3));
    for (auto& slice : brick.values)
        for (Eigen::Index e = 0; e < 3; ++e) slice(e, e) = 1.0;
    auto result = permutation_test_eigen(brick, {.replicates = 99, .seed = 5});
    REQUIRE(result.p_values.size() >= 1);
    CHECK(result.p_values(0) <= 0.05);
    CHECK(result.significant[0]);
    // p-values are never exactly zero by construction
    CHECK(result.p_values.minCoeff() >= 1.0 / 100.0);
}

TEST_CASE("PLSC permutation: perfectly coupled tables hit the floor p") {
    auto rng = RandomStream(86);
    LabeledMatrix x;
    for (int i = 0; i < 12; ++i) x.row_labels.push_back("r" + std::to_string(i));
    x.col_labels = {"x0", "x1", "x2"};
    x.values = test_util::random_matrix(rng, 12, 3);
    auto result = permutation_test_plsc(x, x, {.replicates = 199, .seed = 9});
    REQUIRE(result.p_values.size() >= 1);
    CHECK(result.p_values(0) >= 1.0 / 200.0);
    CHECK(result.p_values(0) <= 0.05);
    // serial equals parallel
    auto parallel = permutation_test_plsc(x, x, {.replicates = 199, .seed = 9, .threads = 4});
    CHECK((result.replicate_stats - parallel.replicate_stats).cwiseAbs().maxCoeff() == 0.0);
    CHECK((result.p_values - parallel.p_values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("resample results serialize and round-trip") {
    auto brick = grouped_brick(87);
    auto model = fit_mds(co_occurrence(brick));
    model.groups = brick.groups;
    auto result = bootstrap_group_means(model, {.replicates = 25, .seed = 13});
    save_resample(result, "test_inference.tmp");
    auto loaded = load_resample("test_inference.tmp");
    CHECK(loaded.kind == ResampleResult::Kind::Bootstrap);
    CHECK(loaded.seed == result.seed);
    CHECK(loaded.replicates == result.replicates);
    CHECK((loaded.replicate_stats - result.replicate_stats).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(loaded.ellipses.size() == result.ellipses.size());
    for (std::size_t g = 0; g < result.ellipses.size(); ++g) {
        CHECK(loaded.ellipses[g].group == result.ellipses[g].group);
        CHECK(loaded.ellipses[g].semi_major == result.ellipses[g].semi_major);
        CHECK(loaded.ellipses[g].angle == result.ellipses[g].angle);
    }
}
