#include <doctest.h>

#include "cata/errors.hpp"
#include "cata/svg.hpp"
#include "test_util.hpp"

using namespace cata;

namespace {

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0, at = 0;
    while ((at = haystack.find(needle, at)) != std::string::npos) {
        ++count;
        at += needle.size();
    }
    return count;
}

}  // namespace

TEST_CASE("axis label follows the fixed template") {
    CHECK(axis_label(1, 0.1234567, 0.4567) == "Dimension 1, lambda = 0.1235, tau = 45.7%");
    CHECK(axis_label(2, 1.0, 1.0) == "Dimension 2, lambda = 1.0000, tau = 100.0%");
}

TEST_CASE("palette cycles and colors are well-formed") {
    const auto& palette = color_palette();
    REQUIRE(!palette.empty());
    for (const auto& c : palette) {
        CHECK(c.size() == 7);
        CHECK(c[0] == '#');
    }
    CHECK(palette_color(0) == palette[0]);
    CHECK(palette_color(palette.size()) == palette[0]);  // wraps around
}

TEST_CASE("scree plot has one bar per dimension and significance dots") {
    Eigen::VectorXd explained(4);
    explained << 0.5, 0.3, 0.15, 0.05;
    std::vector<bool> significant = {true, true, false, false};
    auto svg = render_scree(explained, significant, "Scree");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count_occurrences(svg, "class=\"bar\"") == 4);
    CHECK(count_occurrences(svg, "class=\"sig\"") == 2);
    CHECK(svg.find("class=\"avg\"") != std::string::npos);

    CHECK_THROWS_AS(render_scree(Eigen::VectorXd(), {}, "empty"), EmptyModel);
}

TEST_CASE("factor maps are byte-identical across renders") {
    std::vector<MapPoint> points = {{"alpha", 0.5, -0.25, 0, false},
                                    {"beta", -1.0, 0.75, 1, false},
                                    {"gamma", 0.0, 0.0, 0, true}};
    auto a = render_factor_map(points, "x", "y", "map");
    auto b = render_factor_map(points, "x", "y", "map");
    CHECK(a == b);
    CHECK(a.find("alpha") != std::string::npos);
    CHECK(a.find("gamma") != std::string::npos);
    // supplementary points are drawn in their own style
    CHECK(a.find("class=\"sup\"") != std::string::npos);
    // no negative zero in coordinates
    CHECK(a.find("-0.00") == std::string::npos);
}

TEST_CASE("contribution bars draw both threshold lines") {
    ContributionTable t;
    t.labels = {"a", "b", "c"};
    t.signed_contributions.resize(3, 2);
    t.signed_contributions << 0.6, -0.1, -0.3, 0.7, 0.1, -0.2;
    t.threshold = 1.0 / 3.0;
    t.important = t.signed_contributions.array().abs() > t.threshold;
    auto svg = render_contribution_bars(t, 0, "contrib");
    CHECK(count_occurrences(svg, "class=\"threshold\"") == 2);
    CHECK(count_occurrences(svg, "class=\"bar\"") == 3);
    CHECK_THROWS_AS(render_contribution_bars(t, 5, "bad"), DimensionOutOfRange);
}

TEST_CASE("MFA map links each compromise point to its partials") {
    auto rng = RandomStream(91);
    MFAModel model;
    model.row_labels = {"r0", "r1", "r2"};
    model.block_ids = {"b0", "b1"};
    model.eigenvalues = Eigen::VectorXd::Ones(2);
    model.explained = Eigen::VectorXd::Constant(2, 0.5);
    model.compromise = test_util::random_matrix(rng, 3, 2);
    model.partial = {test_util::random_matrix(rng, 3, 2), test_util::random_matrix(rng, 3, 2)};
    auto svg = render_mfa_map(model, "mfa");
    // one diamond per row, one segment per (row, block)
    CHECK(count_occurrences(svg, "class=\"compromise\"") == 3);
    CHECK(count_occurrences(svg, "class=\"partial-link\"") == 6);
}

TEST_CASE("ellipse map embeds one ellipse per group") {
    std::vector<MapPoint> points = {{"p0", 0.1, 0.2, 0, false}, {"p1", -0.4, 0.3, 1, false}};
    ConfidenceEllipse e1, e2;
    e1.group = "F";
    e1.center << 0.1, 0.2;
    e1.semi_major = 0.5;
    e1.semi_minor = 0.2;
    e2.group = "A";
    e2.center << -0.4, 0.3;
    e2.semi_major = 0.3;
    e2.semi_minor = 0.1;
    auto svg = render_mds_ellipse_map(points, {e1, e2}, "x", "y", "groups");
    CHECK(count_occurrences(svg, "<ellipse") == 2);
    CHECK(svg.find("F") != std::string::npos);
}

TEST_CASE("latent pair map draws cluster hulls when given clusters") {
    auto rng = RandomStream(92);
    LatentPair pair;
    for (int i = 0; i < 8; ++i) pair.row_labels.push_back("r" + std::to_string(i));
    pair.singular_values = Eigen::VectorXd::Ones(2);
    pair.explained = Eigen::VectorXd::Constant(2, 0.5);
    pair.x_latent = test_util::random_matrix(rng, 8, 2);
    pair.y_latent = test_util::random_matrix(rng, 8, 2);
    std::vector<int> clusters = {0, 0, 0, 0, 1, 1, 1, 1};
    auto svg = render_latent_pair_map(pair, 0, clusters, "latent");
    CHECK(count_occurrences(svg, "class=\"hull\"") == 2);
    auto bare = render_latent_pair_map(pair, 0, {}, "latent");
    CHECK(bare.find("class=\"hull\"") == std::string::npos);
    CHECK_THROWS_AS(render_latent_pair_map(pair, 9, {}, "bad"), DimensionOutOfRange);
}

TEST_CASE("convex hull of a square with interior points") {
    std::vector<Eigen::Vector2d> pts = {{0, 0}, {1, 0}, {1, 1},      {0, 1},
                                        {0.5, 0.5}, {0.25, 0.75}, {0, 0}};
    auto hull = convex_hull(pts);
    REQUIRE(hull.size() == 4);
    // counterclockwise from the lexicographically smallest point
    CHECK(hull[0].x() == 0.0);
    CHECK(hull[0].y() == 0.0);
    double area2 = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        area2 += a.x() * b.y() - b.x() * a.y();
    }
    CHECK(area2 == doctest::Approx(2.0));  // positive orientation, area 1

    // degenerate inputs survive
    CHECK(convex_hull({{1, 1}}).size() == 1);
    CHECK(convex_hull({{0, 0}, {1, 1}, {2, 2}}).size() == 2);
}
