#include <doctest.h>

#include "cata/errors.hpp"
#include "cata/mds.hpp"
#include "test_util.hpp"

using namespace cata;

namespace {

DistanceMatrix from_points(const Eigen::MatrixXd& pts) {
    DistanceMatrix d;
    const Eigen::Index n = pts.rows();
    for (Eigen::Index i = 0; i < n; ++i) d.labels.push_back("p" + std::to_string(i));
    d.distances.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            d.distances(i, j) = (pts.row(i) - pts.row(j)).norm();
    return d;
}

// best orthogonal alignment (rotation/reflection + translation) residual
double procrustes_error(const Eigen::MatrixXd& recovered, const Eigen::MatrixXd& target) {
    Eigen::MatrixXd a = recovered.rowwise() - recovered.colwise().mean();
    Eigen::MatrixXd b = target.rowwise() - target.colwise().mean();
    if (a.cols() < b.cols()) {
        a.conservativeResize(Eigen::NoChange, b.cols());
        a.rightCols(b.cols() - recovered.cols()).setZero();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.transpose() * a,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd rot = svd.matrixV() * svd.matrixU().transpose();
    return (a * rot - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("three collinear points recover (-1, 0, 1)") {
    DistanceMatrix d;
    d.labels = {"A", "B", "C"};
    d.distances.resize(3, 3);
    d.distances << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    auto model = fit_mds(d);
    REQUIRE(model.dimensions() == 1);
    std::vector<double> coords = {model.scores(0, 0), model.scores(1, 0), model.scores(2, 0)};
    // up to sign
    if (coords[0] > coords[2])
        for (auto& c : coords) c = -c;
    CHECK(coords[0] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(coords[1] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(coords[2] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("equilateral triangle gives two equal positive eigenvalues") {
    Eigen::MatrixXd pts(3, 2);
    pts << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2.0;
    auto model = fit_mds(from_points(pts));
    REQUIRE(model.dimensions() == 2);
    CHECK(model.eigenvalues(0) == doctest::Approx(model.eigenvalues(1)).epsilon(1e-10));
}

TEST_CASE("planted 2-D configurations are recovered") {
    auto rng = RandomStream(41);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd pts = test_util::random_matrix(rng, 12, 2);
        auto model = fit_mds(from_points(pts));
        CHECK(procrustes_error(model.scores, pts) <= 1e-8);
    }
}

TEST_CASE("translation of the configuration changes nothing") {
    auto rng = RandomStream(42);
    const Eigen::MatrixXd pts = test_util::random_matrix(rng, 8, 2);
    Eigen::MatrixXd shifted = pts;
    shifted.col(0).array() += 17.0;
    shifted.col(1).array() -= 3.0;
    auto m1 = fit_mds(from_points(pts));
    auto m2 = fit_mds(from_points(shifted));
    CHECK((m1.scores - m2.scores).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("score columns are centered and explained variance sums to one") {
    auto rng = RandomStream(43);
    const Eigen::MatrixXd pts = test_util::random_matrix(rng, 10, 3);
    auto model = fit_mds(from_points(pts));
    for (Eigen::Index l = 0; l < model.dimensions(); ++l)
        CHECK(std::abs(model.scores.col(l).mean()) < 1e-10);
    CHECK(model.explained.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("co-occurrence input: identical participants coincide") {
    CoOccurrenceMatrix c;
    c.participants = {"p1", "p2", "p3"};
    c.cells.resize(3, 3);
    // p1 and p2 identical (5 selections, all shared), p3 different
    c.cells << 5, 5, 1, 5, 5, 1, 1, 1, 4;
    c.diag = c.cells.diagonal();
    auto model = fit_mds(c);
    CHECK((model.scores.row(0) - model.scores.row(1)).norm() < 1e-10);
}

TEST_CASE("non-Euclidean input drops negative eigenvalues with a diagnostic") {
    DistanceMatrix d;
    d.labels = {"a", "b", "c", "d"};
    d.distances.resize(4, 4);
    // violates the triangle-derived Euclidean embedding conditions
    d.distances << 0, 1, 1, 1, 1, 0, 1, 1, 1, 1, 0, 2.8, 1, 1, 2.8, 0;
    auto model = fit_mds(d);
    CHECK(model.negative_mass > 0.0);
    CHECK((model.eigenvalues.array() > 0.0).all());
}

TEST_CASE("asymmetric and negative inputs are rejected") {
    DistanceMatrix d;
    d.labels = {"a", "b"};
    d.distances.resize(2, 2);
    d.distances << 0, 1, 2, 0;
    CHECK_THROWS_AS(fit_mds(d), AsymmetricInput);
    d.distances << 0, -1, -1, 0;
    CHECK_THROWS_AS(fit_mds(d), NegativeDistance);
}

TEST_CASE("group means average member scores") {
    auto rng = RandomStream(44);
    const Eigen::MatrixXd pts = test_util::random_matrix(rng, 6, 2);
    auto model = fit_mds(from_points(pts));
    model.groups = {"F", "A", "F", "A", "F", "A"};
    auto [labels, means] = group_means(model);
    REQUIRE(labels.size() == 2);
    CHECK(labels[0] == "F");
    Eigen::RowVectorXd expected =
        (model.scores.row(0) + model.scores.row(2) + model.scores.row(4)) / 3.0;
    CHECK((means.row(0) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("MDS serialization round-trips") {
    auto rng = RandomStream(45);
    auto model = fit_mds(from_points(test_util::random_matrix(rng, 5, 2)));
    model.groups = {"F", "F", "A", "A", "A"};
    save_mds(model, "test_mds.tmp");
    auto loaded = load_mds("test_mds.tmp");
    CHECK((loaded.scores - model.scores).cwiseAbs().maxCoeff() == 0.0);
    CHECK(loaded.groups == model.groups);
}
