#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cata/brick.hpp"
#include "cata/ca.hpp"
#include "cata/labeled_matrix.hpp"
#include "cata/mds.hpp"
#include "cata/plsc.hpp"

namespace cata {

struct ConfidenceEllipse {
    std::string group;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double angle = 0.0;  // radians, major-axis direction
    double level = 0.95;
    bool degenerate = false;

    bool contains(const Eigen::Vector2d& point) const;
};

struct ResampleResult {
    enum class Kind { Bootstrap, Permutation } kind = Kind::Bootstrap;
    std::uint64_t seed = 0;
    std::size_t replicates = 0;
    // bootstrap: per replicate, group means flattened (group-major, x then y)
    // permutation: per replicate, the statistic per dimension
    Eigen::MatrixXd replicate_stats;
    std::vector<std::string> group_labels;
    std::vector<ConfidenceEllipse> ellipses;
    Eigen::VectorXd observed;  // observed statistic per dimension
    Eigen::VectorXd p_values;  // permutation only
    double alpha = 0.05;
    std::vector<bool> significant;
};

struct ResampleOptions {
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    double level = 0.95;       // bootstrap coverage
    double alpha = 0.05;       // permutation significance
    unsigned threads = 1;      // replicate-parallel; results identical either way
};

// Bootstrap group means in a fixed CA space: participants are resampled with
// replacement within each group, each replicate's group position is the
// supplementary projection of the group's aggregate level profile.
ResampleResult bootstrap_group_means(const ResponseBrick& brick, const CAModel& space,
                                     const ResampleOptions& opts);

// Bootstrap group means of MDS scores: replicate position is the mean of the
// resampled members' scores on the first two dimensions.
ResampleResult bootstrap_group_means(const MDSModel& space, const ResampleOptions& opts);

// Covariance ellipse of a 2-D cloud at the chi-square(2) quantile.
ConfidenceEllipse covariance_ellipse(const Eigen::MatrixXd& cloud, double level);

// Permutation significance of CA eigenvalues: each replicate independently
// shuffles every participant's excerpt labels across that participant's
// presented excerpts, rebuilds the table and refits.
ResampleResult permutation_test_eigen(const ResponseBrick& brick, const ResampleOptions& opts);

// Permutation significance of PLSC singular values: row order of y permuted.
ResampleResult permutation_test_plsc(const LabeledMatrix& x, const LabeledMatrix& y,
                                     const ResampleOptions& opts, const PLSCOptions& plsc = {});

void save_resample(const ResampleResult& result, const std::string& path);
ResampleResult load_resample(const std::string& path);

}  // namespace cata
