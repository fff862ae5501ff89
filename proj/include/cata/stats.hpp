#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace cata {

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Student-t two-sided p-value for |t| with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

// Chi-square quantile with 2 degrees of freedom (closed form).
double chi2_quantile_2df(double level);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;  // Welch-Satterthwaite, real-valued
    double p = 1.0;   // two-sided
    double mean_a = 0.0, mean_b = 0.0;
    double sd_a = 0.0, sd_b = 0.0;
    std::string group_a, group_b;
};

// Welch unequal-variance t-test between the two label groups found in
// `groups` (exactly two distinct labels expected, each with >= 2 members).
WelchResult welch_t(const Eigen::VectorXd& scores, const std::vector<std::string>& groups);

}  // namespace cata
