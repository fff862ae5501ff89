#include "cata/stats.hpp"

#include <algorithm>
#include <cmath>

#include "cata/errors.hpp"

namespace cata {

namespace {

// Lentz continued fraction for the incomplete beta (Numerical Recipes form).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    const double x = df / (df + t * t);
    return incomplete_beta(df / 2.0, 0.5, x);
}

double chi2_quantile_2df(double level) {
    return -2.0 * std::log1p(-level);
}

WelchResult welch_t(const Eigen::VectorXd& scores, const std::vector<std::string>& groups) {
    if (static_cast<std::size_t>(scores.size()) != groups.size())
        throw DimensionMismatch("welch_t: scores and group labels differ in length");
    std::vector<std::string> order;
    for (const auto& g : groups)
        if (std::find(order.begin(), order.end(), g) == order.end()) order.push_back(g);
    if (order.size() != 2)
        throw GroupTooSmall("welch_t: exactly two groups required, got " +
                            std::to_string(order.size()));

    double n[2] = {0, 0}, sum[2] = {0, 0};
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const int g = groups[i] == order[0] ? 0 : 1;
        n[g] += 1.0;
        sum[g] += scores(static_cast<Eigen::Index>(i));
    }
    if (n[0] < 2 || n[1] < 2) throw GroupTooSmall("welch_t: each group needs >= 2 members");

    const double mean[2] = {sum[0] / n[0], sum[1] / n[1]};
    double ss[2] = {0, 0};
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const int g = groups[i] == order[0] ? 0 : 1;
        const double d = scores(static_cast<Eigen::Index>(i)) - mean[g];
        ss[g] += d * d;
    }
    const double var[2] = {ss[0] / (n[0] - 1.0), ss[1] / (n[1] - 1.0)};
    const double se2[2] = {var[0] / n[0], var[1] / n[1]};
    const double se = std::sqrt(se2[0] + se2[1]);

    WelchResult r;
    r.group_a = order[0];
    r.group_b = order[1];
    r.mean_a = mean[0];
    r.mean_b = mean[1];
    r.sd_a = std::sqrt(var[0]);
    r.sd_b = std::sqrt(var[1]);
    if (se == 0.0) {
        r.t = 0.0;
        r.df = n[0] + n[1] - 2.0;
        r.p = 1.0;
        return r;
    }
    r.t = (mean[0] - mean[1]) / se;
    r.df = (se2[0] + se2[1]) * (se2[0] + se2[1]) /
           (se2[0] * se2[0] / (n[0] - 1.0) + se2[1] * se2[1] / (n[1] - 1.0));
    r.p = student_t_two_sided_p(r.t, r.df);
    return r;
}

}  // namespace cata
