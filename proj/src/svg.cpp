#include "cata/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "cata/errors.hpp"

namespace cata {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 56.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    // normalize negative zero so output never depends on rounding direction
    if (std::string(buf) == "-0.00") return "0.00";
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double xmin, xmax, ymin, ymax;

    static Frame around(const std::vector<Eigen::Vector2d>& pts, double pad = 0.1) {
        Frame f{-1.0, 1.0, -1.0, 1.0};
        if (!pts.empty()) {
            f.xmin = f.xmax = pts.front().x();
            f.ymin = f.ymax = pts.front().y();
            for (const auto& p : pts) {
                f.xmin = std::min(f.xmin, p.x());
                f.xmax = std::max(f.xmax, p.x());
                f.ymin = std::min(f.ymin, p.y());
                f.ymax = std::max(f.ymax, p.y());
            }
        }
        const double dx = std::max(f.xmax - f.xmin, 1e-9);
        const double dy = std::max(f.ymax - f.ymin, 1e-9);
        f.xmin -= pad * dx;
        f.xmax += pad * dx;
        f.ymin -= pad * dy;
        f.ymax += pad * dy;
        return f;
    }

    double px(double x) const {
        return kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin);
    }
    double py(double y) const {
        return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin);
    }
};

class Svg {
public:
    explicit Svg(const std::string& title) {
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
            << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
        os_ << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
        text(kWidth / 2, 24, escape(title), 16, "middle", "black");
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              const std::string& extra = "") {
        os_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
            << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\"" << extra << "/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& extra = "") {
        os_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
            << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\"" << extra << "/>\n";
    }
    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& extra = "") {
        os_ << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt(r)
            << "\" fill=\"" << fill << "\"" << extra << "/>\n";
    }
    void polygon(const std::vector<Eigen::Vector2d>& pts, const std::string& attrs) {
        os_ << "<polygon points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) os_ << " ";
            os_ << fmt(pts[i].x()) << "," << fmt(pts[i].y());
        }
        os_ << "\" " << attrs << "/>\n";
    }
    void ellipse(double cx, double cy, double rx, double ry, double angle_deg,
                 const std::string& stroke) {
        os_ << "<ellipse cx=\"0\" cy=\"0\" rx=\"" << fmt(rx) << "\" ry=\"" << fmt(ry)
            << "\" fill=\"none\" stroke=\"" << stroke << "\" transform=\"translate(" << fmt(cx)
            << "," << fmt(cy) << ") rotate(" << fmt(angle_deg) << ")\"/>\n";
    }
    void text(double x, double y, const std::string& s, int size, const std::string& anchor,
              const std::string& fill, const std::string& extra = "") {
        os_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << size
            << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\" fill=\"" << fill
            << "\"" << extra << ">" << s << "</text>\n";
    }
    void axes(const Frame& f, const std::string& x_axis, const std::string& y_axis) {
        // zero lines when visible, otherwise frame edges
        if (f.xmin < 0 && f.xmax > 0)
            line(f.px(0), kMargin, f.px(0), kHeight - kMargin, "#cccccc");
        if (f.ymin < 0 && f.ymax > 0)
            line(kMargin, f.py(0), kWidth - kMargin, f.py(0), "#cccccc");
        line(kMargin, kHeight - kMargin, kWidth - kMargin, kHeight - kMargin, "black");
        line(kMargin, kMargin, kMargin, kHeight - kMargin, "black");
        text(kWidth / 2, kHeight - 16, escape(x_axis), 12, "middle", "black");
        text(16, kHeight / 2, escape(y_axis), 12, "middle", "black",
             " transform=\"rotate(-90 16 " + fmt(kHeight / 2) + ")\"");
    }

    std::string str() {
        os_ << "</svg>\n";
        return os_.str();
    }

private:
    std::ostringstream os_;
};

}  // namespace

const std::vector<std::string>& color_palette() {
    static const std::vector<std::string> palette = {
        "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e",
        "#e6ab02", "#a6761d", "#666666", "#1f78b4", "#b2df8a",
    };
    return palette;
}

std::string palette_color(std::size_t index) {
    const auto& p = color_palette();
    return p[index % p.size()];
}

std::string axis_label(int dimension, double eigenvalue, double explained) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "Dimension %d, lambda = %.4f, tau = %.1f%%", dimension,
                  eigenvalue, 100.0 * explained);
    return buf;
}

std::string render_scree(const Eigen::VectorXd& explained, const std::vector<bool>& significant,
                         const std::string& title) {
    const Eigen::Index n = explained.size();
    if (n == 0) throw EmptyModel("scree: model has no dimensions");
    Svg svg(title);
    const double plot_w = kWidth - 2 * kMargin;
    const double plot_h = kHeight - 2 * kMargin;
    const double vmax = std::max(explained.maxCoeff(), 1e-12);
    const double bar_w = plot_w / static_cast<double>(n);

    for (Eigen::Index l = 0; l < n; ++l) {
        const double h = explained(l) / vmax * plot_h * 0.9;
        const double x = kMargin + static_cast<double>(l) * bar_w + bar_w * 0.15;
        svg.rect(x, kHeight - kMargin - h, bar_w * 0.7, h, "#7570b3", " class=\"bar\"");
        if (static_cast<std::size_t>(l) < significant.size() &&
            significant[static_cast<std::size_t>(l)])
            svg.circle(kMargin + (static_cast<double>(l) + 0.5) * bar_w,
                       kHeight - kMargin - h - 10, 3.5, "black", " class=\"sig\"");
        svg.text(kMargin + (static_cast<double>(l) + 0.5) * bar_w, kHeight - kMargin + 14,
                 std::to_string(l + 1), 10, "middle", "black");
    }
    // average explained variance per dimension
    const double avg = explained.mean();
    const double avg_y = kHeight - kMargin - avg / vmax * plot_h * 0.9;
    svg.line(kMargin, avg_y, kWidth - kMargin, avg_y, "#d95f02",
             " stroke-dasharray=\"4 3\" class=\"avg\"");
    svg.line(kMargin, kHeight - kMargin, kWidth - kMargin, kHeight - kMargin, "black");
    svg.line(kMargin, kMargin, kMargin, kHeight - kMargin, "black");
    svg.text(kWidth / 2, kHeight - 16, "Dimension", 12, "middle", "black");
    return svg.str();
}

std::string render_factor_map(const std::vector<MapPoint>& points, const std::string& x_axis,
                              const std::string& y_axis, const std::string& title) {
    if (points.empty()) throw EmptyModel("factor map: no points");
    std::vector<Eigen::Vector2d> coords;
    for (const auto& p : points) coords.emplace_back(p.x, p.y);
    const Frame f = Frame::around(coords);
    Svg svg(title);
    svg.axes(f, x_axis, y_axis);
    for (const auto& p : points) {
        const std::string color = palette_color(static_cast<std::size_t>(p.color));
        if (p.supplementary)
            svg.circle(f.px(p.x), f.py(p.y), 4.0, "none",
                       " stroke=\"" + color + "\" class=\"sup\"");
        else
            svg.circle(f.px(p.x), f.py(p.y), 3.0, color);
        svg.text(f.px(p.x) + 5, f.py(p.y) - 5, escape(p.label), 9, "start", "black");
    }
    return svg.str();
}

std::string render_contribution_bars(const ContributionTable& table, Eigen::Index dimension,
                                     const std::string& title) {
    if (dimension < 0 || dimension >= table.signed_contributions.cols())
        throw DimensionOutOfRange("contribution bars: no such dimension");
    const Eigen::Index n = table.signed_contributions.rows();
    Svg svg(title);
    const double plot_w = kWidth - 2 * kMargin;
    const double mid_y = kHeight / 2.0;
    const double bar_w = plot_w / static_cast<double>(n);
    const double vmax =
        std::max(table.signed_contributions.col(dimension).cwiseAbs().maxCoeff(), table.threshold);
    const double scale = (kHeight / 2.0 - kMargin) / vmax;

    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = table.signed_contributions(i, dimension);
        const double h = std::abs(v) * scale;
        const double x = kMargin + static_cast<double>(i) * bar_w + bar_w * 0.1;
        const bool important = table.important(i, dimension);
        const std::string fill = important ? (v >= 0 ? "#1b9e77" : "#d95f02") : "#bbbbbb";
        svg.rect(x, v >= 0 ? mid_y - h : mid_y, bar_w * 0.8, h, fill, " class=\"bar\"");
        svg.text(x + bar_w * 0.4, v >= 0 ? mid_y + 11 : mid_y - 4, escape(table.labels[i]), 7,
                 "middle", "black");
    }
    svg.line(kMargin, mid_y, kWidth - kMargin, mid_y, "black");
    svg.line(kMargin, mid_y - table.threshold * scale, kWidth - kMargin,
             mid_y - table.threshold * scale, "#666666",
             " stroke-dasharray=\"4 3\" class=\"threshold\"");
    svg.line(kMargin, mid_y + table.threshold * scale, kWidth - kMargin,
             mid_y + table.threshold * scale, "#666666",
             " stroke-dasharray=\"4 3\" class=\"threshold\"");
    return svg.str();
}

std::string render_mfa_map(const MFAModel& model, const std::string& title) {
    if (model.dimensions() < 2) throw EmptyModel("MFA map needs at least two dimensions");
    std::vector<Eigen::Vector2d> coords;
    for (Eigen::Index i = 0; i < model.compromise.rows(); ++i) {
        coords.emplace_back(model.compromise(i, 0), model.compromise(i, 1));
        for (const auto& fk : model.partial) coords.emplace_back(fk(i, 0), fk(i, 1));
    }
    const Frame f = Frame::around(coords);
    Svg svg(title);
    svg.axes(f, axis_label(1, model.eigenvalues(0), model.explained(0)),
             axis_label(2, model.eigenvalues(1), model.explained(1)));
    for (Eigen::Index i = 0; i < model.compromise.rows(); ++i) {
        const double cx = f.px(model.compromise(i, 0));
        const double cy = f.py(model.compromise(i, 1));
        for (std::size_t k = 0; k < model.partial.size(); ++k) {
            const double px = f.px(model.partial[k](i, 0));
            const double py = f.py(model.partial[k](i, 1));
            const std::string color = palette_color(k);
            svg.line(cx, cy, px, py, color, " class=\"partial-link\"");
            svg.circle(px, py, 2.5, color);
        }
        // compromise diamond
        svg.polygon({{cx, cy - 4.5}, {cx + 4.5, cy}, {cx, cy + 4.5}, {cx - 4.5, cy}},
                    "fill=\"black\" class=\"compromise\"");
        svg.text(cx + 6, cy - 6, escape(model.row_labels[static_cast<std::size_t>(i)]), 9, "start",
                 "black");
    }
    return svg.str();
}

std::string render_mds_ellipse_map(const std::vector<MapPoint>& points,
                                   const std::vector<ConfidenceEllipse>& ellipses,
                                   const std::string& x_axis, const std::string& y_axis,
                                   const std::string& title) {
    if (points.empty()) throw EmptyModel("MDS map: no points");
    std::vector<Eigen::Vector2d> coords;
    for (const auto& p : points) coords.emplace_back(p.x, p.y);
    const Frame f = Frame::around(coords);
    Svg svg(title);
    svg.axes(f, x_axis, y_axis);
    for (const auto& p : points)
        svg.circle(f.px(p.x), f.py(p.y), 2.5, palette_color(static_cast<std::size_t>(p.color)));
    const double sx = (kWidth - 2 * kMargin) / (f.xmax - f.xmin);
    const double sy = (kHeight - 2 * kMargin) / (f.ymax - f.ymin);
    for (std::size_t g = 0; g < ellipses.size(); ++g) {
        const auto& e = ellipses[g];
        // screen y is flipped, so the rotation angle flips too; axes are
        // scaled with the mean plot scale to stay an ellipse element
        const double s = 0.5 * (sx + sy);
        svg.ellipse(f.px(e.center.x()), f.py(e.center.y()), e.semi_major * s, e.semi_minor * s,
                    -e.angle * 180.0 / std::numbers::pi, palette_color(g));
        svg.text(f.px(e.center.x()), f.py(e.center.y()) - 8, escape(e.group), 11, "middle",
                 palette_color(g));
    }
    return svg.str();
}

std::string render_latent_pair_map(const LatentPair& pair, Eigen::Index dimension,
                                   const std::vector<int>& clusters, const std::string& title) {
    if (pair.dimensions() == 0) throw EmptyModel("latent map: empty latent space");
    if (dimension < 0 || dimension >= pair.dimensions())
        throw DimensionOutOfRange("latent map: no such dimension");
    std::vector<Eigen::Vector2d> coords;
    for (Eigen::Index i = 0; i < pair.x_latent.rows(); ++i)
        coords.emplace_back(pair.x_latent(i, dimension), pair.y_latent(i, dimension));
    const Frame f = Frame::around(coords);
    Svg svg(title);
    char xl[48], yl[48];
    std::snprintf(xl, sizeof(xl), "Latent variable %ld (x)", static_cast<long>(dimension + 1));
    std::snprintf(yl, sizeof(yl), "Latent variable %ld (y)", static_cast<long>(dimension + 1));
    svg.axes(f, xl, yl);

    // per-cluster convex hulls first, so points draw on top
    if (!clusters.empty()) {
        int max_cluster = *std::max_element(clusters.begin(), clusters.end());
        for (int cl = 0; cl <= max_cluster; ++cl) {
            std::vector<Eigen::Vector2d> members;
            for (std::size_t i = 0; i < clusters.size(); ++i)
                if (clusters[i] == cl)
                    members.emplace_back(f.px(coords[i].x()), f.py(coords[i].y()));
            if (members.size() < 3) continue;
            svg.polygon(convex_hull(members),
                        "fill=\"" + palette_color(static_cast<std::size_t>(cl)) +
                            "\" fill-opacity=\"0.15\" stroke=\"" +
                            palette_color(static_cast<std::size_t>(cl)) + "\" class=\"hull\"");
        }
    }
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const int cl = i < clusters.size() ? clusters[i] : 0;
        svg.circle(f.px(coords[i].x()), f.py(coords[i].y()), 3.0,
                   palette_color(static_cast<std::size_t>(cl)));
        svg.text(f.px(coords[i].x()) + 5, f.py(coords[i].y()) - 5, escape(pair.row_labels[i]), 9,
                 "start", "black");
    }
    return svg.str();
}

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> points) {
    std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    points.erase(std::unique(points.begin(), points.end(),
                             [](const auto& a, const auto& b) {
                                 return a.x() == b.x() && a.y() == b.y();
                             }),
                 points.end());
    if (points.size() < 3) return points;
    auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Eigen::Vector2d> hull(2 * points.size());
    std::size_t k = 0;
    for (const auto& p : points) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = points.rbegin() + 1; it != points.rend(); ++it) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace cata
