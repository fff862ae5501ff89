#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cata/ca.hpp"
#include "cata/inference.hpp"
#include "cata/mfa.hpp"
#include "cata/plsc.hpp"

namespace cata {

// Deterministic SVG text: fixed canvas, fixed element order, two-decimal
// coordinates. Every figure regenerates byte-identically from its model.

// Fixed palette indexed by cluster/group id.
const std::vector<std::string>& color_palette();
std::string palette_color(std::size_t index);

// Axis label in the "Dimension d, lambda = x, tau = y%" form used by every
// factor map.
std::string axis_label(int dimension, double eigenvalue, double explained);

// Per-dimension bars with the average-variance line and markers over the
// significant dimensions.
std::string render_scree(const Eigen::VectorXd& explained, const std::vector<bool>& significant,
                         const std::string& title = "Scree");

struct MapPoint {
    std::string label;
    double x = 0.0, y = 0.0;
    int color = 0;          // palette index
    bool supplementary = false;
};

// Labeled point map over two factor-score dimensions.
std::string render_factor_map(const std::vector<MapPoint>& points, const std::string& x_axis,
                              const std::string& y_axis, const std::string& title);

// Signed contribution bars with +/- threshold lines.
std::string render_contribution_bars(const ContributionTable& table, Eigen::Index dimension,
                                     const std::string& title);

// Compromise diamonds with segments to each block's partial scores.
std::string render_mfa_map(const MFAModel& model, const std::string& title);

// Point map plus group-mean confidence ellipses.
std::string render_mds_ellipse_map(const std::vector<MapPoint>& points,
                                   const std::vector<ConfidenceEllipse>& ellipses,
                                   const std::string& x_axis, const std::string& y_axis,
                                   const std::string& title);

// L_x vs L_y per row, one panel per latent dimension pair, with optional
// per-cluster convex hulls.
std::string render_latent_pair_map(const LatentPair& pair, Eigen::Index dimension,
                                   const std::vector<int>& clusters, const std::string& title);

// Convex hull (monotone chain) of 2-D points, counterclockwise.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> points);

}  // namespace cata
