// Discrete geometry on the thin plane: membership masks over the plane
// nodes of a solver domain, their components, distances and shape tests.
//
// All distances are in physical length units (node spacing h), never in
// index units.  Nearest-member distances come from an exact squared
// Euclidean distance transform, so Hausdorff values are exact for the
// discrete sets.

#pragma once

#include "thinfree/poly.hpp"
#include "thinfree/solver.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace thinfree {

struct ThinSet {
    SolverDomain domain;
    std::vector<std::uint8_t> mask;  // one entry per plane node, 0 or 1

    bool at(int i, int j) const { return mask[domain.plane_index(i, j)] != 0; }
    void set(int i, int j, bool v) { mask[domain.plane_index(i, j)] = v ? 1 : 0; }
    std::int64_t count() const;
};

ThinSet make_thin_set(const SolverDomain& domain);

struct ThinSetPair {
    ThinSet contact;
    ThinSet positivity;
    std::int64_t unclassified = 0;  // plane nodes in neither mask
};

/// contact = {u - phi <= tau_c}, positivity = {u > tau_c} on the plane.
/// The band phi + tau_c < u <= tau_c (possible when phi is very negative)
/// is left unclassified and counted.
ThinSetPair extract_thin_sets(const SolutionField& field, const ObstacleProblemSpec& spec,
                              double tau_c);

/// 4-connected components, ordered by their smallest plane node index.
std::vector<ThinSet> connected_components(const ThinSet& s);

struct BoundingBox {
    int imin = 0, imax = -1, jmin = 0, jmax = -1;
};
BoundingBox bounding_box(const ThinSet& s);  // throws on the empty set

/// Symmetric Hausdorff distance; throws if either set is empty.
double hausdorff(const ThinSet& a, const ThinSet& b);

/// One-sided excess sup_{a in A} dist(a, B); throws if either set is empty.
double directed_excess(const ThinSet& a, const ThinSet& b);

/// Smallest gap min_{a in A} dist(a, B); throws if either set is empty.
double separation(const ThinSet& a, const ThinSet& b);

struct StarVerdict {
    bool star_shaped = false;
    std::int64_t rays_checked = 0;
    std::int64_t rays_failed = 0;
};

/// Discrete star-shape test: for every member node, the grid nodes within
/// h/2 of the segment [center, node] must be members.  One missing node
/// per ray is forgiven (rasterized star-shaped sets produce single-node
/// staircase violations).
StarVerdict star_shaped(const ThinSet& s, double cx, double cy);

/// True iff the set fills the raster of its own convex hull up to a
/// one-node boundary layer.
bool convexity_check(const ThinSet& s);

struct EtaBarResult {
    double value = 0.0;
    /// Set when no node of the unit-disc raster is farther than eps from
    /// the sublevel set; the value then falls back to the unfiltered min.
    bool fallback = false;
};

/// min of g over the unit-disc raster nodes at distance > eps from the
/// discrete sublevel set {g <= 0}.  Requires g > 0 on the rim of the
/// unit-disc raster and a domain with L >= 1.
EtaBarResult eta_bar(const SolverDomain& domain, const std::vector<double>& g, double eps);

/// Exact Euclidean distance from every plane node to the nearest point
/// of K (brute force; K is small).  Throws on empty K.
std::vector<double> distance_grid(const std::vector<std::array<double, 2>>& K,
                                  const SolverDomain& domain);

/// Members whose 4-neighbourhood leaves the set (off-grid counts as out).
ThinSet raster_boundary(const ThinSet& s);
ThinSet erode4(const ThinSet& s);

/// Closed metric dilation: nodes within `radius` of some member.
ThinSet neighborhood(const ThinSet& s, double radius);

ThinSet set_and(const ThinSet& a, const ThinSet& b);
ThinSet set_diff(const ThinSet& a, const ThinSet& b);
bool subset_of(const ThinSet& a, const ThinSet& b);

/// Nearest plane node for each point (clamped to the grid).
ThinSet raster_points(const std::vector<std::array<double, 2>>& pts,
                      const SolverDomain& domain);

/// Nodes with p(x) <= level; p may have dimension 1 (thin line) or 2.
ThinSet raster_sublevel(const Polynomial& p, double level, const SolverDomain& domain);

/// Nodes of the closed disc of radius r about (cx, cy).
ThinSet raster_disc(double cx, double cy, double r, const SolverDomain& domain);

/// PGM (P2) export, one pixel per plane node, 0 = out, 255 = in; rows are
/// written top-to-bottom with y decreasing.  The overlay variant paints
/// overlay members mid-gray on top of the base mask.
void write_pgm(const std::string& path, const ThinSet& s);
void write_pgm_overlay(const std::string& path, const ThinSet& base, const ThinSet& overlay);

/// CSV export "i,j,x,y,in".
void write_mask_csv(const std::string& path, const ThinSet& s);

}  // namespace thinfree
