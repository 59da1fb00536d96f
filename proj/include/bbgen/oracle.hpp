#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "bbgen/box.hpp"
#include "bbgen/error.hpp"
#include "bbgen/feasible_space.hpp"

// Brute-force references for the feasible-space geometry and the sampling
// statistics. Nothing here calls the region equations, the polygon sampler's
// membership test or any generator: membership comes straight from the IoU
// of the completed box.
namespace bbgen::oracle {

/// Default grid pitch, relative to the reference box extents.
inline constexpr double kDefaultPitch = 0.005;

/// Regular grid of candidate corner positions.
struct GridSpec {
    Point lo;
    std::size_t nx = 0;
    std::size_t ny = 0;
    double pitch_x = 0.0;
    double pitch_y = 0.0;

    Point at(std::size_t i, std::size_t j) const noexcept {
        return {lo.x + pitch_x * static_cast<double>(i), lo.y + pitch_y * static_cast<double>(j)};
    }
    std::size_t size() const noexcept { return nx * ny; }
};

/// Grid centred on the corner of `b` named by `kind`, wide enough to hold the
/// whole feasible region at threshold `t` plus `margin`, with the corner
/// itself on a grid node. Pitch and margin are relative to b's extents.
inline GridSpec grid_around(const Box& b, double t, CornerKind kind, double pitch = kDefaultPitch,
                            double margin = 0.05) {
    if (!(pitch > 0.0) || !(t > 0.0 && t < 1.0)) {
        throw ParameterError("grid needs a positive pitch and a threshold in (0, 1)");
    }
    // Any box with IoU >= t has each side within [t, 1/t] of b's, so no
    // feasible corner is farther than (1/t - 1) extents from b's corner.
    const double reach = 1.0 / t - 1.0 + margin;
    const auto half = static_cast<std::size_t>(std::ceil(reach / pitch));
    const Point corner = kind == CornerKind::TopLeft ? b.top_left() : b.bottom_right();
    GridSpec grid;
    grid.pitch_x = pitch * b.width();
    grid.pitch_y = pitch * b.height();
    grid.lo = {corner.x - grid.pitch_x * static_cast<double>(half), corner.y - grid.pitch_y * static_cast<double>(half)};
    grid.nx = grid.ny = 2 * half + 1;
    return grid;
}

struct BooleanField {
    GridSpec grid;
    std::vector<char> inside;

    bool at(std::size_t i, std::size_t j) const { return inside[j * grid.nx + i] != 0; }
    std::size_t count() const { return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), 1)); }
};

/// Marks each grid point whose completed box (opposite corner fixed at
/// `fixed_corner`) reaches IoU >= t with b.
inline BooleanField brute_force_corner_region(const Box& b, double t, CornerKind kind, Point fixed_corner,
                                              const GridSpec& grid) {
    BooleanField field;
    field.grid = grid;
    field.inside.assign(grid.size(), 0);
    for (std::size_t j = 0; j < grid.ny; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            const Point p = grid.at(i, j);
            const Point tl = kind == CornerKind::TopLeft ? p : fixed_corner;
            const Point br = kind == CornerKind::TopLeft ? fixed_corner : p;
            if (!(br.x > tl.x && br.y > tl.y)) {
                continue;
            }
            field.inside[j * grid.nx + i] = iou(Box(tl, br), b) >= t ? 1 : 0;
        }
    }
    return field;
}

/// Signed crossing of edge a->b with the rightward ray from p (+1 upward
/// with p on its left, -1 downward with p on its right, else 0).
inline int edge_winding(Point a, Point b, Point p) noexcept {
    const double side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
        return b.y > p.y && side > 0.0 ? 1 : 0;
    }
    return b.y <= p.y && side < 0.0 ? -1 : 0;
}

/// Winding number of the closed ring around p (non-zero means inside).
inline int winding_number(const std::vector<Point>& ring, Point p) noexcept {
    int wn = 0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        wn += edge_winding(ring[i], ring[(i + 1) % ring.size()], p);
    }
    return wn;
}

/// Distance from p to the ring's edges in a frame scaled by (1/sx, 1/sy).
inline double ring_distance(const std::vector<Point>& ring, Point p, double sx = 1.0, double sy = 1.0) noexcept {
    const double px = p.x / sx, py = p.y / sy;
    if (ring.size() == 1) {
        return std::hypot(px - ring[0].x / sx, py - ring[0].y / sy);
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const double ax = ring[i].x / sx, ay = ring[i].y / sy;
        const double bx = ring[(i + 1) % ring.size()].x / sx, by = ring[(i + 1) % ring.size()].y / sy;
        const double dx = bx - ax, dy = by - ay;
        const double len2 = dx * dx + dy * dy;
        const double u = len2 > 0.0 ? std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, std::hypot(px - (ax + u * dx), py - (ay + u * dy)));
    }
    return best;
}

struct DiscrepancyReport {
    std::size_t checked = 0;
    /// Disagreements farther than the tolerance from the polygon boundary.
    std::vector<Point> interior;
    /// Disagreements within the tolerance band (permitted).
    std::size_t near_boundary = 0;

    bool pass() const noexcept { return interior.empty(); }
};

/// Compares polygon membership against the oracle field. Distances are in
/// units of the reference extents (`scale_x`, `scale_y`).
inline DiscrepancyReport compare_polygon_to_oracle(const FeasiblePolygon& poly, const BooleanField& field,
                                                   double boundary_tolerance, double scale_x = 1.0,
                                                   double scale_y = 1.0) {
    DiscrepancyReport report;
    const auto& ring = poly.vertices;
    std::vector<Point> row_edges;
    for (std::size_t j = 0; j < field.grid.ny; ++j) {
        // Only edges spanning this row's y can change a winding number on it.
        const double y = field.grid.at(0, j).y;
        row_edges.clear();
        for (std::size_t k = 0; ring.size() > 1 && k < ring.size(); ++k) {
            const Point a = ring[k], b = ring[(k + 1) % ring.size()];
            if ((a.y <= y) != (b.y <= y)) {
                row_edges.push_back(a);
                row_edges.push_back(b);
            }
        }
        for (std::size_t i = 0; i < field.grid.nx; ++i) {
            const Point p = field.grid.at(i, j);
            ++report.checked;
            int wn = 0;
            for (std::size_t e = 0; e < row_edges.size(); e += 2) {
                wn += edge_winding(row_edges[e], row_edges[e + 1], p);
            }
            bool in_polygon = wn != 0;
            if (in_polygon == field.at(i, j)) {
                continue;
            }
            // Points on the boundary count as inside.
            const double distance = ring_distance(ring, p, scale_x, scale_y);
            in_polygon = in_polygon || distance <= 1e-9;
            if (in_polygon == field.at(i, j)) {
                continue;
            }
            if (distance <= boundary_tolerance) {
                ++report.near_boundary;
            } else {
                report.interior.push_back(p);
            }
        }
    }
    return report;
}

struct DistributionCheck {
    bool pass = false;
    std::vector<double> observed;
    double max_abs_deviation = 0.0;
    double chi_square = 0.0;
    std::size_t samples = 0;
};

/// Bin frequencies against an expected law, each within `tolerance` absolute.
/// A bin with zero expected mass that receives samples fails the check.
inline DistributionCheck empirical_distribution_check(const std::vector<std::size_t>& counts,
                                                      const std::vector<double>& law, double tolerance) {
    if (counts.size() != law.size() || counts.empty()) {
        throw ParameterError("distribution check needs one expected probability per bin");
    }
    DistributionCheck check;
    for (std::size_t c : counts) {
        check.samples += c;
    }
    if (check.samples == 0) {
        throw ParameterError("distribution check needs at least one sample");
    }
    const double n = static_cast<double>(check.samples);
    bool impossible = false;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double freq = static_cast<double>(counts[k]) / n;
        check.observed.push_back(freq);
        check.max_abs_deviation = std::max(check.max_abs_deviation, std::abs(freq - law[k]));
        const double expected = law[k] * n;
        if (expected > 0.0) {
            const double diff = static_cast<double>(counts[k]) - expected;
            check.chi_square += diff * diff / expected;
        } else if (counts[k] > 0) {
            impossible = true;
        }
    }
    if (impossible) {
        check.chi_square = std::numeric_limits<double>::infinity();
    }
    check.pass = !impossible && check.max_abs_deviation <= tolerance;
    return check;
}

/// Same check from raw bin indices.
inline DistributionCheck empirical_distribution_check(const std::vector<std::size_t>& bin_of_sample,
                                                      std::size_t bins, const std::vector<double>& law,
                                                      double tolerance) {
    std::vector<std::size_t> counts(bins, 0);
    for (std::size_t b : bin_of_sample) {
        if (b >= bins) {
            throw ParameterError("sample bin index out of range");
        }
        ++counts[b];
    }
    return empirical_distribution_check(counts, law, tolerance);
}

}  // namespace bbgen::oracle
