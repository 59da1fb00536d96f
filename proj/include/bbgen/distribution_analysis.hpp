#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bbgen/bb_generator.hpp"
#include "bbgen/box.hpp"
#include "bbgen/error.hpp"
#include "bbgen/feasible_space.hpp"
#include "bbgen/polygon_sampler.hpp"
#include "bbgen/proi_generator.hpp"
#include "bbgen/rng.hpp"

namespace bbgen {

/// Where histogram samples come from: a named target-IoU preset, or a fixed
/// threshold for every box ("base:T").
struct IoUSource {
    std::string label;
    std::optional<IoUDistributionSpec> spec;
    double base = 0.0;

    static IoUSource parse(std::string_view text) {
        IoUSource source;
        source.label = std::string(text);
        if (text.starts_with("base:")) {
            const std::string value(text.substr(5));
            std::size_t used = 0;
            double t = 0.0;
            try {
                t = std::stod(value, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != value.size() || value.empty()) {
                throw ParameterError("malformed IoU source '" + std::string(text) + "', expected base:<threshold>");
            }
            if (!(t > 0.0 && t <= kMaxThreshold)) {
                throw ParameterError("base threshold must lie in (0, " + std::to_string(kMaxThreshold) + "]");
            }
            source.base = t;
            return source;
        }
        source.spec = preset_spec(text);
        return source;
    }

    double min_target() const { return spec ? spec->psi.front() : base; }
};

struct IoUHistogram {
    std::string label;
    std::vector<double> edges;
    std::vector<std::size_t> counts;
    std::size_t samples = 0;

    double density(std::size_t bin) const {
        const double width = edges[bin + 1] - edges[bin];
        return samples == 0 ? 0.0 : static_cast<double>(counts[bin]) / (static_cast<double>(samples) * width);
    }

    double fraction(std::size_t bin) const {
        return samples == 0 ? 0.0 : static_cast<double>(counts[bin]) / static_cast<double>(samples);
    }

    /// Fraction of samples at or above `value` (which must be an edge).
    double mass_above(double value) const {
        std::size_t total = 0;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            if (edges[k] >= value - 1e-12) {
                total += counts[k];
            }
        }
        return samples == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(samples);
    }

    void add(double value) {
        auto it = std::upper_bound(edges.begin(), edges.end(), value);
        std::size_t bin = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
        bin = std::min(bin, counts.size() - 1);
        ++counts[bin];
        ++samples;
    }
};

/// The five target bins plus a [0.95, 1] tail, so every achieved IoU of a
/// positive source lands in some bin. Sources below 0.5 get a leading [0, 0.5) bin.
inline std::vector<double> default_histogram_edges(double min_value = 0.5) {
    std::vector<double> edges{0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 1.0};
    if (min_value < 0.5) {
        edges.insert(edges.begin(), 0.0);
    }
    return edges;
}

/// Generates `n` boxes against the unit reference (IoU is scale-free) and
/// bins their achieved IoU. Each sample draws from its own split stream.
inline IoUHistogram iou_histogram(const IoUSource& source, std::size_t n, SeededRng& rng,
                                  const GenerationOptions& options = {}) {
    if (n == 0) {
        throw ParameterError("histogram needs at least one sample");
    }
    if (source.spec) {
        source.spec->validate();
    }
    IoUHistogram hist;
    hist.label = source.label;
    hist.edges = default_histogram_edges(source.min_target());
    hist.counts.assign(hist.edges.size() - 1, 0);
    const Box reference = Box::unit();
    for (std::size_t i = 0; i < n; ++i) {
        SeededRng stream = rng.split();
        const double target = source.spec ? draw_target_iou(*source.spec, stream) : source.base;
        hist.add(generate_bb(reference, target, stream, options).record.achieved_iou);
    }
    return hist;
}

struct ContourLevel {
    double level = 0.0;
    FeasiblePolygon polygon;
};

/// Feasible-corner boundaries of one reference box at several IoU levels,
/// sorted by ascending level (outermost first).
struct ContourFamily {
    Box reference = Box::unit();
    CornerKind space = CornerKind::TopLeft;
    std::vector<ContourLevel> contours;
};

/// Traces each level on the unit frame and maps it onto `reference`. The
/// bottom-right family fixes the top-left corner at TL(reference).
inline ContourFamily boundary_contours(const Box& reference, std::vector<double> levels,
                                       CornerKind space = CornerKind::TopLeft, const TraceOptions& trace = {}) {
    if (levels.empty()) {
        throw ParameterError("contour family needs at least one IoU level");
    }
    std::sort(levels.begin(), levels.end());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0 && levels[i] < 1.0)) {
            throw ParameterError("IoU level " + std::to_string(levels[i]) + " is outside (0, 1)");
        }
        if (i > 0 && levels[i] == levels[i - 1]) {
            throw ParameterError("duplicate IoU level " + std::to_string(levels[i]));
        }
    }
    const Box unit = Box::unit();
    const AffineMap to_reference = normalize_to(unit, reference);
    ContourFamily family;
    family.reference = reference;
    family.space = space;
    for (double level : levels) {
        FeasiblePolygon poly = space == CornerKind::TopLeft ? tl_feasible_polygon(unit, level, trace)
                                                            : br_feasible_polygon(unit, level, unit.top_left(), trace);
        family.contours.push_back({level, transform(poly, to_reference)});
    }
    return family;
}

/// Distance from `p` to the nearest polygon edge (to the point, if degenerate).
inline double boundary_distance(const FeasiblePolygon& poly, Point p) noexcept {
    const auto& v = poly.vertices;
    if (v.size() == 1) {
        return std::hypot(p.x - v[0].x, p.y - v[0].y);
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const double dx = v[i].x - v[j].x, dy = v[i].y - v[j].y;
        const double len2 = dx * dx + dy * dy;
        double u = len2 > 0.0 ? ((p.x - v[j].x) * dx + (p.y - v[j].y) * dy) / len2 : 0.0;
        u = std::clamp(u, 0.0, 1.0);
        best = std::min(best, std::hypot(p.x - (v[j].x + u * dx), p.y - (v[j].y + u * dy)));
    }
    return best;
}

/// True when every higher-level contour lies strictly inside the one below it.
inline bool strictly_nested(const ContourFamily& family) {
    for (std::size_t k = 1; k < family.contours.size(); ++k) {
        const FeasiblePolygon& outer = family.contours[k - 1].polygon;
        const FeasiblePolygon& inner = family.contours[k].polygon;
        if (outer.degenerate) {
            return false;
        }
        for (const Point& p : inner.vertices) {
            if (!point_in_polygon(outer, p) || boundary_distance(outer, p) <= kBoundaryTolerance) {
                return false;
            }
        }
    }
    return true;
}

struct LevelOccupancy {
    double level = 0.0;
    double inside_fraction = 0.0;
};

/// Where top-left points sit relative to TL(reference): the same quadrants as
/// the top-left space regions.
struct QuadrantFractions {
    double inside = 0.0;       // x > x1 and y > y1 (region II)
    double outside = 0.0;      // x < x1 and y < y1 (region IV)
    double right_above = 0.0;  // remaining points with x >= x1 (region I)
    double left_below = 0.0;   // remaining points with x < x1 (region III)
};

struct SpatialReport {
    Box reference = Box::unit();
    std::size_t points = 0;
    std::vector<LevelOccupancy> levels;
    QuadrantFractions quadrants;
};

inline SpatialReport spatial_stats(const std::vector<Point>& points, const Box& reference,
                                   const std::vector<double>& levels, const TraceOptions& trace = {}) {
    for (const Point& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw DataError("spatial statistics need finite points");
        }
    }
    SpatialReport report;
    report.reference = reference;
    report.points = points.size();
    const double n = static_cast<double>(std::max<std::size_t>(points.size(), 1));

    if (!levels.empty()) {
        const ContourFamily family = boundary_contours(reference, levels, CornerKind::TopLeft, trace);
        for (const auto& contour : family.contours) {
            std::size_t inside = 0;
            for (const Point& p : points) {
                inside += point_in_polygon(contour.polygon, p) ? 1 : 0;
            }
            report.levels.push_back({contour.level, static_cast<double>(inside) / n});
        }
    }

    const double x1 = reference.x1(), y1 = reference.y1();
    std::size_t q_inside = 0, q_outside = 0, q_right = 0, q_left = 0;
    for (const Point& p : points) {
        if (p.x > x1 && p.y > y1) {
            ++q_inside;
        } else if (p.x < x1 && p.y < y1) {
            ++q_outside;
        } else if (p.x >= x1) {
            ++q_right;
        } else {
            ++q_left;
        }
    }
    report.quadrants = {static_cast<double>(q_inside) / n, static_cast<double>(q_outside) / n,
                        static_cast<double>(q_right) / n, static_cast<double>(q_left) / n};
    return report;
}

}  // namespace bbgen
