#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bbgen/box.hpp"
#include "bbgen/error.hpp"

namespace bbgen {

enum class CornerKind { TopLeft, BottomRight };

/// The four quadrants around the corner of the reference box.
///
/// Top-left space, around TL(b):
///   I   x >= x1, y <= y1      II  x >= x1, y >= y1 (corner inside b)
///   III x <= x1, y >= y1      IV  x <= x1, y <= y1 (candidate encloses b's corner)
/// Bottom-right space, around BR(b):
///   I   x >= x2, y <= y2      II  x >= x2, y >= y2
///   III x <= x2, y >= y2      IV  x <= x2, y <= y2
enum class Region { I, II, III, IV };

inline const char* to_string(CornerKind k) noexcept { return k == CornerKind::TopLeft ? "top-left" : "bottom-right"; }

inline const char* to_string(Region r) noexcept {
    switch (r) {
        case Region::I: return "I";
        case Region::II: return "II";
        case Region::III: return "III";
        case Region::IV: return "IV";
    }
    return "?";
}

struct TraceOptions {
    /// Sweep increment, as a fraction of the reference box extent along the swept axis.
    double step = 1e-4;
    /// Maximum deviation (same relative units) tolerated when dropping near-collinear vertices.
    /// Zero keeps every traced point.
    double simplify_tolerance = 1e-6;
};

struct Polyline {
    std::vector<Point> points;
    /// Sweep positions skipped because the region equation's denominator vanished.
    std::size_t gaps = 0;
};

/// Traced boundary of the corner positions whose completed box reaches IoU >= threshold.
struct FeasiblePolygon {
    std::vector<Point> vertices;
    CornerKind kind = CornerKind::TopLeft;
    double threshold = 0.0;
    double trace_step = 0.0;
    /// TL(b) or BR(b), depending on kind.
    Point anchor;
    /// Axis-aligned bounds of the vertices.
    Point lo;
    Point hi;
    /// A degenerate polygon collapses to the single vertex `anchor`.
    bool degenerate = false;
    std::size_t boundary_gaps = 0;
};

/// Fixed-corner parameters of the bottom-right space.
struct BRContext {
    Point top_left;
    double alpha = 0.0;  // max(tl.x, x1)
    double beta = 0.0;   // max(tl.y, y1)

    BRContext(const Box& b, Point tl) : top_left(tl), alpha(std::max(tl.x, b.x1())), beta(std::max(tl.y, b.y1())) {}
};

namespace detail {

inline void check_threshold(double t) {
    if (!(t > 0.0 && t < 1.0)) {
        throw ParameterError("IoU threshold must lie in (0, 1), got " + std::to_string(t));
    }
}

/// Evaluates `eval` at evenly spaced positions from `from` to `to` (both
/// included) with spacing at most `step`. `eval` returns a point with NaN
/// coordinates to mark a skipped position.
template <typename Eval>
Polyline sweep(double from, double to, double step, Eval&& eval) {
    Polyline out;
    const double span = std::abs(to - from);
    const auto intervals = static_cast<std::size_t>(std::max(1.0, std::ceil(span / step - 1e-9)));
    const double delta = (to - from) / static_cast<double>(intervals);
    out.points.reserve(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double s = i == intervals ? to : from + delta * static_cast<double>(i);
        const Point p = eval(s);
        if (std::isnan(p.x)) {
            ++out.gaps;
        } else {
            out.points.push_back(p);
        }
    }
    return out;
}

inline constexpr Point kGap{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};

inline bool usable(double denominator, double scale) noexcept {
    return std::isfinite(denominator) && std::abs(denominator) > 1e-14 * scale;
}

/// Line through two points, measured in a frame scaled by (1/sx, 1/sy).
class Chord {
public:
    Chord(Point a, Point b, double sx, double sy) noexcept : a_(a) {
        const double dx = (b.x - a.x) / sx, dy = (b.y - a.y) / sy;
        kx_ = dy / sx;
        ky_ = dx / sy;
        len_ = std::sqrt(dx * dx + dy * dy);
    }

    /// Perpendicular distance scaled by the chord length (avoids a division per point).
    double scaled_distance(Point p) const noexcept { return std::abs((p.x - a_.x) * kx_ - (p.y - a_.y) * ky_); }

    /// True when `p` lies farther than `tolerance` from the line.
    bool exceeds(Point p, double tolerance) const noexcept { return scaled_distance(p) > tolerance * len_; }

private:
    Point a_;
    double kx_ = 0.0;
    double ky_ = 0.0;
    double len_ = 0.0;
};

inline double line_distance(Point p, Point a, Point b, double sx, double sy) noexcept {
    const Chord chord(a, b, sx, sy);
    const double dx = (b.x - a.x) / sx, dy = (b.y - a.y) / sy;
    const double len = std::sqrt(dx * dx + dy * dy);
    return len > 0.0 ? chord.scaled_distance(p) / len : std::hypot((p.x - a.x) / sx, (p.y - a.y) / sy);
}

/// Douglas-Peucker simplification; endpoints are always kept.
inline std::vector<Point> douglas_peucker(std::vector<Point> pts, double tolerance, double sx, double sy) {
    if (tolerance <= 0.0 || pts.size() <= 2) {
        return pts;
    }
    std::vector<char> keep(pts.size(), 0);
    keep.front() = keep.back() = 1;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, pts.size() - 1}};
    while (!stack.empty()) {
        const auto [first, last] = stack.back();
        stack.pop_back();
        if (last - first < 2) {
            continue;
        }
        double worst = tolerance;
        std::size_t worst_index = 0;
        for (std::size_t i = first + 1; i < last; ++i) {
            const double d = line_distance(pts[i], pts[first], pts[last], sx, sy);
            if (d > worst) {
                worst = d;
                worst_index = i;
            }
        }
        if (worst_index != 0) {
            keep[worst_index] = 1;
            stack.emplace_back(first, worst_index);
            stack.emplace_back(worst_index, last);
        }
    }
    std::size_t n = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (keep[i]) {
            pts[n++] = pts[i];
        }
    }
    pts.resize(n);
    return pts;
}

/// Drops near-collinear vertices so that every removed point lies within
/// `tolerance` of the chord replacing it.
///
/// Region boundaries are arcs of constant convexity, so the deviation of the
/// interior points from a chord is unimodal and its peak only moves forward as
/// the chord grows; a greedy two-pointer pass finds maximal chords in linear
/// time. The result is re-checked and Douglas-Peucker takes over if the
/// input was not such an arc.
inline std::vector<Point> simplify(std::vector<Point> pts, double tolerance, double sx, double sy) {
    if (tolerance <= 0.0 || pts.size() <= 2) {
        return pts;
    }
    std::vector<std::size_t> kept{0};
    std::size_t anchor = 0;
    std::size_t peak = 1;
    for (std::size_t end = 2; end < pts.size(); ++end) {
        if (peak <= anchor) {
            peak = anchor + 1;
        }
        const Chord chord(pts[anchor], pts[end], sx, sy);
        double peak_dev = chord.scaled_distance(pts[peak]);
        while (peak + 1 < end) {
            const double next = chord.scaled_distance(pts[peak + 1]);
            if (next < peak_dev) {
                break;
            }
            ++peak;
            peak_dev = next;
        }
        if (chord.exceeds(pts[peak], tolerance)) {
            anchor = end - 1;
            kept.push_back(anchor);
            peak = anchor + 1;
        }
    }
    kept.push_back(pts.size() - 1);

    for (std::size_t k = 0; k + 1 < kept.size(); ++k) {
        const Chord chord(pts[kept[k]], pts[kept[k + 1]], sx, sy);
        for (std::size_t i = kept[k] + 1; i < kept[k + 1]; ++i) {
            if (chord.exceeds(pts[i], tolerance)) {
                return douglas_peucker(std::move(pts), tolerance, sx, sy);
            }
        }
    }
    std::vector<Point> out;
    out.reserve(kept.size());
    for (std::size_t i : kept) {
        out.push_back(pts[i]);
    }
    return out;
}

inline void append_curve(std::vector<Point>& ring, const std::vector<Point>& curve, bool reversed) {
    auto push = [&ring](Point p) {
        if (!ring.empty() && std::abs(ring.back().x - p.x) < 1e-12 && std::abs(ring.back().y - p.y) < 1e-12) {
            return;
        }
        ring.push_back(p);
    };
    if (reversed) {
        for (auto it = curve.rbegin(); it != curve.rend(); ++it) push(*it);
    } else {
        for (const Point& p : curve) push(p);
    }
}

inline void finalize(FeasiblePolygon& poly) {
    auto& v = poly.vertices;
    if (v.size() > 1 && std::abs(v.front().x - v.back().x) < 1e-12 && std::abs(v.front().y - v.back().y) < 1e-12) {
        v.pop_back();
    }
    poly.lo = poly.hi = v.empty() ? poly.anchor : v.front();
    for (const Point& p : v) {
        poly.lo.x = std::min(poly.lo.x, p.x);
        poly.lo.y = std::min(poly.lo.y, p.y);
        poly.hi.x = std::max(poly.hi.x, p.x);
        poly.hi.y = std::max(poly.hi.y, p.y);
    }
}

inline void collapse(FeasiblePolygon& poly) {
    poly.degenerate = true;
    poly.vertices = {poly.anchor};
    poly.lo = poly.hi = poly.anchor;
}

/// Degenerate when the traced extent is below two sweep steps on the normalized frame.
inline bool too_small(const FeasiblePolygon& poly, const Box& b) noexcept {
    const double extent = std::max((poly.hi.x - poly.lo.x) / b.width(), (poly.hi.y - poly.lo.y) / b.height());
    return poly.vertices.size() < 3 || extent < 2.0 * poly.trace_step;
}

inline Polyline trace_tl(Region region, const Box& b, double t, double step) {
    const double x1 = b.x1(), y1 = b.y1(), x2 = b.x2(), y2 = b.y2();
    const double w = b.width(), h = b.height(), a = area(b);
    switch (region) {
        case Region::I:
            // Sweep x from x1 to x2 - w*T; overlap (x2 - x)*h does not depend on y.
            return sweep(x1, x2 - w * t, step * w, [&](double x) -> Point {
                const double den = x2 - x;
                if (!usable(den, w)) return kGap;
                const double inter = den * h;
                return Point{x, y2 - (inter / t + inter - a) / den};
            });
        case Region::II:
            // Nested candidate: IoU = A(candidate) / A(b).
            return sweep(y1, y2 - h * t, step * h, [&](double y) -> Point {
                const double den = y2 - y;
                if (!usable(den, h)) return kGap;
                return Point{x2 - t * a / den, y};
            });
        case Region::III:
            return sweep(y1, y2 - h * t, step * h, [&](double y) -> Point {
                const double den = y2 - y;
                if (!usable(den, h)) return kGap;
                const double inter = w * den;
                return Point{x2 - (inter / t - a + inter) / den, y};
            });
        case Region::IV:
            // Candidate encloses TL(b): overlap is all of b.
            return sweep((y2 * (t - 1.0) + y1) / t, y1, step * h, [&](double y) -> Point {
                const double den = t * (y2 - y);
                if (!usable(den, h)) return kGap;
                return Point{x2 - a / den, y};
            });
    }
    return {};
}

inline Polyline trace_br(Region region, const Box& b, double t, const BRContext& ctx, double step) {
    const double x2 = b.x2(), y2 = b.y2();
    const double w = b.width(), h = b.height(), a = area(b);
    const double tx = ctx.top_left.x, ty = ctx.top_left.y;
    const double alpha = ctx.alpha, beta = ctx.beta;
    // Overlap when the candidate extends past BR(b) on both axes.
    const double full = (x2 - alpha) * (y2 - beta);
    const double target_area = full / t - a + full;
    switch (region) {
        case Region::I: {
            const double den0 = (t + 1.0) * (x2 - alpha) - t * (x2 - tx);
            if (!usable(den0, w)) return Polyline{{}, 1};
            const double y_min = (t * a + t * (x2 - alpha) * beta + beta * (x2 - alpha) - t * ty * (x2 - tx)) / den0;
            return sweep(y_min, y2, step * h, [&](double y) -> Point {
                const double den = y - ty;
                if (!usable(den, h)) return kGap;
                const double inter = (x2 - alpha) * (y - beta);
                return Point{tx + (inter / t - a + inter) / den, y};
            });
        }
        case Region::II: {
            const double x_max = tx + target_area / (y2 - ty);
            return sweep(x2, x_max, step * w, [&](double x) -> Point {
                const double den = x - tx;
                if (!usable(den, w)) return kGap;
                return Point{x, ty + target_area / den};
            });
        }
        case Region::III: {
            const double y_max = ty + target_area / (x2 - tx);
            return sweep(y2, y_max, step * h, [&](double y) -> Point {
                const double den = (t + 1.0) * (y2 - beta) - t * (y - ty);
                if (!usable(den, h)) return kGap;
                return Point{(t * a + alpha * (t + 1.0) * (y2 - beta) - t * tx * (y - ty)) / den, y};
            });
        }
        case Region::IV: {
            const double den0 = (t + 1.0) * (y2 - beta) - t * (y2 - ty);
            if (!usable(den0, h)) return Polyline{{}, 1};
            const double x_min = (t * a + t * (y2 - beta) * alpha + alpha * (y2 - beta) - t * tx * (y2 - ty)) / den0;
            return sweep(x_min, x2, step * w, [&](double x) -> Point {
                const double den = (t + 1.0) * (x - alpha) - t * (x - tx);
                if (!usable(den, w)) return kGap;
                return Point{x, (t * a + beta * (t + 1.0) * (x - alpha) - t * ty * (x - tx)) / den};
            });
        }
    }
    return {};
}

}  // namespace detail

/// Traces the IoU == t curve of one region, sweeping the bounded coordinate
/// from its min bound to its max bound. The bottom-right space needs the
/// fixed top-left corner in `context`.
inline Polyline trace_region_boundary(Region region, CornerKind space, const Box& b, double t,
                                      const TraceOptions& options = {},
                                      const std::optional<BRContext>& context = std::nullopt) {
    detail::check_threshold(t);
    if (!(options.step > 0.0)) {
        throw ParameterError("trace step must be positive");
    }
    if (space == CornerKind::TopLeft) {
        return detail::trace_tl(region, b, t, options.step);
    }
    if (!context) {
        throw ParameterError("bottom-right tracing needs the fixed top-left corner");
    }
    return detail::trace_br(region, b, t, *context, options.step);
}

/// Feasible top-left corners for boxes sharing BR(b) with IoU >= t.
inline FeasiblePolygon tl_feasible_polygon(const Box& b, double t, const TraceOptions& options = {}) {
    detail::check_threshold(t);
    FeasiblePolygon poly;
    poly.kind = CornerKind::TopLeft;
    poly.threshold = t;
    poly.trace_step = options.step;
    poly.anchor = b.top_left();

    // Ring order: I forward, II forward, III reversed, IV reversed.
    constexpr std::pair<Region, bool> ring[] = {
        {Region::I, false}, {Region::II, false}, {Region::III, true}, {Region::IV, true}};
    for (const auto& [region, reversed] : ring) {
        Polyline curve = trace_region_boundary(region, CornerKind::TopLeft, b, t, options);
        poly.boundary_gaps += curve.gaps;
        detail::append_curve(poly.vertices, detail::simplify(std::move(curve.points), options.simplify_tolerance, b.width(), b.height()),
                             reversed);
    }
    detail::finalize(poly);
    if (detail::too_small(poly, b)) {
        detail::collapse(poly);
    }
    return poly;
}

/// Feasible bottom-right corners given a fixed top-left corner `tl`.
///
/// `tl` must lie in the top-left feasible space; a corner on its boundary
/// (within `tolerance` in IoU) yields the degenerate polygon {BR(b)}.
inline FeasiblePolygon br_feasible_polygon(const Box& b, double t, Point tl, const TraceOptions& options = {},
                                           double tolerance = 1e-4) {
    detail::check_threshold(t);
    FeasiblePolygon poly;
    poly.kind = CornerKind::BottomRight;
    poly.threshold = t;
    poly.trace_step = options.step;
    poly.anchor = b.bottom_right();

    const bool valid_corner = std::isfinite(tl.x) && std::isfinite(tl.y) && tl.x < b.x2() && tl.y < b.y2();
    const double base_iou = valid_corner ? iou(Box(tl, b.bottom_right()), b) : 0.0;
    if (base_iou < t - tolerance) {
        throw ParameterError("top-left corner (" + std::to_string(tl.x) + ", " + std::to_string(tl.y) +
                             ") is outside the top-left feasible space");
    }
    if (base_iou <= t) {
        detail::collapse(poly);
        return poly;
    }

    const BRContext ctx(b, tl);
    // Ring order: I forward, II reversed, III reversed, IV forward.
    constexpr std::pair<Region, bool> ring[] = {
        {Region::I, false}, {Region::II, true}, {Region::III, true}, {Region::IV, false}};
    for (const auto& [region, reversed] : ring) {
        Polyline curve = trace_region_boundary(region, CornerKind::BottomRight, b, t, options, ctx);
        poly.boundary_gaps += curve.gaps;
        detail::append_curve(poly.vertices, detail::simplify(std::move(curve.points), options.simplify_tolerance, b.width(), b.height()),
                             reversed);
    }
    detail::finalize(poly);
    if (detail::too_small(poly, b)) {
        detail::collapse(poly);
    }
    return poly;
}

/// Shoelace area of the vertex ring (zero for a degenerate polygon).
inline double polygon_area(const FeasiblePolygon& poly) noexcept {
    const auto& v = poly.vertices;
    if (poly.degenerate || v.size() < 3) {
        return 0.0;
    }
    double twice = 0.0;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        twice += v[j].x * v[i].y - v[i].x * v[j].y;
    }
    return std::abs(0.5 * twice);
}

/// Maps every vertex through `m` (used to move polygons between frames).
inline FeasiblePolygon transform(const FeasiblePolygon& poly, const AffineMap& m) {
    FeasiblePolygon out = poly;
    out.anchor = m(poly.anchor);
    for (Point& p : out.vertices) {
        p = m(p);
    }
    out.lo = m(poly.lo);
    out.hi = m(poly.hi);
    return out;
}

}  // namespace bbgen
