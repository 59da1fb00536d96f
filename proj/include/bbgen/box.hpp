#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "bbgen/error.hpp"

namespace bbgen {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box [x1, y1, x2, y2] with x2 > x1 and y2 > y1.
///
/// Coordinates are continuous; the area of a box is (x2 - x1) * (y2 - y1)
/// with no "+1" pixel convention.
class Box {
public:
    Box(double x1, double y1, double x2, double y2) : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {
        if (!(std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2))) {
            throw DataError("box has non-finite coordinates");
        }
        if (!(x2 > x1) || !(y2 > y1)) {
            throw DataError("degenerate box [" + std::to_string(x1) + "," + std::to_string(y1) + "," +
                            std::to_string(x2) + "," + std::to_string(y2) + "]");
        }
    }

    Box(Point top_left, Point bottom_right) : Box(top_left.x, top_left.y, bottom_right.x, bottom_right.y) {}

    static Box unit() { return Box(0.0, 0.0, 1.0, 1.0); }

    double x1() const noexcept { return x1_; }
    double y1() const noexcept { return y1_; }
    double x2() const noexcept { return x2_; }
    double y2() const noexcept { return y2_; }

    double width() const noexcept { return x2_ - x1_; }
    double height() const noexcept { return y2_ - y1_; }

    Point top_left() const noexcept { return {x1_, y1_}; }
    Point bottom_right() const noexcept { return {x2_, y2_}; }
    Point center() const noexcept { return {0.5 * (x1_ + x2_), 0.5 * (y1_ + y2_)}; }

    std::array<double, 4> coords() const noexcept { return {x1_, y1_, x2_, y2_}; }

    friend bool operator==(const Box&, const Box&) = default;

private:
    double x1_;
    double y1_;
    double x2_;
    double y2_;
};

inline double area(const Box& b) noexcept { return b.width() * b.height(); }

/// Overlap area, clamped at zero for disjoint or touching boxes.
inline double intersection(const Box& b, const Box& c) noexcept {
    const double w = std::min(b.x2(), c.x2()) - std::max(b.x1(), c.x1());
    const double h = std::min(b.y2(), c.y2()) - std::max(b.y1(), c.y1());
    if (w <= 0.0 || h <= 0.0) {
        return 0.0;
    }
    return w * h;
}

inline double iou(const Box& b, const Box& c) noexcept {
    const double inter = intersection(b, c);
    if (inter == 0.0) {
        return 0.0;
    }
    return inter / (area(b) + area(c) - inter);
}

/// Per-axis scale followed by shift: p -> (scale * p + shift).
struct AffineMap {
    double scale_x = 1.0;
    double scale_y = 1.0;
    double shift_x = 0.0;
    double shift_y = 0.0;

    static AffineMap identity() { return {}; }

    bool valid() const noexcept {
        return scale_x > 0.0 && scale_y > 0.0 && std::isfinite(scale_x) && std::isfinite(scale_y) &&
               std::isfinite(shift_x) && std::isfinite(shift_y);
    }

    Point operator()(Point p) const noexcept { return {scale_x * p.x + shift_x, scale_y * p.y + shift_y}; }

    Point inverse(Point p) const noexcept { return {(p.x - shift_x) / scale_x, (p.y - shift_y) / scale_y}; }

    friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

/// Map sending `b` exactly onto `reference`.
inline AffineMap normalize_to(const Box& b, const Box& reference) noexcept {
    AffineMap m;
    m.scale_x = reference.width() / b.width();
    m.scale_y = reference.height() / b.height();
    m.shift_x = reference.x1() - m.scale_x * b.x1();
    m.shift_y = reference.y1() - m.scale_y * b.y1();
    return m;
}

inline Box apply(const AffineMap& m, const Box& b) {
    if (!m.valid()) {
        throw ParameterError("affine map must have strictly positive finite scales");
    }
    return Box(m(b.top_left()), m(b.bottom_right()));
}

inline Box invert(const AffineMap& m, const Box& b) {
    if (!m.valid()) {
        throw ParameterError("affine map must have strictly positive finite scales");
    }
    return Box(m.inverse(b.top_left()), m.inverse(b.bottom_right()));
}

/// Point reflection through the center of `center_of`. An involution that
/// keeps both extents, so pairwise IoU is preserved.
inline Box reflect_about_center(const Box& b, const Box& center_of) {
    const double sx = center_of.x1() + center_of.x2();
    const double sy = center_of.y1() + center_of.y2();
    return Box(sx - b.x2(), sy - b.y2(), sx - b.x1(), sy - b.y1());
}

inline Point reflect_about_center(Point p, const Box& center_of) noexcept {
    return {center_of.x1() + center_of.x2() - p.x, center_of.y1() + center_of.y2() - p.y};
}

}  // namespace bbgen
