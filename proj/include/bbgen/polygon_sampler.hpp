#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>

#include "bbgen/box.hpp"
#include "bbgen/error.hpp"
#include "bbgen/feasible_space.hpp"
#include "bbgen/rng.hpp"

namespace bbgen {

/// Points within this distance of an edge count as inside.
inline constexpr double kBoundaryTolerance = 1e-9;

/// Default number of proposals before sampling gives up.
inline constexpr std::size_t kDefaultAttemptBudget = 10000;

/// Minimal axis-aligned rectangle holding every vertex of a non-degenerate polygon.
inline Box enclosing_rectangle(const FeasiblePolygon& poly) {
    if (poly.degenerate) {
        throw ParameterError("degenerate polygon has no enclosing rectangle; it is the single point (" +
                             std::to_string(poly.anchor.x) + ", " + std::to_string(poly.anchor.y) + ")");
    }
    return Box(poly.lo, poly.hi);
}

/// Even-odd membership with the boundary counted as inside.
inline bool point_in_polygon(const FeasiblePolygon& poly, Point q) noexcept {
    constexpr double tol = kBoundaryTolerance;
    if (poly.degenerate) {
        return std::abs(q.x - poly.anchor.x) <= tol && std::abs(q.y - poly.anchor.y) <= tol;
    }
    if (q.x < poly.lo.x - tol || q.x > poly.hi.x + tol || q.y < poly.lo.y - tol || q.y > poly.hi.y + tol) {
        return false;
    }
    const auto& v = poly.vertices;
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const Point a = v[j];
        const Point b = v[i];
        const bool near_edge = q.y >= std::min(a.y, b.y) - tol && q.y <= std::max(a.y, b.y) + tol &&
                               q.x >= std::min(a.x, b.x) - tol && q.x <= std::max(a.x, b.x) + tol;
        if (near_edge) {
            const double dx = b.x - a.x, dy = b.y - a.y;
            const double len2 = dx * dx + dy * dy;
            double u = len2 > 0.0 ? ((q.x - a.x) * dx + (q.y - a.y) * dy) / len2 : 0.0;
            u = u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u);
            const double ex = q.x - (a.x + u * dx), ey = q.y - (a.y + u * dy);
            if (ex * ex + ey * ey <= tol * tol) {
                return true;
            }
        }
        if ((a.y > q.y) != (b.y > q.y)) {
            const double x_cross = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (q.x < x_cross) {
                inside = !inside;
            }
        }
    }
    return inside;
}

/// Where rejection sampling draws its candidate points from.
///
/// `uniform` draws over the polygon's enclosing rectangle, so accepted points
/// are uniform over the polygon. `gaussian_at_corner` centres an isotropic
/// normal on the polygon's anchor (the reference box corner) and concentrates
/// accepted points there. `custom` takes any sampler; it must give nonzero
/// density to the whole enclosing rectangle or sampling may never succeed.
class ProposalDistribution {
public:
    enum class Kind { Uniform, GaussianAtCorner, Custom };
    using Sampler = std::function<Point(const FeasiblePolygon&, SeededRng&)>;

    static ProposalDistribution uniform() { return ProposalDistribution(Kind::Uniform); }

    /// `sigma_fraction` scales the standard deviation to the enclosing rectangle's extents.
    static ProposalDistribution gaussian_at_corner(double sigma_fraction) {
        if (!(sigma_fraction > 0.0) || !std::isfinite(sigma_fraction)) {
            throw ParameterError("gaussian proposal needs a positive sigma fraction");
        }
        ProposalDistribution p(Kind::GaussianAtCorner);
        p.sigma_fraction_ = sigma_fraction;
        return p;
    }

    static ProposalDistribution custom(Sampler sampler) {
        if (!sampler) {
            throw ParameterError("custom proposal needs a callable sampler");
        }
        ProposalDistribution p(Kind::Custom);
        p.sampler_ = std::move(sampler);
        return p;
    }

    ProposalDistribution() : ProposalDistribution(Kind::Uniform) {}

    Kind kind() const noexcept { return kind_; }
    double sigma_fraction() const noexcept { return sigma_fraction_; }

    Point propose(const FeasiblePolygon& poly, SeededRng& rng) const {
        switch (kind_) {
            case Kind::Uniform: {
                const double x = rng.uniform(poly.lo.x, poly.hi.x);
                const double y = rng.uniform(poly.lo.y, poly.hi.y);
                return {x, y};
            }
            case Kind::GaussianAtCorner: {
                const double x = poly.anchor.x + sigma_fraction_ * (poly.hi.x - poly.lo.x) * rng.normal();
                const double y = poly.anchor.y + sigma_fraction_ * (poly.hi.y - poly.lo.y) * rng.normal();
                return {x, y};
            }
            case Kind::Custom:
                return sampler_(poly, rng);
        }
        return poly.anchor;
    }

private:
    explicit ProposalDistribution(Kind kind) : kind_(kind) {}

    Kind kind_;
    double sigma_fraction_ = 0.0;
    Sampler sampler_;
};

struct PolygonSample {
    Point point;
    std::size_t proposals = 0;
};

/// Rejection sampling: propose until a point lands in the polygon.
inline PolygonSample sample_polygon(const FeasiblePolygon& poly, const ProposalDistribution& proposal, SeededRng& rng,
                                    std::size_t attempt_budget = kDefaultAttemptBudget) {
    if (poly.degenerate) {
        return {poly.anchor, 0};
    }
    for (std::size_t n = 1; n <= attempt_budget; ++n) {
        const Point p = proposal.propose(poly, rng);
        if (point_in_polygon(poly, p)) {
            return {p, n};
        }
    }
    throw SamplingFailure("no proposal accepted after " + std::to_string(attempt_budget) + " attempts (" +
                              std::string(to_string(poly.kind)) + " polygon, T=" + std::to_string(poly.threshold) +
                              ", acceptance rate 0)",
                          attempt_budget, 0);
}

}  // namespace bbgen
