#include <gtest/gtest.h>

#include <cmath>

#include "bbgen/feasible_space.hpp"
#include "bbgen/oracle.hpp"
#include "bbgen/polygon_sampler.hpp"

using namespace bbgen;

namespace {

FeasiblePolygon make_polygon(std::vector<Point> v) {
    FeasiblePolygon p;
    p.vertices = std::move(v);
    p.lo = p.hi = p.vertices[0];
    for (Point q : p.vertices) {
        p.lo = {std::min(p.lo.x, q.x), std::min(p.lo.y, q.y)};
        p.hi = {std::max(p.hi.x, q.x), std::max(p.hi.y, q.y)};
    }
    p.anchor = p.vertices[0];
    return p;
}

FeasiblePolygon unit_square() { return make_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

// Covers 3/4 of [0,2]^2: the top-right quarter is cut out.
FeasiblePolygon l_shape() { return make_polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}); }

}  // namespace

TEST(EnclosingRectangle, Square) { EXPECT_EQ(enclosing_rectangle(unit_square()), Box::unit()); }

TEST(EnclosingRectangle, TracedPolygon) {
    const auto poly = tl_feasible_polygon(Box::unit(), 0.75);
    const Box r = enclosing_rectangle(poly);
    double lx = 1e9, hx = -1e9, ly = 1e9, hy = -1e9;
    for (Point v : poly.vertices) {
        lx = std::min(lx, v.x), hx = std::max(hx, v.x), ly = std::min(ly, v.y), hy = std::max(hy, v.y);
        EXPECT_GE(v.x, r.x1());
        EXPECT_LE(v.x, r.x2());
        EXPECT_GE(v.y, r.y1());
        EXPECT_LE(v.y, r.y2());
    }
    EXPECT_EQ(r, Box(lx, ly, hx, hy));
}

TEST(EnclosingRectangle, DegenerateHasNone) {
    const auto poly = tl_feasible_polygon(Box::unit(), 0.99995);
    ASSERT_TRUE(poly.degenerate);
    EXPECT_THROW(enclosing_rectangle(poly), ParameterError);
}

TEST(PointInPolygon, BasicCases) {
    const auto sq = unit_square();
    EXPECT_TRUE(point_in_polygon(sq, {0.5, 0.5}));
    EXPECT_FALSE(point_in_polygon(sq, {1.5, 0.5}));
    EXPECT_FALSE(point_in_polygon(sq, {-0.1, 2}));
    // boundary counts as inside
    EXPECT_TRUE(point_in_polygon(sq, {1.0, 0.3}));
    EXPECT_TRUE(point_in_polygon(sq, {1.0 + 5e-10, 0.3}));
    EXPECT_FALSE(point_in_polygon(sq, {1.0 + 1e-6, 0.3}));
    EXPECT_FALSE(point_in_polygon(l_shape(), {1.5, 1.5}));
    EXPECT_TRUE(point_in_polygon(l_shape(), {0.5, 1.5}));
}

TEST(PointInPolygon, AgreesWithWindingNumberOffBoundary) {
    SeededRng rng(3);
    const auto poly = tl_feasible_polygon(Box(0, 0, 2, 1), 0.55);
    int checked = 0;
    for (int i = 0; i < 10000; ++i) {
        const Point q{rng.uniform(poly.lo.x - 0.1, poly.hi.x + 0.1), rng.uniform(poly.lo.y - 0.1, poly.hi.y + 0.1)};
        if (oracle::ring_distance(poly.vertices, q) < 1e-7) continue;
        ++checked;
        ASSERT_EQ(point_in_polygon(poly, q), oracle::winding_number(poly.vertices, q) != 0) << q.x << "," << q.y;
    }
    EXPECT_GT(checked, 9900);
}

TEST(SamplePolygon, UniformOnSquare) {
    SeededRng rng(1);
    const auto sq = unit_square();
    const int n = 100000;
    double sx = 0, sy = 0;
    std::size_t proposals = 0;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_polygon(sq, ProposalDistribution::uniform(), rng);
        sx += s.point.x;
        sy += s.point.y;
        proposals += s.proposals;
    }
    EXPECT_EQ(proposals, static_cast<std::size_t>(n));
    EXPECT_NEAR(sx / n, 0.5, 0.01);
    EXPECT_NEAR(sy / n, 0.5, 0.01);
}

TEST(SamplePolygon, AcceptanceMatchesAreaRatio) {
    SeededRng rng(2);
    const auto l = l_shape();
    const int n = 100000;
    std::size_t proposals = 0;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_polygon(l, ProposalDistribution::uniform(), rng);
        ASSERT_FALSE(s.point.x > 1 && s.point.y > 1);
        proposals += s.proposals;
    }
    EXPECT_NEAR(static_cast<double>(n) / static_cast<double>(proposals), 0.75, 0.02);
}

TEST(SamplePolygon, DegenerateReturnsItsPoint) {
    SeededRng rng(3);
    const auto poly = tl_feasible_polygon(Box(2, 3, 4, 5), 0.99995);
    ASSERT_TRUE(poly.degenerate);
    const auto s = sample_polygon(poly, ProposalDistribution::uniform(), rng);
    EXPECT_EQ(s.point, (Point{2, 3}));
    EXPECT_EQ(s.proposals, 0u);
}

TEST(SamplePolygon, BudgetExhaustion) {
    SeededRng rng(4);
    auto far = ProposalDistribution::custom([](const FeasiblePolygon&, SeededRng&) { return Point{100, 100}; });
    try {
        sample_polygon(unit_square(), far, rng, 50);
        FAIL() << "expected SamplingFailure";
    } catch (const SamplingFailure& e) {
        EXPECT_EQ(e.proposals(), 50u);
        EXPECT_EQ(e.acceptance_rate(), 0.0);
    }
}

TEST(SamplePolygon, GaussianConcentratesAtAnchor) {
    SeededRng rng(5);
    const auto poly = tl_feasible_polygon(Box::unit(), 0.5);
    double near_u = 0, near_g = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const Point u = sample_polygon(poly, ProposalDistribution::uniform(), rng).point;
        const Point g = sample_polygon(poly, ProposalDistribution::gaussian_at_corner(0.1), rng).point;
        near_u += std::hypot(u.x, u.y) < 0.1;
        near_g += std::hypot(g.x, g.y) < 0.1;
    }
    EXPECT_GT(near_g, 3 * near_u);
    EXPECT_THROW(ProposalDistribution::gaussian_at_corner(0.0), ParameterError);
    EXPECT_THROW(ProposalDistribution::custom(nullptr), ParameterError);
}
