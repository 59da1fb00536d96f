#include <gtest/gtest.h>

#include "bbgen/feasible_space.hpp"
#include "bbgen/oracle.hpp"
#include "bbgen/rng.hpp"

using namespace bbgen;
using namespace bbgen::oracle;

namespace {

bool marked(const BooleanField& f, Point p) {
    for (std::size_t j = 0; j < f.grid.ny; ++j)
        for (std::size_t i = 0; i < f.grid.nx; ++i) {
            const Point q = f.grid.at(i, j);
            if (std::abs(q.x - p.x) < 1e-9 && std::abs(q.y - p.y) < 1e-9) return f.at(i, j);
        }
    ADD_FAILURE() << "point not on grid";
    return false;
}

}  // namespace

TEST(Grid, CornerIsANode) {
    const Box b(1, 2, 3, 6);
    const auto g = grid_around(b, 0.5, CornerKind::TopLeft);
    EXPECT_NEAR(g.pitch_x, 0.01, 1e-15);
    EXPECT_NEAR(g.pitch_y, 0.02, 1e-15);
    const auto mid = g.at(g.nx / 2, g.ny / 2);
    EXPECT_NEAR(mid.x, 1.0, 1e-12);
    EXPECT_NEAR(mid.y, 2.0, 1e-12);
    EXPECT_THROW(grid_around(b, 0.5, CornerKind::TopLeft, 0.0), ParameterError);
}

TEST(BruteForce, HandPoints) {
    const Box b = Box::unit();
    const auto tl = brute_force_corner_region(b, 0.5, CornerKind::TopLeft, b.bottom_right(),
                                              grid_around(b, 0.5, CornerKind::TopLeft));
    EXPECT_TRUE(marked(tl, {0.25, 0.25}));  // IoU 0.5625
    EXPECT_FALSE(marked(tl, {0.6, 0.6}));   // IoU 0.16
    EXPECT_TRUE(marked(tl, {0, 0}));
}

TEST(BruteForce, ShrinksNearOne) {
    const Box b = Box::unit();
    const auto f = brute_force_corner_region(b, 0.99, CornerKind::TopLeft, b.bottom_right(),
                                             grid_around(b, 0.99, CornerKind::TopLeft));
    for (std::size_t j = 0; j < f.grid.ny; ++j)
        for (std::size_t i = 0; i < f.grid.nx; ++i)
            if (f.at(i, j)) {
                const Point p = f.grid.at(i, j);
                EXPECT_LT(std::hypot(p.x, p.y), 0.02);
            }
    EXPECT_GE(f.count(), 1u);
}

TEST(Compare, TracedTopLeftPolygonPasses) {
    const Box b = Box::unit();
    const auto poly = tl_feasible_polygon(b, 0.5);
    const auto field = brute_force_corner_region(b, 0.5, CornerKind::TopLeft, b.bottom_right(),
                                                 grid_around(b, 0.5, CornerKind::TopLeft));
    const auto report = compare_polygon_to_oracle(poly, field, 2 * poly.trace_step);
    EXPECT_TRUE(report.pass()) << report.interior.size();
    EXPECT_EQ(report.checked, field.grid.size());
}

TEST(Compare, PerturbedVertexIsCaught) {
    const Box b = Box::unit();
    auto poly = tl_feasible_polygon(b, 0.5);
    // Push the vertex nearest the far corner of region IV outward by 0.05.
    std::size_t far = 0;
    for (std::size_t i = 0; i < poly.vertices.size(); ++i)
        if (poly.vertices[i].x + poly.vertices[i].y < poly.vertices[far].x + poly.vertices[far].y) far = i;
    poly.vertices[far].x -= 0.05;
    poly.vertices[far].y -= 0.05;
    const auto field = brute_force_corner_region(b, 0.5, CornerKind::TopLeft, b.bottom_right(),
                                                 grid_around(b, 0.5, CornerKind::TopLeft));
    EXPECT_FALSE(compare_polygon_to_oracle(poly, field, 2 * poly.trace_step).pass());
}

TEST(Compare, DegeneratePolygonNearOne) {
    const Box b = Box::unit();
    const double t = 0.999;
    FeasiblePolygon point;
    point.degenerate = true;
    point.vertices = {b.top_left()};
    point.anchor = point.lo = point.hi = b.top_left();
    // At t = 0.999 the feasible set reaches about 1e-3 from the corner; with a
    // matching pitch only the corner node itself is marked.
    const auto grid = grid_around(b, t, CornerKind::TopLeft, 0.002);
    const auto field = brute_force_corner_region(b, t, CornerKind::TopLeft, b.bottom_right(), grid);
    EXPECT_EQ(field.count(), 1u);
    EXPECT_TRUE(compare_polygon_to_oracle(point, field, 2e-4).pass());
}

TEST(Distribution, BalancedMultinomialPasses) {
    const std::vector<double> law{0.33, 0.17, 0.18, 0.17, 0.15};
    SeededRng rng(1);
    std::vector<std::size_t> bins;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        double c = 0;
        std::size_t k = 0;
        while (k < 4 && u >= (c += law[k])) ++k;
        bins.push_back(k);
    }
    const auto check = empirical_distribution_check(bins, 5, law, 0.01);
    EXPECT_TRUE(check.pass);
    EXPECT_LT(check.max_abs_deviation, 0.006);
    EXPECT_GT(check.chi_square, 0.0);
    EXPECT_EQ(check.samples, 100000u);
}

TEST(Distribution, DegenerateLawExact) {
    const auto check = empirical_distribution_check(std::vector<std::size_t>{0, 0, 500}, {0, 0, 1}, 0.0);
    EXPECT_TRUE(check.pass);
    EXPECT_EQ(check.max_abs_deviation, 0.0);
    EXPECT_EQ(check.chi_square, 0.0);
}

TEST(Distribution, SwappedLawFails) {
    const auto check = empirical_distribution_check(std::vector<std::size_t>{3300, 1700, 1800, 1700, 1500},
                                                    {0.17, 0.33, 0.18, 0.17, 0.15}, 0.01);
    EXPECT_FALSE(check.pass);
    EXPECT_FALSE(empirical_distribution_check(std::vector<std::size_t>{1, 1}, {1.0, 0.0}, 0.6).pass);
    EXPECT_THROW(empirical_distribution_check(std::vector<std::size_t>{1, 1}, {1.0}, 0.1), ParameterError);
}

TEST(WindingNumber, Square) {
    const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    EXPECT_EQ(winding_number(sq, {0.5, 0.5}), 1);
    EXPECT_EQ(winding_number(sq, {1.5, 0.5}), 0);
    std::vector<Point> rev(sq.rbegin(), sq.rend());
    EXPECT_EQ(winding_number(rev, {0.5, 0.5}), -1);
    EXPECT_NEAR(ring_distance(sq, {0.5, 2}), 1.0, 1e-15);
}
