#include <cmath>

#include <gtest/gtest.h>

#include "wjn/closed_form.hpp"
#include "wjn/oracle.hpp"
#include "wjn/verify.hpp"

using namespace wjn;

namespace {

const Params kLarge{3.0, 1.0};
const RelaxOptions kSmallOpt{16, 8, 1};

double closed_b(const Params& p, const StripPoint& x) { return eval_b(x, p).value; }

GridField small_solve(const Params& p, const BoundarySet& E, const SweepObserver& obs = {}) {
    return solve(StripGrid::standard(p, 33, 17), E, 1e-6, 400, kSmallOpt, obs);
}

}  // namespace

TEST(InitField, Examples) {
    const StripGrid g{21, 5, -5.0, 5.0, kLarge};
    const GridField f = init_field(g, BoundarySet::absolute_level(3.0));
    ASSERT_EQ(g.x1(18), 4.0);
    EXPECT_EQ(f.at(18, 0), 1.0);
    ASSERT_EQ(g.x1(10), 0.0);
    ASSERT_EQ(g.y(2), 0.5);
    EXPECT_EQ(f.at(10, 2), 0.0);
    EXPECT_EQ(f.at(10, 0), 0.0);
    EXPECT_EQ(f.at(4, 0), 1.0);  // x1 = -3 belongs to E
}

TEST(StripGrid, RowsLieOnTheParabolas) {
    const StripGrid g = StripGrid::standard(kLarge, 33, 17);
    for (int i = 0; i < g.n1; ++i) {
        const double x = g.x1(i);
        EXPECT_EQ(g.point(i, 0).x2, x * x);
        EXPECT_NEAR(g.point(i, g.n2 - 1).x2, x * x + 1.0, 1e-14);
    }
}

TEST(StripGrid, LevelIsAGridColumn) {
    for (double l : {0.5, 1.5, 3.0, 2.2}) {
        const StripGrid g = StripGrid::standard({l, 1.0}, 161, 81);
        EXPECT_GE(g.x1_max, l + 3.0 - 1e-12);
        const double pos = (l - g.x1_min) / (g.x1_max - g.x1_min) * (g.n1 - 1);
        EXPECT_NEAR(pos, std::round(pos), 1e-9) << "lambda " << l;
    }
}

TEST(ChordFeasible, Examples) {
    const Params p{0.0, 1.0};
    EXPECT_FALSE(chord_feasible({-1.0, 2.0}, {1.0, 2.0}, p));
    EXPECT_FALSE(chord_feasible({-1.0, 1.5}, {1.0, 1.5}, p));
    EXPECT_TRUE(chord_feasible({0.0, 0.0}, {1.0, 1.0}, p));
    EXPECT_TRUE(chord_feasible({0.5, 0.5}, {-0.5, 0.5}, p));
}

TEST(ChordFeasible, TangentChordOfTheUpperParabola) {
    // the tangent at x1 = 0 meets the lower parabola at -eps and eps
    const Params p{0.0, 1.0};
    EXPECT_TRUE(chord_feasible({-1.0, 1.0}, {1.0, 1.0}, p));
    EXPECT_FALSE(chord_feasible({-1.0, 1.0}, {1.0, 1.0 + 1e-6}, p));
    EXPECT_FALSE(chord_feasible({0.0, 1.5}, {0.0, 0.5}, p));
}

TEST(ChordFeasible, AgreesWithDenseSampling) {
    Rng rng(9);
    const Params p{1.0, 1.0};
    for (int k = 0; k < 5000; ++k) {
        const StripPoint a = random_strip_point(rng, p, 3.0), b = random_strip_point(rng, p, 3.0);
        double worst = 0.0;
        for (int s = 0; s <= 400; ++s) {
            const double t = s / 400.0;
            worst = std::max(worst, strip_violation({a.x1 + t * (b.x1 - a.x1), a.x2 + t * (b.x2 - a.x2)}, p));
        }
        if (worst > 1e-6) {
            EXPECT_FALSE(chord_feasible(a, b, p));
        }
        if (chord_feasible(a, b, p)) {
            EXPECT_LE(worst, 1e-9);
        }
    }
}

TEST(Relax, OneSweepLiftsNodesBetweenDataPoints) {
    const StripGrid g = StripGrid::standard(kLarge, 33, 17);
    const GridField f0 = init_field(g, BoundarySet::absolute_level(3.0));
    const auto [f1, delta] = relax(f0, RelaxOptions{16, 8, 1});
    EXPECT_EQ(delta, 1.0);
    // column x1 = 4.5: every low chord ends on data 1
    const int i = 28;
    ASSERT_NEAR(g.x1(i), 4.5, 1e-12);
    EXPECT_EQ(f1.at(i, 1), 1.0);
    EXPECT_EQ(f1.sweeps, 1);
}

TEST(Solve, EverythingGivesOne) {
    const Params p{0.0, 1.0};
    const GridField f = solve(StripGrid::standard(p, 33, 17), BoundarySet::everything(), 1e-10, 2000, kSmallOpt);
    EXPECT_TRUE(f.converged);
    // edge columns have no two-sided chords and keep their initial values
    const StripGrid& g = f.grid;
    for (int i = 0; i < g.n1; ++i) {
        if (std::fabs(g.x1(i)) > g.x1_max - p.eps + 1e-12)
            continue;
        for (int j = 0; j < g.n2; ++j)
            EXPECT_NEAR(f.at(i, j), 1.0, 1e-6) << i << ", " << j;
    }
}

TEST(Solve, NothingGivesZero) {
    const GridField f = small_solve(kLarge, BoundarySet::nothing());
    EXPECT_TRUE(f.converged);
    EXPECT_EQ(f.sweeps, 1);
    for (double v : f.values)
        EXPECT_EQ(v, 0.0);
}

TEST(Solve, ReportsNonConvergence) {
    const GridField f = solve(StripGrid::standard(kLarge, 33, 17), BoundarySet::absolute_level(3.0), 1e-6, 2,
                              kSmallOpt);
    EXPECT_FALSE(f.converged);
    EXPECT_EQ(f.sweeps, 2);
    EXPECT_GT(f.last_delta, 1e-6);
}

TEST(Solve, Errors) {
    const StripGrid g = StripGrid::standard(kLarge, 33, 17);
    const auto E = BoundarySet::absolute_level(3.0);
    EXPECT_THROW(solve(g, E, 0.0, 10), domain_error);
    EXPECT_THROW(solve(g, E, -1.0, 10), domain_error);
    EXPECT_THROW(init_field(StripGrid{2, 17, -6.0, 6.0, kLarge}, E), domain_error);
    EXPECT_THROW(init_field(StripGrid{33, 2, -6.0, 6.0, kLarge}, E), domain_error);
    EXPECT_THROW(init_field(StripGrid{33, 17, -6.0, 4.5, kLarge}, E), domain_error);
}

TEST(Solve, MonotoneBoundedAndBoundaryUntouched) {
    const Params p{1.5, 1.0};
    const auto E = BoundarySet::absolute_level(1.5);
    const StripGrid g = StripGrid::standard(p, 33, 17);
    GridField prev = init_field(g, E);
    const std::vector<double> row0 = [&] {
        std::vector<double> r;
        for (int i = 0; i < g.n1; ++i)
            r.push_back(prev.at(i, 0));
        return r;
    }();
    int seen = 0;
    small_solve(p, E, [&](const GridField& f, const SweepLog& log) {
        ++seen;
        EXPECT_EQ(log.sweep, seen);
        for (int i = 0; i < g.n1; ++i) {
            EXPECT_EQ(f.at(i, 0), row0[i]);
            for (int j = 0; j < g.n2; ++j) {
                EXPECT_GE(f.at(i, j), prev.at(i, j));
                EXPECT_GE(f.at(i, j), 0.0);
                EXPECT_LE(f.at(i, j), 1.0);
            }
        }
        prev = f;
    });
    EXPECT_GT(seen, 5);
}

TEST(Solve, DeterministicAcrossWorkerCounts) {
    const Params p{1.5, 1.0};
    const StripGrid g = StripGrid::standard(p, 33, 17);
    const auto E = BoundarySet::absolute_level(1.5);
    const GridField a = solve(g, E, 1e-6, 400, {16, 8, 1});
    const GridField b = solve(g, E, 1e-6, 400, {16, 8, 3});
    EXPECT_EQ(a.sweeps, b.sweeps);
    EXPECT_EQ(a.values, b.values);
}

TEST(Solve, SmallGridTracksClosedForm) {
    for (double l : {0.5, 1.5, 3.0}) {
        const Params p{l, 1.0};
        auto ref = [&](const StripPoint& x) { return closed_b(p, x); };
        double overshoot = 0.0;
        const GridField f = small_solve(p, BoundarySet::absolute_level(l), [&](const GridField& g, const SweepLog&) {
            overshoot = std::max(overshoot, compare_field(g, ref, p.eps).max_overshoot);
        });
        EXPECT_TRUE(f.converged);
        const auto c = compare_field(f, ref, p.eps);
        EXPECT_LE(c.sup_gap, 2e-2) << "lambda " << l;
        EXPECT_LE(overshoot, 5e-3) << "lambda " << l;
    }
}

TEST(Solve, OneSidedDataTracksBmax) {
    auto ref = [](const StripPoint& x) { return eval_bmax(x, kLarge).value; };
    const GridField f = small_solve(kLarge, BoundarySet::signed_level(3.0));
    const auto c = compare_field(f, ref, 1.0);
    EXPECT_LE(c.sup_gap, 2e-2);
    EXPECT_LE(c.max_overshoot, 5e-3);
}

TEST(Solve, CenterValueNearSharpConstant) {
    const GridField f = small_solve(kLarge, BoundarySet::absolute_level(3.0));
    EXPECT_NEAR(field_center_value(f), weak_jn_bound(kLarge), 2e-2);
}

TEST(Interpolate, NodalClosedFormIsALowerBound) {
    // Filling the nodes with a locally concave function, the interpolant must
    // not exceed it below the top row of cells. In the top cells the triangles
    // may reach past the upper parabola and only the interpolation tolerance
    // applies.
    Rng rng(13);
    for (double l : {0.5, 1.5, 3.0}) {
        const Params p{l, 1.0};
        const StripGrid g = StripGrid::standard(p, 33, 17);
        GridField f = init_field(g, BoundarySet::absolute_level(l));
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n2; ++j)
                f.values[g.index(i, j)] = closed_b(p, g.point(i, j));
        const double top = g.y(g.n2 - 2);
        for (int k = 0; k < 20000; ++k) {
            const double x1 = uniform(rng, g.x1_min, g.x1_max);
            const double y = uniform(rng, 0.0, 1.0);
            const double b = closed_b(p, from_height(x1, y, p));
            EXPECT_LE(f.interpolate(x1, y), b + (y < top ? 1e-12 : 5e-3))
                << "lambda " << l << " at " << x1 << ", " << y;
        }
    }
}

TEST(Interpolate, ReproducesNodesAndBoundaryData) {
    const StripGrid g = StripGrid::standard(kLarge, 33, 17);
    const GridField f = small_solve(kLarge, BoundarySet::absolute_level(3.0));
    for (int i = 0; i < g.n1; i += 3)
        for (int j = 0; j < g.n2 - 1; j += 2)
            EXPECT_NEAR(f.interpolate(g.x1(i), g.y(j)), f.at(i, j), 1e-12);
    EXPECT_EQ(f.interpolate(3.3, 0.0), 1.0);
    EXPECT_EQ(f.interpolate(2.9, 0.0), 0.0);
}

TEST(Property, FixedPointConcavity) {
    const Params p{1.5, 1.0};
    const GridField f =
        solve(StripGrid::standard(p, 81, 41), BoundarySet::absolute_level(1.5), 1e-6, 400, {32, 16, 0});
    const StripGrid& g = f.grid;
    Rng rng(default_seed);
    std::uniform_int_distribution<int> ci(0, g.n1 - 1), cj(0, g.n2 - 1);
    int tested = 0;
    while (tested < 10000) {
        // columns of equal parity put the midpoint on a grid column
        const int i1 = ci(rng), j1 = cj(rng), i2 = ci(rng), j2 = cj(rng);
        if ((i1 - i2) % 2 != 0)
            continue;
        const StripPoint a = g.point(i1, j1), b = g.point(i2, j2);
        const double inner = g.x1_max - p.eps + 1e-12;
        if ((i1 == i2 && j1 == j2) || std::fabs(a.x1) > inner || std::fabs(b.x1) > inner || !chord_feasible(a, b, p))
            continue;
        ++tested;
        const StripPoint m{0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2)};
        const double mid = f.interpolate(m.x1, strip_height(m, p));
        EXPECT_GE(mid, 0.5 * (f.at(i1, j1) + f.at(i2, j2)) - 5e-3)
            << "nodes (" << i1 << "," << j1 << ") (" << i2 << "," << j2 << ")";
    }
}

namespace {

// Smallest fine-minus-coarse difference over common nodes at least eps away
// from the truncation edges, after doubling every resolution knob.
double refinement_decrease(const Params& p, const BoundarySet& E) {
    const GridField a = solve(StripGrid::standard(p, 33, 17), E, 1e-6, 400, {16, 8, 1});
    const GridField b = solve(StripGrid::standard(p, 65, 33), E, 1e-6, 400, {32, 16, 1});
    double worst = 0.0;
    for (int i = 0; i < a.grid.n1; ++i) {
        if (std::fabs(a.grid.x1(i)) > a.grid.x1_max - p.eps + 1e-12)
            continue;
        for (int j = 0; j < a.grid.n2; ++j)
            worst = std::min(worst, b.at(2 * i, 2 * j) - a.at(i, j));
    }
    return worst;
}

}  // namespace

TEST(Property, RefinementDoesNotDecreaseMedium) {
    EXPECT_GE(refinement_decrease({1.5, 1.0}, BoundarySet::absolute_level(1.5)), -1e-9);
}

TEST(Property, RefinementDoesNotDecreaseSmall) {
    EXPECT_GE(refinement_decrease({0.5, 1.0}, BoundarySet::absolute_level(0.5)), -1e-9);
}

TEST(Property, RefinementDoesNotDecreaseLarge) {
    EXPECT_GE(refinement_decrease(kLarge, BoundarySet::absolute_level(3.0)), -1e-9);
}
