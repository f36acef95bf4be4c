#pragma once
// Brute-force Bellman induction: the minimal locally concave function on the
// strip with prescribed 0/1 data on the lower parabola, computed by repeated
// chord relaxation on a grid. It never consults the closed forms and serves
// as their independent check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "wjn/strip.hpp"

namespace wjn {

/// The set E on the real line where the lower-boundary data equals 1.
struct BoundarySet {
    std::function<bool(double)> contains;
    std::string description;

    static BoundarySet absolute_level(double lambda) {
        return {[lambda](double u) { return std::fabs(u) >= lambda; }, "|u| >= " + std::to_string(lambda)};
    }
    static BoundarySet signed_level(double lambda) {
        return {[lambda](double u) { return u >= lambda; }, "u >= " + std::to_string(lambda)};
    }
    static BoundarySet everything() {
        return {[](double) { return true; }, "all reals"};
    }
    static BoundarySet nothing() {
        return {[](double) { return false; }, "empty set"};
    }
};

/// Nodes (x1_i, y_j) with y = (x2 - x1^2) / eps^2, so rows j = 0 and j = n2 - 1
/// lie exactly on the lower and upper parabola.
struct StripGrid {
    int n1 = 161;
    int n2 = 81;
    double x1_min = -6.0;
    double x1_max = 6.0;
    Params params;

    /// Symmetric truncation x1 in [-L, L] with L close to |lambda| + 3 eps,
    /// nudged outward so that |lambda| / L is a multiple of 1/16. When
    /// (n1 - 1) / 2 is a multiple of 16 the points +-lambda are grid columns,
    /// and the alignment survives doubling the resolution.
    static StripGrid standard(const Params& p, int n1 = 161, int n2 = 81) {
        const double l = std::fabs(p.lambda);
        double half = l + 3.0 * p.eps;
        const int k = static_cast<int>(std::floor(16.0 * l / half));
        if (k > 0)
            half = 16.0 * l / k;
        return {n1, n2, -half, half, p};
    }

    double x1(int i) const { return x1_min + (x1_max - x1_min) * i / (n1 - 1); }
    double y(int j) const { return static_cast<double>(j) / (n2 - 1); }
    StripPoint point(int i, int j) const { return from_height(x1(i), y(j), params); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n2 + j; }
    std::size_t size() const { return static_cast<std::size_t>(n1) * n2; }
};

inline void validate(const StripGrid& g) {
    validate_eps(g.params);
    if (g.n1 < 3 || g.n2 < 3)
        throw domain_error("grid needs at least 3 nodes per axis");
    if (!(g.x1_min < g.x1_max))
        throw domain_error("grid x1 range is empty");
    if (g.x1_max < g.params.lambda + 2.0 * g.params.eps)
        throw domain_error("grid must extend to lambda + 2 eps");
}

struct GridField {
    StripGrid grid;
    std::vector<double> values;
    BoundarySet data;
    int sweeps = 0;
    double last_delta = 0.0;
    bool converged = false;

    double at(int i, int j) const { return values[grid.index(i, j)]; }

    /// Piecewise-linear lower interpolation at a strip point given by (x1, y).
    ///
    /// Column i is cut into parallelograms (straight in (x1, x2)) bounded by
    /// the chords of consecutive node rows, and each parallelogram into
    /// triangles along either diagonal. A locally concave function lies above
    /// its linear interpolant on any triangle contained in the strip, so the
    /// larger of the two barycentric values is still a lower bound. Below the
    /// chord of the boundary row the exact data on the lower parabola is
    /// combined vertically with that chord. In the top row of cells, points
    /// above both diagonals can only use triangles with an edge outside the
    /// strip, and there the value is not a guaranteed lower bound.
    double interpolate(double x1, double y) const {
        const double dx = (grid.x1_max - grid.x1_min) / (grid.n1 - 1);
        const double inv_dy = grid.n2 - 1;
        const double e2 = grid.params.eps * grid.params.eps;
        const double fx = (x1 - grid.x1_min) / dx;
        const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, grid.n1 - 2);
        const double u = std::clamp(fx - i, 0.0, 1.0);
        if (y <= 1e-12) {
            // Rays aimed at a boundary node land on it up to round-off.
            const double r = std::round(fx);
            if (std::fabs(fx - r) < 1e-9 && r >= 0 && r < grid.n1)
                return values[grid.index(static_cast<int>(r), 0)];
            if (y <= 0.0)
                return data.contains(x1) ? 1.0 : 0.0;
        }
        const double sag = u * (1.0 - u) * dx * dx / e2;
        const double h = (y - sag) * inv_dy;
        const double* r0 = &values[grid.index(i, 0)];
        const double* r1 = r0 + grid.n2;
        if (h < 0.0) {
            const double chord = (1.0 - u) * r0[0] + u * r1[0];
            const double th = y / sag;
            return (1.0 - th) * (data.contains(x1) ? 1.0 : 0.0) + th * chord;
        }
        const int j = std::min(static_cast<int>(h), grid.n2 - 2);
        const double v = std::clamp(h - j, 0.0, 1.0);
        const double a = r0[j], b = r1[j], c = r1[j + 1], d = r0[j + 1];
        const bool top = j == grid.n2 - 2;
        // Triangles touching the top chord leave the strip and are not used
        // unless nothing else contains the point.
        double best = -1.0;
        if (v <= u)
            best = std::max(best, a + u * (b - a) + v * (c - b));
        else if (!top)
            best = std::max(best, a + u * (c - d) + v * (d - a));
        if (u + v <= 1.0)
            best = std::max(best, a + u * (b - a) + v * (d - a));
        else if (!top)
            best = std::max(best, c + (1.0 - u) * (d - c) + (1.0 - v) * (b - c));
        if (best < 0.0)
            best = std::max(a + u * (c - d) + v * (d - a), c + (1.0 - u) * (d - c) + (1.0 - v) * (b - c));
        return best;
    }
};

/// Zeroth iteration: 1 on lower-boundary nodes in E, 0 everywhere else.
inline GridField init_field(const StripGrid& grid, const BoundarySet& E) {
    validate(grid);
    GridField f;
    f.grid = grid;
    f.values.assign(grid.size(), 0.0);
    f.data = E;
    for (int i = 0; i < grid.n1; ++i)
        f.values[grid.index(i, 0)] = E.contains(grid.x1(i)) ? 1.0 : 0.0;
    return f;
}

/// Whether the closed segment [a, b] lies in the closed strip.
///
/// Along the segment x2 - x1^2 is concave, so the lower constraint holds once
/// it holds at the endpoints; the upper one is checked at the maximizer of the
/// concave quadratic x2(t) - x1(t)^2 - eps^2.
inline bool chord_feasible(const StripPoint& a, const StripPoint& b, const Params& p) {
    if (!in_strip(a, p) || !in_strip(b, p))
        return false;
    const double d1 = b.x1 - a.x1, d2 = b.x2 - a.x2;
    const double q0 = a.x2 - a.x1 * a.x1 - p.eps * p.eps;
    const double lin = d2 - 2.0 * a.x1 * d1, quad = d1 * d1;
    double t = 0.0;
    if (quad > 0.0)
        t = std::clamp(lin / (2.0 * quad), 0.0, 1.0);
    else
        t = lin > 0.0 ? 1.0 : 0.0;
    const double qmax = q0 + lin * t - quad * t * t;
    const double tol = 1e-12 * (1.0 + std::fabs(a.x2) + std::fabs(b.x2));
    return qmax <= tol;
}

struct RelaxOptions {
    int directions = 64;
    int radii = 24;
    unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

// Largest t >= 0 such that p + t d stays in the strip and inside the grid's
// x1 range. The direction is d = (c, 2 a c + sigma) for a node at x1 = a with
// normalized height y, i.e. sigma is the slope relative to the parabola
// tangent at a. Touching the upper parabola ends the ray.
inline double ray_length(double a, double y, double c, double sigma, double eps, const StripGrid& g) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double e2 = eps * eps;
    const double c2 = c * c;
    double t = inf;
    // lower parabola: c^2 t^2 - sigma t - e2 y = 0
    if (c2 > 0.0) {
        const double disc = sigma * sigma + 4.0 * c2 * e2 * y;
        const double root = std::sqrt(std::max(0.0, disc));
        t = sigma >= 0.0 ? (sigma + root) / (2.0 * c2) : (2.0 * e2 * y) / (root - sigma);
    } else if (sigma < 0.0) {
        t = e2 * y / -sigma;
    }
    // upper parabola: c^2 t^2 - sigma t + e2 (1 - y) = 0
    const double gap = e2 * (1.0 - y);
    if (sigma > 0.0) {
        if (c2 > 0.0) {
            double disc = sigma * sigma - 4.0 * c2 * gap;
            if (std::fabs(disc) <= 1e-12 * sigma * sigma)
                disc = 0.0;
            if (disc >= 0.0)
                t = std::min(t, 2.0 * gap / (sigma + std::sqrt(disc)));
        } else {
            t = std::min(t, gap / sigma);
        }
    }
    if (c > 0.0)
        t = std::min(t, (g.x1_max - a) / c);
    else if (c < 0.0)
        t = std::min(t, (g.x1_min - a) / c);
    return std::max(0.0, t);
}

struct Direction {
    double c;
    double sigma;  // x2-component minus the parabola tangent slope times c
};

// Evenly spaced half-circle of directions in the sheared frame.
inline std::vector<Direction> base_directions(int count, double eps) {
    std::vector<Direction> dirs;
    dirs.reserve(count + 2);
    for (int k = 0; k < count; ++k) {
        const double th = std::numbers::pi * k / count;
        dirs.push_back({std::cos(th), eps * std::sin(th)});
    }
    return dirs;
}

// Base directions plus the two tangent lines from a node at height y to the
// upper parabola.
inline std::vector<Direction> node_directions(int count, double y, double eps) {
    auto dirs = base_directions(count, eps);
    const double m = 2.0 * eps * std::sqrt(std::max(0.0, 1.0 - y));
    dirs.push_back({1.0, m});
    dirs.push_back({1.0, -m});
    return dirs;
}

// Boundary columns whose data differs from a neighbour.
inline std::vector<int> jump_columns(const GridField& f) {
    std::vector<int> cols;
    const StripGrid& g = f.grid;
    for (int i = 0; i < g.n1; ++i) {
        const double v = f.at(i, 0);
        if ((i > 0 && f.at(i - 1, 0) != v) || (i + 1 < g.n1 && f.at(i + 1, 0) != v))
            cols.push_back(i);
    }
    return cols;
}

inline double best_candidate(const GridField& f, int i, int j, const RelaxOptions& opt,
                             std::vector<Direction>& dirs, const std::vector<int>& jumps = {}) {
    const StripGrid& g = f.grid;
    const double eps = g.params.eps, e2 = eps * eps;
    const double a = g.x1(i), y = g.y(j);
    const int R = std::max(1, opt.radii);
    double best = 0.0;
    auto endpoint_value = [&](double t, double c, double sigma) {
        const double yy = y + (t * sigma - c * c * t * t) / e2;
        return f.interpolate(a + t * c, yy);
    };
    const double m = 2.0 * eps * std::sqrt(std::max(0.0, 1.0 - y));
    dirs.resize(static_cast<std::size_t>(std::max(0, opt.directions)));
    dirs.push_back({1.0, m});
    dirs.push_back({1.0, -m});
    // Chords through boundary nodes where the data jumps.
    for (int k : jumps) {
        const double c = g.x1(k) - a;
        if (c != 0.0)
            dirs.push_back({c, c * c - e2 * y});
    }
    for (const auto& d : dirs) {
        const double tp = ray_length(a, y, d.c, d.sigma, eps, g);
        const double tm = ray_length(a, y, -d.c, -d.sigma, eps, g);
        if (!(tp > 0.0 && tm > 0.0))
            continue;
        const double vp_full = endpoint_value(tp, d.c, d.sigma);
        const double vm_full = endpoint_value(tm, -d.c, -d.sigma);
        for (int k = 1; k <= R; ++k) {
            const double fr = static_cast<double>(k) / R;
            const double sp = fr * tp, sm = fr * tm;
            const double vp = k == R ? vp_full : endpoint_value(sp, d.c, d.sigma);
            const double vm = k == R ? vm_full : endpoint_value(sm, -d.c, -d.sigma);
            // Chord weights are the opposite lengths over the chord length.
            best = std::max(best, (sm * vp + sp * vm) / (sp + sm));
            if (k < R) {
                best = std::max(best, (tm * vp + sp * vm_full) / (sp + tm));
                best = std::max(best, (sm * vp_full + tp * vm) / (tp + sm));
            }
        }
    }
    return best;
}

}  // namespace detail

/// One Jacobi sweep: every node off the lower parabola takes the maximum of its
/// current value and the best chord average found along the candidate chords.
inline std::pair<GridField, double> relax(const GridField& field, const RelaxOptions& opt) {
    const StripGrid& g = field.grid;
    GridField next = field;
    unsigned workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(g.n1));
    std::vector<double> deltas(workers, 0.0);

    auto work = [&](unsigned w) {
        double dmax = 0.0;
        auto dirs = detail::base_directions(std::max(0, opt.directions), g.params.eps);
        const auto jumps = detail::jump_columns(field);
        for (int i = static_cast<int>(w); i < g.n1; i += static_cast<int>(workers)) {
            for (int j = 1; j < g.n2; ++j) {
                const double cur = field.at(i, j);
                const double cand = std::min(1.0, detail::best_candidate(field, i, j, opt, dirs, jumps));
                if (cand > cur) {
                    next.values[g.index(i, j)] = cand;
                    dmax = std::max(dmax, cand - cur);
                }
            }
        }
        deltas[w] = dmax;
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
        for (auto& t : pool)
            t.join();
    }
    const double delta = *std::max_element(deltas.begin(), deltas.end());
    next.sweeps = field.sweeps + 1;
    next.last_delta = delta;
    return {std::move(next), delta};
}

inline std::pair<GridField, double> relax(const GridField& field, int directions, int radii) {
    return relax(field, RelaxOptions{directions, radii, 0});
}

struct SweepLog {
    int sweep = 0;
    double delta = 0.0;
    double seconds = 0.0;
};

using SweepObserver = std::function<void(const GridField&, const SweepLog&)>;

/// Relaxes until the sup-norm change drops below `tol` or `max_sweeps` is
/// reached; `converged` reports which one happened.
inline GridField solve(const StripGrid& grid, const BoundarySet& E, double tol, int max_sweeps,
                       const RelaxOptions& opt = {}, const SweepObserver& observer = {}) {
    if (!(tol > 0.0))
        throw domain_error("tolerance must be positive");
    GridField f = init_field(grid, E);
    const auto start = std::chrono::steady_clock::now();
    for (int s = 0; s < max_sweeps; ++s) {
        auto [next, delta] = relax(f, opt);
        f = std::move(next);
        if (observer) {
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            observer(f, {f.sweeps, delta, secs});
        }
        if (delta < tol) {
            f.converged = true;
            break;
        }
    }
    return f;
}

}  // namespace wjn
