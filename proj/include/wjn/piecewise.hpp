#pragma once
// Piecewise constant/logarithmic test functions on [0, 1] and the exact
// quantities computed from them: interval moments, superlevel measures, the
// BMO_2 oscillation and delivery curves.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wjn/strip.hpp"

namespace wjn {

enum class SegmentForm {
    Constant,  // base
    LogLeft,   // base + scale * log(pivot / t)
    LogRight,  // base + scale * log(pivot / (1 - t))
};

struct Segment {
    double t_lo = 0.0;
    double t_hi = 1.0;
    SegmentForm form = SegmentForm::Constant;
    double base = 0.0;
    double scale = 0.0;
    double pivot = 1.0;

    static Segment constant(double lo, double hi, double v) {
        return {lo, hi, SegmentForm::Constant, v, 0.0, 1.0};
    }
    static Segment log_left(double lo, double hi, double base, double scale, double pivot) {
        return {lo, hi, SegmentForm::LogLeft, base, scale, pivot};
    }
    static Segment log_right(double lo, double hi, double base, double scale, double pivot) {
        return {lo, hi, SegmentForm::LogRight, base, scale, pivot};
    }

    double length() const { return t_hi - t_lo; }

    double log_term(double t) const {
        switch (form) {
        case SegmentForm::Constant: return 0.0;
        case SegmentForm::LogLeft: return std::log(pivot / t);
        case SegmentForm::LogRight: return std::log(pivot / (1.0 - t));
        }
        return 0.0;
    }

    double value(double t) const { return base + scale * log_term(t); }

    Segment negated() const {
        Segment s = *this;
        s.base = -base;
        s.scale = -scale;
        return s;
    }
};

/// A test function on [0, 1]: contiguous segments, half-open on the right.
struct PiecewiseFunction {
    std::vector<Segment> segments;
    Params params;
    StripPoint origin;
    std::optional<Region> region;

    std::vector<double> breakpoints() const {
        std::vector<double> b;
        b.reserve(segments.size() + 1);
        for (const auto& s : segments)
            b.push_back(s.t_lo);
        if (!segments.empty())
            b.push_back(segments.back().t_hi);
        return b;
    }
};

struct Interval {
    double alpha = 0.0;
    double beta = 1.0;

    double length() const { return beta - alpha; }
};

inline void validate(const Interval& I) {
    if (!(I.alpha >= 0.0 && I.beta <= 1.0 && I.alpha < I.beta))
        throw domain_error("interval must satisfy 0 <= alpha < beta <= 1");
}

/// Checks contiguity of the segment list and positivity of every log argument.
inline void validate(const PiecewiseFunction& phi, double tol = 1e-12) {
    if (phi.segments.empty())
        throw domain_error("piecewise function has no segments");
    if (std::fabs(phi.segments.front().t_lo) > tol || std::fabs(phi.segments.back().t_hi - 1.0) > tol)
        throw domain_error("segments must cover [0, 1]");
    for (std::size_t i = 0; i < phi.segments.size(); ++i) {
        const auto& s = phi.segments[i];
        if (!(s.t_lo < s.t_hi))
            throw domain_error("segment has non-positive length");
        if (i > 0 && std::fabs(phi.segments[i - 1].t_hi - s.t_lo) > tol)
            throw domain_error("segments are not contiguous");
        if (s.form != SegmentForm::Constant && !(s.pivot > 0.0))
            throw domain_error("logarithmic segment needs a positive pivot");
    }
}

enum class BreakSide { Left, Right };

/// Pointwise value. Throws at breakpoints, where one-sided values may differ.
inline double sample(const PiecewiseFunction& phi, double t) {
    if (!(t > 0.0 && t < 1.0))
        throw domain_error("sample point must lie in (0, 1)");
    for (const auto& s : phi.segments) {
        if (t == s.t_lo || t == s.t_hi)
            throw domain_error("sample point is a breakpoint; choose a side explicitly");
        if (t > s.t_lo && t < s.t_hi)
            return s.value(t);
    }
    throw domain_error("sample point not covered by any segment");
}

/// One-sided value at any t in [0, 1].
inline double sample(const PiecewiseFunction& phi, double t, BreakSide side) {
    if (!(t >= 0.0 && t <= 1.0))
        throw domain_error("sample point must lie in [0, 1]");
    if (side == BreakSide::Right) {
        for (const auto& s : phi.segments)
            if (t >= s.t_lo && t < s.t_hi)
                return s.value(t);
    } else {
        for (const auto& s : phi.segments)
            if (t > s.t_lo && t <= s.t_hi)
                return s.value(t);
    }
    throw domain_error("no segment on the requested side of the sample point");
}

namespace detail {

// Antiderivatives of log(P/t) and log^2(P/t), both vanishing at t = 0.
inline double int_log(double t, double pivot) {
    if (t <= 0.0)
        return 0.0;
    const double l = std::log(pivot / t);
    return t * l + t;
}

inline double int_log2(double t, double pivot) {
    if (t <= 0.0)
        return 0.0;
    const double l = std::log(pivot / t);
    return t * l * l + 2.0 * t * l + 2.0 * t;
}

struct RawIntegrals {
    double i1 = 0.0;  // integral of (v - shift)
    double i2 = 0.0;  // integral of (v - shift)^2
};

// Integrals of (v - shift) and (v - shift)^2 over [a, b] inside one segment.
inline RawIntegrals segment_integrals(const Segment& s, double a, double b, double shift) {
    const double len = b - a;
    const double c = s.base - shift;
    if (s.form == SegmentForm::Constant || s.scale == 0.0)
        return {c * len, c * c * len};
    double l1 = 0.0, l2 = 0.0;
    if (s.form == SegmentForm::LogLeft) {
        l1 = int_log(b, s.pivot) - int_log(a, s.pivot);
        l2 = int_log2(b, s.pivot) - int_log2(a, s.pivot);
    } else {
        l1 = int_log(1.0 - a, s.pivot) - int_log(1.0 - b, s.pivot);
        l2 = int_log2(1.0 - a, s.pivot) - int_log2(1.0 - b, s.pivot);
    }
    return {c * len + s.scale * l1, c * c * len + 2.0 * c * s.scale * l1 + s.scale * s.scale * l2};
}

inline RawIntegrals integrals(const PiecewiseFunction& phi, double a, double b, double shift) {
    RawIntegrals acc;
    for (const auto& s : phi.segments) {
        const double lo = std::max(a, s.t_lo), hi = std::min(b, s.t_hi);
        if (hi <= lo)
            continue;
        const auto r = segment_integrals(s, lo, hi, shift);
        acc.i1 += r.i1;
        acc.i2 += r.i2;
    }
    return acc;
}

// Measure of {t in segment : v(t) >= theta}; log segments are strictly monotone.
inline double measure_ge(const Segment& s, double theta) {
    if (s.form == SegmentForm::Constant || s.scale == 0.0)
        return s.base >= theta ? s.length() : 0.0;
    const double lstar = (theta - s.base) / s.scale;
    double tstar = 0.0;
    bool upper_part = false;  // true if the superlevel set is [t*, t_hi]
    if (s.form == SegmentForm::LogLeft) {
        tstar = s.pivot * std::exp(-lstar);
        upper_part = s.scale < 0.0;
    } else {
        tstar = 1.0 - s.pivot * std::exp(-lstar);
        upper_part = s.scale > 0.0;
    }
    const double c = std::clamp(tstar, s.t_lo, s.t_hi);
    return upper_part ? s.t_hi - c : c - s.t_lo;
}

}  // namespace detail

/// Averages <phi>_I and <phi^2>_I, integrated exactly.
inline std::pair<double, double> moments(const PiecewiseFunction& phi, const Interval& I) {
    validate(I);
    const auto r = detail::integrals(phi, I.alpha, I.beta, 0.0);
    return {r.i1 / I.length(), r.i2 / I.length()};
}

inline StripPoint bellman_point(const PiecewiseFunction& phi, const Interval& I) {
    const auto [m1, m2] = moments(phi, I);
    return {m1, m2};
}

/// sqrt(<phi^2>_I - <phi>_I^2), computed about a shift to limit cancellation.
inline double oscillation(const PiecewiseFunction& phi, const Interval& I, double shift = 0.0) {
    validate(I);
    const auto r = detail::integrals(phi, I.alpha, I.beta, shift);
    const double m1 = r.i1 / I.length(), m2 = r.i2 / I.length();
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

enum class LevelMode {
    Absolute,  // |{t : |phi(t)| >= level}|
    Signed,    // |{t : phi(t) >= level}|
};

inline double superlevel_measure(const PiecewiseFunction& phi, double level, LevelMode mode) {
    double m = 0.0;
    for (const auto& s : phi.segments) {
        if (mode == LevelMode::Signed) {
            m += detail::measure_ge(s, level);
        } else if (level <= 0.0) {
            m += s.length();
        } else {
            m += detail::measure_ge(s, level) + detail::measure_ge(s.negated(), level);
        }
    }
    return m;
}

struct NormSearch {
    double norm = 0.0;
    Interval best;
};

/// Lower estimate of the BMO_2 norm sup_I sqrt(<phi^2>_I - <phi>_I^2).
///
/// Dyadic endpoint grids of levels 1..floor(log2(resolution)), each augmented
/// with the breakpoints of phi, are searched exhaustively; the best pair of
/// every level is then refined by alternating ternary searches. Every level's
/// candidates are contained in the next level's, so the estimate is
/// nondecreasing in `resolution`.
inline NormSearch bmo_norm_search(const PiecewiseFunction& phi, int resolution) {
    if (resolution < 2)
        throw domain_error("resolution must be at least 2");
    validate(phi);
    const int levels = static_cast<int>(std::floor(std::log2(static_cast<double>(resolution))));
    const auto [shift, ignored] = moments(phi, {0.0, 1.0});
    (void)ignored;

    const auto bps = phi.breakpoints();
    NormSearch out;
    out.best = {0.0, 1.0};
    out.norm = oscillation(phi, out.best, shift);

    auto osc = [&](double a, double b) {
        if (!(b > a))
            return 0.0;
        return oscillation(phi, {a, b}, shift);
    };

    for (int level = 1; level <= levels; ++level) {
        const int n = 1 << level;
        std::vector<double> grid;
        grid.reserve(n + 1 + bps.size());
        for (int i = 0; i <= n; ++i)
            grid.push_back(static_cast<double>(i) / n);
        grid.insert(grid.end(), bps.begin(), bps.end());
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

        // Cumulative centered integrals at the grid points.
        std::vector<double> f1(grid.size(), 0.0), f2(grid.size(), 0.0);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const auto r = detail::integrals(phi, grid[i - 1], grid[i], shift);
            f1[i] = f1[i - 1] + r.i1;
            f2[i] = f2[i - 1] + r.i2;
        }
        double best = -1.0;
        std::size_t bi = 0, bj = 1;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            for (std::size_t j = i + 1; j < grid.size(); ++j) {
                const double len = grid[j] - grid[i];
                const double m1 = (f1[j] - f1[i]) / len;
                const double v = (f2[j] - f2[i]) / len - m1 * m1;
                if (v > best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        // Grid values can carry cancellation error; re-evaluate directly.
        double a = grid[bi], b = grid[bj];
        double val = osc(a, b);
        const double h = 1.0 / n;
        for (int round = 0; round < 4; ++round) {
            auto ternary = [&](double lo, double hi, auto&& f) {
                for (int it = 0; it < 100 && hi - lo > 1e-9; ++it) {
                    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                    if (f(m1) < f(m2))
                        lo = m1;
                    else
                        hi = m2;
                }
                return 0.5 * (lo + hi);
            };
            const double na = ternary(std::max(0.0, a - h), std::min(b, a + h), [&](double t) { return osc(t, b); });
            if (osc(na, b) > val) {
                a = na;
                val = osc(a, b);
            }
            const double nb = ternary(std::max(a, b - h), std::min(1.0, b + h), [&](double t) { return osc(a, t); });
            if (osc(a, nb) > val) {
                b = nb;
                val = osc(a, b);
            }
        }
        if (val > out.norm) {
            out.norm = val;
            out.best = {a, b};
        }
    }
    return out;
}

inline double bmo_norm(const PiecewiseFunction& phi, int resolution = 512) {
    return bmo_norm_search(phi, resolution).norm;
}

/// Distance of a point outside the closed strip; zero inside.
inline double strip_violation(const StripPoint& x, const Params& p) {
    const double q = x.x2 - x.x1 * x.x1;
    return std::max({0.0, -q, q - p.eps * p.eps});
}

struct CurveSample {
    double t = 0.0;
    StripPoint x;
    double violation = 0.0;
};

struct BellmanPointCurve {
    std::vector<CurveSample> samples;
    double max_violation = 0.0;
};

/// Bellman points of [0, t] for t = k/n, k = 1..n.
inline BellmanPointCurve delivery_curve(const PiecewiseFunction& phi, int n) {
    if (n < 2)
        throw domain_error("delivery curve needs at least two samples");
    BellmanPointCurve c;
    c.samples.reserve(n);
    for (int k = 1; k <= n; ++k) {
        const double t = static_cast<double>(k) / n;
        const StripPoint x = bellman_point(phi, {0.0, t});
        const double v = strip_violation(x, phi.params);
        c.samples.push_back({t, x, v});
        c.max_violation = std::max(c.max_violation, v);
    }
    return c;
}

}  // namespace wjn
