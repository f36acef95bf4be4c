#pragma once
// Parabolic strip geometry: parameters, membership and region layouts.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wjn {

/// Raised when a point or parameter set lies outside the domain of an operation.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Level `lambda` and BMO bound `eps`.
///
/// The weak-inequality functions require `lambda >= 0`; the one-jump
/// functions accept any real level (the reflection identity evaluates them at
/// negative levels).
struct Params {
    double lambda = 0.0;
    double eps = 1.0;
};

struct StripPoint {
    double x1 = 0.0;
    double x2 = 0.0;

    friend bool operator==(const StripPoint&, const StripPoint&) = default;
};

enum class Regime { Small, Medium, Large };

enum class Side { Minus, Center, Plus };

enum class Layout { WeakSmall, WeakMedium, WeakLarge, OneJump };

struct Region {
    int index = 0;  // 1..5
    Side side = Side::Center;
    Layout layout = Layout::WeakLarge;

    friend bool operator==(const Region&, const Region&) = default;
};

inline void validate_eps(const Params& p) {
    if (!(p.eps > 0.0) || !std::isfinite(p.eps))
        throw domain_error("eps must be a positive finite number");
    if (!std::isfinite(p.lambda))
        throw domain_error("lambda must be finite");
}

inline void validate_weak(const Params& p) {
    validate_eps(p);
    if (p.lambda < 0.0)
        throw domain_error("lambda must be nonnegative");
}

inline Regime regime(const Params& p) {
    validate_weak(p);
    if (p.lambda <= p.eps)
        return Regime::Small;
    if (p.lambda <= 2.0 * p.eps)
        return Regime::Medium;
    return Regime::Large;
}

inline Layout weak_layout(Regime r) {
    switch (r) {
    case Regime::Small: return Layout::WeakSmall;
    case Regime::Medium: return Layout::WeakMedium;
    case Regime::Large: return Layout::WeakLarge;
    }
    return Layout::WeakLarge;
}

/// Round-off allowance for points constructed on the two parabolas.
inline double default_strip_tol(const StripPoint& x) {
    return 1e-12 * (1.0 + std::fabs(x.x2));
}

inline bool in_strip(const StripPoint& x, const Params& p, double tol) {
    const double sq = x.x1 * x.x1;
    return x.x2 >= sq - tol && x.x2 <= sq + p.eps * p.eps + tol;
}

inline bool in_strip(const StripPoint& x, const Params& p) {
    return in_strip(x, p, default_strip_tol(x));
}

/// Normalized height (x2 - x1^2) / eps^2, in [0, 1] inside the strip.
inline double strip_height(const StripPoint& x, const Params& p) {
    return (x.x2 - x.x1 * x.x1) / (p.eps * p.eps);
}

inline StripPoint from_height(double x1, double y, const Params& p) {
    return {x1, x1 * x1 + y * p.eps * p.eps};
}

inline void require_in_strip(const StripPoint& x, const Params& p) {
    if (!std::isfinite(x.x1) || !std::isfinite(x.x2))
        throw domain_error("point coordinates must be finite");
    if (!in_strip(x, p))
        throw domain_error("point (" + std::to_string(x.x1) + ", " + std::to_string(x.x2) +
                           ") lies outside the parabolic strip");
}

/// Largest t >= 0 with x + s d in the closed strip for all s in [0, t];
/// infinity if the ray never leaves. Touching the upper parabola ends the ray.
inline double exit_length(const StripPoint& x, double d1, double d2, const Params& p) {
    const double e2 = p.eps * p.eps;
    // q(t) = x2 + t d2 - (x1 + t d1)^2 = q0 + sigma t - c2 t^2
    const double q0 = std::max(0.0, std::min(e2, x.x2 - x.x1 * x.x1));
    const double sigma = d2 - 2.0 * x.x1 * d1;
    const double c2 = d1 * d1;
    double t = std::numeric_limits<double>::infinity();
    if (c2 > 0.0) {
        const double root = std::sqrt(sigma * sigma + 4.0 * c2 * q0);
        t = sigma >= 0.0 ? (sigma + root) / (2.0 * c2) : (2.0 * q0) / (root - sigma);
    } else if (sigma < 0.0) {
        t = q0 / -sigma;
    }
    const double gap = e2 - q0;
    if (sigma > 0.0) {
        if (c2 > 0.0) {
            const double disc = sigma * sigma - 4.0 * c2 * gap;
            if (disc >= 0.0)
                t = std::min(t, 2.0 * gap / (sigma + std::sqrt(disc)));
        } else {
            t = std::min(t, gap / sigma);
        }
    }
    return std::max(0.0, t);
}

// The two tangent lines through the singular point (lambda, lambda^2).
// `left_line` touches the upper parabola at lambda - eps, `right_line` at
// lambda + eps.
inline double left_line(double s, const Params& p) {
    const double l = p.lambda, e = p.eps;
    return 2.0 * (l - e) * s - l * l + 2.0 * e * l;
}

inline double right_line(double s, const Params& p) {
    const double l = p.lambda, e = p.eps;
    return 2.0 * (l + e) * s - l * l - 2.0 * e * l;
}

namespace detail {

inline Side side_of(double x1) { return x1 < 0.0 ? Side::Minus : Side::Plus; }

// Classification without the membership check; used for perturbation probes.
inline Region classify_weak_raw(const StripPoint& x, const Params& p, Regime r) {
    const double s = std::fabs(x.x1);
    const double l = p.lambda, e = p.eps;
    const Side sd = side_of(x.x1);
    switch (r) {
    case Regime::Small:
        if (x.x2 >= l * l)
            return {1, Side::Center, Layout::WeakSmall};
        if (x.x2 >= l * s)
            return {2, Side::Center, Layout::WeakSmall};
        return {3, sd, Layout::WeakSmall};
    case Regime::Medium:
        if (s >= l && (s >= l + e || x.x2 <= right_line(s, p)))
            return {1, sd, Layout::WeakMedium};
        if (s >= l - e && s <= l + e && x.x2 >= left_line(s, p) && x.x2 >= right_line(s, p))
            return {2, sd, Layout::WeakMedium};
        if (x.x2 < l * s)
            return {3, sd, Layout::WeakMedium};
        return {4, Side::Center, Layout::WeakMedium};
    case Regime::Large:
        if (s >= l && (s >= l + e || x.x2 <= right_line(s, p)))
            return {1, sd, Layout::WeakLarge};
        if (s >= l - e && s <= l + e && x.x2 >= left_line(s, p) && x.x2 >= right_line(s, p))
            return {2, sd, Layout::WeakLarge};
        if (x.x2 < left_line(s, p))
            return {3, sd, Layout::WeakLarge};
        if (s <= e && x.x2 >= 2.0 * e * s)
            return {5, Side::Center, Layout::WeakLarge};
        return {4, sd, Layout::WeakLarge};
    }
    return {};
}

inline Region classify_one_jump_raw(const StripPoint& x, const Params& p) {
    const double l = p.lambda, e = p.eps;
    const double t = x.x1;
    if (t >= l + e && x.x2 >= right_line(t, p))
        return {1, Side::Center, Layout::OneJump};
    if (x.x2 <= right_line(t, p))
        return {2, Side::Center, Layout::OneJump};
    if (t >= l - e && t <= l + e && x.x2 >= 2.0 * l * t - l * l + 2.0 * e * std::fabs(t - l))
        return {3, Side::Center, Layout::OneJump};
    if (x.x2 <= left_line(t, p))
        return {4, Side::Center, Layout::OneJump};
    return {5, Side::Center, Layout::OneJump};
}

}  // namespace detail

/// Region of the weak-inequality layout for the regime of `p`.
///
/// Large regime partition: Omega5 is the triangle {|x1| <= eps, x2 >= 2 eps |x1|},
/// Omega2 owns the band lambda - eps <= |x1| <= lambda + eps above both tangent
/// lines through (lambda, lambda^2), and Omega4 is whatever remains above the
/// left tangent line. Boundary points go to the first region in the order
/// 1, 2, 3, 5, 4.
inline Region classify_weak(const StripPoint& x, const Params& p) {
    const Regime r = regime(p);
    require_in_strip(x, p);
    return detail::classify_weak_raw(x, p, r);
}

/// Region of the one-jump layout; `lambda` may be negative.
inline Region classify_one_jump(const StripPoint& x, const Params& p) {
    validate_eps(p);
    require_in_strip(x, p);
    return detail::classify_one_jump_raw(x, p);
}

inline std::string region_name(const Region& r) {
    std::string s = "Omega" + std::to_string(r.index);
    if (r.side == Side::Plus)
        s += "+";
    else if (r.side == Side::Minus)
        s += "-";
    return s;
}

inline std::string regime_name(Regime r) {
    switch (r) {
    case Regime::Small: return "small";
    case Regime::Medium: return "medium";
    case Regime::Large: return "large";
    }
    return "unknown";
}

}  // namespace wjn
