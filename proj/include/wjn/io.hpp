#pragma once
// CSV and JSON serialization of values, test functions, curves and fields.

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wjn/closed_form.hpp"
#include "wjn/oracle.hpp"
#include "wjn/piecewise.hpp"
#include "wjn/strip.hpp"

namespace wjn {

using Json = nlohmann::ordered_json;

/// 12 significant digits, "." as decimal separator regardless of locale.
inline std::string csv_number(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    std::string s(buf);
    for (char& c : s)
        if (c == ',')
            c = '.';
    return s;
}

/// Minimal CSV writer: header row first, LF line endings.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os) {
        for (std::size_t i = 0; i < header.size(); ++i)
            os_ << (i ? "," : "") << header[i];
        os_ << '\n';
    }

    template <typename... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((os_ << (first ? "" : ","), first = false, put(cells)), ...);
        os_ << '\n';
    }

private:
    void put(double v) { os_ << csv_number(v); }
    void put(int v) { os_ << v; }
    void put(long long v) { os_ << v; }
    void put(std::size_t v) { os_ << v; }
    void put(const std::string& s) { os_ << s; }
    void put(const char* s) { os_ << s; }

    std::ostream& os_;
};

inline const char* form_name(SegmentForm f) {
    switch (f) {
    case SegmentForm::Constant: return "constant";
    case SegmentForm::LogLeft: return "log_left";
    case SegmentForm::LogRight: return "log_right";
    }
    return "unknown";
}

inline Json to_json(const Params& p) { return Json{{"lambda", p.lambda}, {"eps", p.eps}}; }

inline Json to_json(const StripPoint& x) { return Json{{"x1", x.x1}, {"x2", x.x2}}; }

inline Json to_json(const Gradient& g) { return Json::array({g.d1, g.d2}); }

inline Json to_json(const Segment& s) {
    Json j{{"t_lo", s.t_lo}, {"t_hi", s.t_hi}, {"form", form_name(s.form)}, {"base", s.base}};
    if (s.form != SegmentForm::Constant) {
        j["scale"] = s.scale;
        j["pivot"] = s.pivot;
    }
    return j;
}

inline Json to_json(const PiecewiseFunction& phi) {
    Json segs = Json::array();
    for (const auto& s : phi.segments)
        segs.push_back(to_json(s));
    Json j{{"params", to_json(phi.params)}, {"origin", to_json(phi.origin)}};
    if (phi.region)
        j["region"] = region_name(*phi.region);
    j["segments"] = std::move(segs);
    return j;
}

/// Samples (t, phi(t)) at the midpoints of n equal cells of [0, 1].
inline void write_samples_csv(std::ostream& os, const PiecewiseFunction& phi, int n) {
    CsvWriter w(os, {"t", "phi"});
    for (int k = 0; k < n; ++k) {
        const double t = (k + 0.5) / n;
        w.row(t, sample(phi, t, BreakSide::Right));
    }
}

inline void write_curve_csv(std::ostream& os, const BellmanPointCurve& c) {
    CsvWriter w(os, {"t", "x1", "x2", "violation"});
    for (const auto& s : c.samples)
        w.row(s.t, s.x.x1, s.x.x2, s.violation);
}

/// Oracle field next to a reference function evaluated at every node.
inline void write_field_csv(std::ostream& os, const GridField& f,
                            const std::function<double(const StripPoint&)>& reference) {
    CsvWriter w(os, {"x1", "y", "x2", "value", "closed_form_value", "abs_diff"});
    const StripGrid& g = f.grid;
    for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) {
            const StripPoint x = g.point(i, j);
            const double v = f.at(i, j);
            const double r = reference(x);
            w.row(g.x1(i), g.y(j), x.x2, v, r, std::fabs(v - r));
        }
    }
}

inline void write_sweep_log_csv(std::ostream& os, const std::vector<SweepLog>& log) {
    CsvWriter w(os, {"sweep", "delta", "seconds"});
    for (const auto& l : log)
        w.row(l.sweep, l.delta, l.seconds);
}

}  // namespace wjn
