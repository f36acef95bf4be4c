// End-to-end acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "wjn/wjn.hpp"

using namespace wjn;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

void require_checks(Outcome& o, const std::vector<CheckResult>& cs) {
    for (const auto& c : cs) {
        o.require((c.skipped || c.samples > 0) && c.passed(),
                  c.name + " " + std::to_string(c.failures) + "/" + std::to_string(c.samples) + " worst " +
                      fmt("%.3g", c.worst));
    }
}

void report(int n, const char* title, const Outcome& o, double secs, const std::string& summary) {
    std::printf("criterion %d [%s] %s (%.1fs) %s%s%s\n", n, title, o.pass ? "PASS" : "FAIL", secs, summary.c_str(),
                o.detail.empty() ? "" : " | failed: ", o.detail.c_str());
    std::fflush(stdout);
}

Outcome sharp_constant(std::string& summary) {
    Outcome o;
    const double e = std::numbers::e;
    const double expect[] = {1.0, 4.0 / 9.0, e * e / 4.0 * std::exp(-3.0)};
    const double levels[] = {0.5, 1.5, 3.0};
    for (int k = 0; k < 3; ++k) {
        const double v = eval_b({0.0, 1.0}, {levels[k], 1.0}).value;
        o.require(std::fabs(v - expect[k]) <= 1e-12, "center value at lambda " + fmt("%g", levels[k]));
    }
    for (double l : {1.0, 2.0}) {
        const double jump = std::fabs(weak_jn_bound({l, 1.0}) - weak_jn_bound({std::nextafter(l, 9.0), 1.0}));
        o.require(jump <= 1e-12, "bound continuity at lambda " + fmt("%g", l));
    }
    double prev = weak_jn_bound({0.0, 1.0});
    int rises = 0;
    for (int k = 1; k <= 1000; ++k) {
        const double v = weak_jn_bound({8.0 * k / 1000, 1.0});
        rises += v > prev;
        prev = v;
    }
    o.require(rises == 0, std::to_string(rises) + " increases in the lambda sweep");
    summary = "B(0,eps^2) at lambda=3: " + fmt("%.16g", eval_b({0.0, 1.0}, {3.0, 1.0}).value);
    return o;
}

struct OracleRun {
    GridField field;
    FieldComparison cmp;
    double worst_overshoot = 0.0;  // over every sweep
    double seconds = 0.0;
};

OracleRun run_oracle(const Params& p, const BoundarySet& E, const std::function<double(const StripPoint&)>& ref,
                     int n1, int n2) {
    OracleRun r;
    const auto t0 = Clock::now();
    r.field = solve(StripGrid::standard(p, n1, n2), E, 1e-6, 400, RelaxOptions{64, 24, 0},
                    [&](const GridField& f, const SweepLog&) {
                        r.worst_overshoot = std::max(r.worst_overshoot, compare_field(f, ref, p.eps).max_overshoot);
                    });
    r.seconds = seconds_since(t0);
    r.cmp = compare_field(r.field, ref, p.eps);
    return r;
}

}  // namespace

int main() {
    std::printf("seed %llu\n", static_cast<unsigned long long>(default_seed));
    bool all = true;
    const Params large{3.0, 1.0};

    // 1
    {
        const auto t0 = Clock::now();
        std::string s;
        const Outcome o = sharp_constant(s);
        report(1, "sharp constant", o, seconds_since(t0), s);
        all = all && o.pass;
    }

    // 2 and the lambda = 3 part of 6 share one solve.
    auto ref_b = [](const Params& p) { return [p](const StripPoint& x) { return eval_b(x, p).value; }; };
    const OracleRun main_run = run_oracle(large, BoundarySet::absolute_level(3.0), ref_b(large), 161, 81);
    {
        const auto t0 = Clock::now();
        Outcome o;
        const OracleRun coarse = run_oracle(large, BoundarySet::absolute_level(3.0), ref_b(large), 81, 41);
        const double center = field_center_value(main_run.field);
        const double gap = std::fabs(center - field_center_value(coarse.field));
        const double sharp = std::numbers::e * std::numbers::e / 4.0 * std::exp(-3.0);
        const double intro = 4.0 / (std::numbers::e * std::numbers::e) * std::exp(-3.0);
        o.require(main_run.field.converged, "161x81 solve did not converge");
        o.require(std::fabs(center - sharp) <= 2e-2, "center " + fmt("%.6f", center) + " not within 2e-2 of sharp");
        o.require(std::fabs(center - intro) > 5.0 * gap, "center within 5 refinement gaps of (4/e^2)e^-3");
        o.require(main_run.seconds <= 300.0, "161x81 solve took " + fmt("%.1f", main_run.seconds) + "s");
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "oracle center %.6f, sharp %.6f, (4/e^2)e^-3 %.6f, refinement gap %.2e (%.1f gaps away), "
                      "solve %.1fs",
                      center, sharp, intro, gap, gap > 0 ? std::fabs(center - intro) / gap : INFINITY,
                      main_run.seconds);
        report(2, "constant discrepancy", o, main_run.seconds + seconds_since(t0), buf);
        all = all && o.pass;
    }

    // 3
    {
        const auto t0 = Clock::now();
        Rng rng(default_seed);
        const ExtremizerChecks c = check_extremizers(large, 200, rng, 512, 200);
        Outcome o;
        require_checks(o, c.all());
        const double secs = seconds_since(t0);
        o.require(secs <= 120.0, "took " + fmt("%.1f", secs) + "s");
        report(3, "extremizer roundtrip", o, secs,
               std::to_string(c.moments.samples) + " points, worst moment error " + fmt("%.2e", c.moments.worst) +
                   ", worst measure error " + fmt("%.2e", c.measure.worst));
        all = all && o.pass;
    }

    // 4
    {
        const auto t0 = Clock::now();
        Rng rng(default_seed + 4);
        Outcome o;
        double worst_mid = 0.0;
        for (double l : {0.5, 1.5, 3.0}) {
            const Params p{l, 1.0};
            const CheckResult mid = check_midpoint_concavity(p, 100000, rng);
            worst_mid = std::max(worst_mid, mid.worst);
            require_checks(o, {mid});
            require_checks(o, check_hessian(p, 10000, rng));
            require_checks(o, {check_gradient(p, 10000, rng)});
        }
        const double secs = seconds_since(t0);
        o.require(secs <= 120.0, "took " + fmt("%.1f", secs) + "s");
        report(4, "concavity", o, secs, "worst midpoint violation " + fmt("%.2e", worst_mid));
        all = all && o.pass;
    }

    // 5
    {
        const auto t0 = Clock::now();
        Outcome o;
        std::size_t pieces = 0;
        for (double l : {0.5, 1.5, 3.0}) {
            const auto g = check_gluing({l, 1.0}, 1000);
            const auto j = check_one_jump_gluing({l, 1.0}, 1000);
            pieces += g.size() + j.size();
            require_checks(o, g);
            require_checks(o, j);
        }
        report(5, "gluing", o, seconds_since(t0), std::to_string(pieces) + " boundary checks");
        all = all && o.pass;
    }

    // 6
    {
        const auto t0 = Clock::now();
        Outcome o;
        std::string s;
        auto record = [&](const std::string& name, const OracleRun& r) {
            o.require(r.field.converged, name + " did not converge");
            o.require(r.cmp.sup_gap <= 2e-2, name + " gap " + fmt("%.4f", r.cmp.sup_gap));
            o.require(r.worst_overshoot <= 5e-3, name + " overshoot " + fmt("%.4f", r.worst_overshoot));
            s += name + ": gap " + fmt("%.2e", r.cmp.sup_gap) + " overshoot " + fmt("%.1e", r.worst_overshoot) +
                 " sweeps " + std::to_string(r.field.sweeps) + "; ";
        };
        for (double l : {0.5, 1.5}) {
            const Params p{l, 1.0};
            record("B lambda=" + fmt("%g", l), run_oracle(p, BoundarySet::absolute_level(l), ref_b(p), 161, 81));
        }
        record("B lambda=3", main_run);
        record("Bmax lambda=3", run_oracle(large, BoundarySet::signed_level(3.0),
                                           [](const StripPoint& x) { return eval_bmax(x, {3.0, 1.0}).value; }, 161,
                                           81));
        report(6, "oracle equivalence", o, seconds_since(t0) + main_run.seconds, s);
        all = all && o.pass;
    }

    // 7
    {
        const auto t0 = Clock::now();
        Rng rng(default_seed + 7);
        Outcome o;
        double worst = 0.0;
        for (double l : {0.5, 1.5, 3.0}) {
            const CheckResult c = check_reflection({l, 1.0}, 10000, rng);
            worst = std::max(worst, c.worst);
            require_checks(o, {c});
        }
        report(7, "reflection", o, seconds_since(t0), "worst " + fmt("%.2e", worst));
        all = all && o.pass;
    }

    std::printf("acceptance %s\n", all ? "PASS" : "FAIL");
    return all ? 0 : 1;
}
