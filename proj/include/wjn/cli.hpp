#pragma once
// Command-line front end: argument parsing and command dispatch.
//
//   eval        value, region and gradient of B at a point
//   grid        B over a strip grid
//   extremizer  optimal test function at a point, with its own verification
//   verify      invariant suite
//   oracle      grid relaxation compared against B
//   jn-bound    sharp constant of the weak inequality

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wjn/closed_form.hpp"
#include "wjn/extremizer.hpp"
#include "wjn/io.hpp"
#include "wjn/oracle.hpp"
#include "wjn/piecewise.hpp"
#include "wjn/strip.hpp"
#include "wjn/verify.hpp"

namespace wjn::cli {

enum ExitCode : int { Success = 0, Failure = 1, Usage = 2 };

struct CommandSpec {
    std::string subcommand;
    Params params;
    std::optional<StripPoint> point;
    int n1 = 161;
    int n2 = 81;
    int directions = 64;
    int radii = 24;
    double tol = 1e-6;
    int max_sweeps = 400;
    int points = 1000;
    std::uint64_t seed = default_seed;
    std::string out;
    std::string format;  // empty: the command's default
};

/// Malformed command line. `code` is 0 for an explicit help request.
struct UsageError : std::runtime_error {
    int code;
    UsageError(const std::string& msg, int c) : std::runtime_error(msg), code(c) {}
};

namespace detail {

struct Parser {
    CLI::App app{"Sharp Bellman functions for the weak John-Nirenberg inequality", "wjn"};
    CommandSpec spec;
    double x1 = 0.0, x2 = 0.0;
    std::vector<CLI::App*> subs;

    Parser() {
        app.require_subcommand(1, 1);
        app.set_help_all_flag("--help-all", "Help for every subcommand");
        auto* eval = add("eval", "Evaluate B, its region and gradient at a point", true);
        format(eval);
        auto* grid = add("grid", "Tabulate B over an n1 x n2 strip grid", false);
        grid_size(grid);
        output(grid);
        auto* ext = add("extremizer", "Build the optimal test function at a point (lambda > 2 eps)", true);
        ext->add_option("--points", spec.points, "Samples in the CSV table")->check(CLI::PositiveNumber);
        output(ext);
        auto* ver = add("verify", "Run the invariant suite", false);
        ver->add_option("--points", spec.points, "Samples per check")->check(CLI::PositiveNumber);
        ver->add_option("--seed", spec.seed, "Random seed");
        output(ver);
        auto* orc = add("oracle", "Relax the grid oracle and compare it with B", false);
        grid_size(orc);
        orc->add_option("--directions", spec.directions, "Chord directions per node")->check(CLI::PositiveNumber);
        orc->add_option("--radii", spec.radii, "Candidate radii per direction")->check(CLI::PositiveNumber);
        orc->add_option("--tol", spec.tol, "Stop when a sweep changes no node by more than this")
            ->check(CLI::PositiveNumber);
        orc->add_option("--max-sweeps", spec.max_sweeps, "Sweep limit")->check(CLI::PositiveNumber);
        output(orc);
        auto* jn = add("jn-bound", "Sharp constant of the weak inequality", false);
        output(jn);
    }

    CLI::App* add(const std::string& name, const std::string& help, bool needs_point) {
        auto* s = app.add_subcommand(name, help);
        s->add_option("--lambda", spec.params.lambda, "Level lambda")->required();
        s->add_option("--eps", spec.params.eps, "BMO bound eps")->required();
        if (needs_point) {
            s->add_option("--x1", x1, "Mean coordinate")->required();
            s->add_option("--x2", x2, "Second-moment coordinate")->required();
        }
        subs.push_back(s);
        return s;
    }

    void grid_size(CLI::App* s) {
        s->add_option("--n1", spec.n1, "Nodes along x1")->check(CLI::Range(3, 1 << 20));
        s->add_option("--n2", spec.n2, "Nodes along the normalized height")->check(CLI::Range(3, 1 << 20));
    }

    void format(CLI::App* s) {
        s->add_option("--format", spec.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    }

    void output(CLI::App* s) {
        s->add_option("--out", spec.out, "Output file (default: standard output)");
        format(s);
    }
};

}  // namespace detail

/// Parses arguments without the program name.
inline CommandSpec parse_args(const std::vector<std::string>& args) {
    detail::Parser p;
    std::vector<const char*> argv{"wjn"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        p.app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        throw UsageError(p.app.help(), ExitCode::Success);
    } catch (const CLI::CallForAllHelp&) {
        throw UsageError(p.app.help("", CLI::AppFormatMode::All), ExitCode::Success);
    } catch (const CLI::ParseError& e) {
        std::string help = p.app.help();
        for (auto* s : p.subs)
            if (s->parsed())
                help = s->help();
        throw UsageError(std::string(e.what()) + "\n\n" + help, ExitCode::Usage);
    }
    for (auto* s : p.subs) {
        if (s->parsed()) {
            p.spec.subcommand = s->get_name();
            if (s->get_option_no_throw("--x1"))
                p.spec.point = StripPoint{p.x1, p.x2};
        }
    }
    return p.spec;
}

namespace detail {

inline std::string fixed17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void dump(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

inline int cmd_eval(const CommandSpec& s, std::ostream& out) {
    const StripPoint x = *s.point;
    const BellmanValue v = eval_b(x, s.params);
    std::optional<Gradient> g;
    try {
        g = grad_b(x, s.params);
    } catch (const domain_error&) {
    }
    if (s.format == "csv") {
        CsvWriter w(out, {"value", "region", "regime", "grad_x1", "grad_x2"});
        w.row(v.value, region_name(v.region), regime_name(regime(s.params)), g ? csv_number(g->d1) : "",
              g ? csv_number(g->d2) : "");
        return ExitCode::Success;
    }
    Json j{{"value", v.value}, {"region", region_name(v.region)}, {"regime", regime_name(regime(s.params))}};
    if (g)
        j["gradient"] = to_json(*g);
    dump(out, j);
    return ExitCode::Success;
}

inline int cmd_grid(const CommandSpec& s, std::ostream& out) {
    regime(s.params);
    const StripGrid g = StripGrid::standard(s.params, s.n1, s.n2);
    if (s.format == "json") {
        Json pts = Json::array();
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n2; ++j) {
                const StripPoint x = g.point(i, j);
                const BellmanValue v = eval_b(x, s.params);
                pts.push_back(
                    Json{{"x1", x.x1}, {"y", g.y(j)}, {"x2", x.x2}, {"value", v.value}, {"region", region_name(v.region)}});
            }
        dump(out, Json{{"params", to_json(s.params)}, {"n1", g.n1}, {"n2", g.n2}, {"points", std::move(pts)}});
        return ExitCode::Success;
    }
    CsvWriter w(out, {"x1", "y", "x2", "value", "region"});
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const StripPoint x = g.point(i, j);
            const BellmanValue v = eval_b(x, s.params);
            w.row(x.x1, g.y(j), x.x2, v.value, region_name(v.region));
        }
    return ExitCode::Success;
}

inline int cmd_extremizer(const CommandSpec& s, std::ostream& out) {
    const StripPoint x = *s.point;
    const Params& p = s.params;
    require_in_strip(x, p);
    const PiecewiseFunction phi = build_extremizer(x, p);
    if (s.format == "csv") {
        write_samples_csv(out, phi, s.points);
        return ExitCode::Success;
    }
    const auto [m1, m2] = moments(phi, {0.0, 1.0});
    const double b = eval_b(x, p).value;
    const double measure = superlevel_measure(phi, p.lambda, LevelMode::Absolute);
    const double norm = bmo_norm(phi);
    const double curve = delivery_curve(phi, 200).max_violation;
    const double moment_error = std::max(std::fabs(m1 - x.x1), std::fabs(m2 - x.x2));
    const bool ok = moment_error <= 1e-9 && std::fabs(measure - b) <= 1e-9 && norm <= p.eps + 1e-6 && curve <= 1e-9;
    Json j = to_json(phi);
    j["value"] = b;
    j["verification"] = Json{{"moments", Json::array({m1, m2})},
                             {"moment_error", moment_error},
                             {"superlevel_measure", measure},
                             {"measure_error", std::fabs(measure - b)},
                             {"bmo_norm", norm},
                             {"delivery_max_violation", curve},
                             {"passed", ok}};
    dump(out, j);
    return ok ? ExitCode::Success : ExitCode::Failure;
}

inline int cmd_verify(const CommandSpec& s, std::ostream& out, std::ostream& log) {
    VerifyOptions opt;
    opt.points = s.points;
    opt.seed = s.seed;
    opt.extremizer_points_per_region = std::max(1, s.points / 5);
    const VerifyReport rep = run_invariant_suite(s.params, opt);
    std::size_t failed = 0;
    for (const auto& c : rep.checks)
        failed += c.passed() ? 0 : 1;
    if (s.format == "csv") {
        CsvWriter w(out, {"check", "samples", "failures", "worst", "tolerance", "status", "seed"});
        for (const auto& c : rep.checks)
            w.row(c.name, c.samples, c.failures, c.worst, c.tolerance,
                  c.skipped ? "skipped" : c.passed() ? "pass" : "fail", std::to_string(rep.seed));
    } else {
        Json checks = Json::array();
        for (const auto& c : rep.checks)
            checks.push_back(Json{{"name", c.name},
                                  {"samples", c.samples},
                                  {"failures", c.failures},
                                  {"worst", c.worst},
                                  {"tolerance", c.tolerance},
                                  {"skipped", c.skipped},
                                  {"passed", c.passed()}});
        dump(out, Json{{"params", to_json(s.params)},
                       {"regime", regime_name(regime(s.params))},
                       {"seed", rep.seed},
                       {"points", s.points},
                       {"checks_total", rep.checks.size()},
                       {"checks_failed", failed},
                       {"passed", rep.passed()},
                       {"checks", std::move(checks)}});
    }
    log << "verify: " << rep.checks.size() << " checks, " << failed << " failed, seed " << rep.seed << '\n';
    return rep.passed() ? ExitCode::Success : ExitCode::Failure;
}

inline int cmd_oracle(const CommandSpec& s, std::ostream& out, std::ostream& log) {
    const Params& p = s.params;
    regime(p);
    const StripGrid g = StripGrid::standard(p, s.n1, s.n2);
    const RelaxOptions opt{s.directions, s.radii, 0};
    const GridField f = solve(g, BoundarySet::absolute_level(p.lambda), s.tol, s.max_sweeps, opt,
                              [&](const GridField&, const SweepLog& l) {
                                  log << "sweep " << l.sweep << " delta " << l.delta << " seconds " << l.seconds
                                      << '\n';
                              });
    auto ref = [&](const StripPoint& x) { return eval_b(x, p).value; };
    const FieldComparison cmp = compare_field(f, ref, p.eps);
    const double center = field_center_value(f);
    if (s.format == "json") {
        dump(out, Json{{"params", to_json(p)},
                       {"grid", Json{{"n1", g.n1}, {"n2", g.n2}, {"x1_min", g.x1_min}, {"x1_max", g.x1_max}}},
                       {"directions", s.directions},
                       {"radii", s.radii},
                       {"tol", s.tol},
                       {"sweeps", f.sweeps},
                       {"converged", f.converged},
                       {"last_delta", f.last_delta},
                       {"sup_gap", cmp.sup_gap},
                       {"max_overshoot", cmp.max_overshoot},
                       {"center_value", center},
                       {"closed_form_center", weak_jn_bound(p)}});
    } else {
        write_field_csv(out, f, ref);
    }
    log << "sup_gap " << fixed17(cmp.sup_gap) << " max_overshoot " << fixed17(cmp.max_overshoot) << " sweeps "
        << f.sweeps << (f.converged ? " converged" : " NOT converged") << '\n';
    return f.converged ? ExitCode::Success : ExitCode::Failure;
}

inline int cmd_jn_bound(const CommandSpec& s, std::ostream& out) {
    const double b = weak_jn_bound(s.params);
    if (s.format == "json") {
        dump(out, Json{{"lambda", s.params.lambda},
                       {"eps", s.params.eps},
                       {"regime", regime_name(regime(s.params))},
                       {"bound", b}});
    } else if (s.format == "csv") {
        CsvWriter w(out, {"lambda", "eps", "regime", "bound"});
        w.row(s.params.lambda, s.params.eps, regime_name(regime(s.params)), b);
    } else {
        out << fixed17(b) << '\n';
    }
    return ExitCode::Success;
}

}  // namespace detail

/// Runs a parsed command. The main document goes to `--out` when given, else
/// to `out`; progress and summaries go to `log`, or to `out` when the
/// document went to a file.
inline int run(const CommandSpec& spec, std::ostream& out, std::ostream& log) {
    std::ofstream file;
    if (!spec.out.empty()) {
        file.open(spec.out, std::ios::binary);
        if (!file) {
            log << "error: cannot open " << spec.out << " for writing\n";
            return ExitCode::Usage;
        }
    }
    std::ostream& doc = spec.out.empty() ? out : file;
    std::ostream& note = spec.out.empty() ? log : out;
    try {
        const std::string& c = spec.subcommand;
        if (c == "eval")
            return detail::cmd_eval(spec, doc);
        if (c == "grid")
            return detail::cmd_grid(spec, doc);
        if (c == "extremizer")
            return detail::cmd_extremizer(spec, doc);
        if (c == "verify")
            return detail::cmd_verify(spec, doc, note);
        if (c == "oracle")
            return detail::cmd_oracle(spec, doc, note);
        if (c == "jn-bound")
            return detail::cmd_jn_bound(spec, doc);
        log << "error: unknown command " << c << '\n';
        return ExitCode::Usage;
    } catch (const domain_error& e) {
        log << "error: " << e.what() << '\n';
        return ExitCode::Usage;
    }
}

/// parse_args followed by run, mapping usage errors to exit code 2.
inline int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
    CommandSpec spec;
    try {
        spec = parse_args(args);
    } catch (const UsageError& e) {
        (e.code == ExitCode::Success ? out : log) << e.what() << '\n';
        return e.code;
    }
    return run(spec, out, log);
}

}  // namespace wjn::cli
