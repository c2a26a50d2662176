#include "ulln/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "parallel.hpp"
#include "ulln/error.hpp"

namespace ulln {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"simulate", "audit", "tailcheck", "taylor", "run"};
    return names;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

void write_file(const fs::path& path, const std::string& content, RunResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    result.artifacts.push_back(path);
}

bool wants(const ExperimentConfig& cfg, std::string_view format) {
    return std::find(cfg.formats.begin(), cfg.formats.end(), format) != cfg.formats.end();
}

ordered_json plan_echo(const ExperimentConfig& cfg) { return ordered_json::parse(plan_echo_json(cfg)); }

}  // namespace

std::string l1_curve_csv(const L1Curve& curve) {
    std::string out = "n,v,l1_estimate,l1_se,replicates\n";
    int replicates = 0;
    for (const auto& p : curve.points) {
        out += std::to_string(p.n) + "," + format_number(p.v) + "," + format_number(p.estimate) + "," +
               format_number(p.se) + "," + std::to_string(p.replicates) + "\n";
        replicates = p.replicates;
    }
    for (const auto& s : curve.sups) {
        out += std::to_string(s.n) + ",sup," + format_number(s.sup) + "," + format_number(s.se) + "," +
               std::to_string(replicates) + "\n";
    }
    return out;
}

std::string simulate_json(const ExperimentConfig& cfg, const L1Curve& curve,
                          const std::optional<ConvergenceReport>& study) {
    ordered_json j;
    j["command"] = "simulate";
    j["plan"] = plan_echo(cfg);
    j["target"] = curve.target;
    j["grid_sup_is_lower_bound"] = true;
    j["points"] = ordered_json::array();
    for (const auto& p : curve.points) {
        j["points"].push_back({{"n", p.n}, {"v", p.v}, {"l1_estimate", p.estimate}, {"l1_se", p.se},
                               {"replicates", p.replicates}});
    }
    j["sup"] = ordered_json::array();
    for (const auto& s : curve.sups) {
        j["sup"].push_back({{"n", s.n}, {"sup", s.sup}, {"se", s.se}, {"argmax_v", s.argmax_v}});
    }
    if (study) {
        j["convergence"] = {{"decreasing", study->decreasing},
                            {"threshold", study->threshold},
                            {"below_threshold", study->below_threshold},
                            {"verdict", study->converging() ? "converging" : "not_converging"}};
    }
    j["warnings"] = ordered_json::array();
    if (curve.single_replicate) j["warnings"].push_back("single replicate: standard errors reported as 0");
    return j.dump(2) + "\n";
}

std::string convergence_svg(const L1Curve& curve, std::string_view title) {
    constexpr double W = 640, H = 420, L = 80, R = 30, T = 40, B = 60;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
    os << "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    os << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
       << title << "</text>\n";
    if (curve.sups.empty()) {
        os << "</svg>\n";
        return os.str();
    }
    double nmin = INFINITY, nmax = 0, ymin = INFINITY, ymax = 0;
    for (const auto& s : curve.sups) {
        nmin = std::min(nmin, static_cast<double>(s.n));
        nmax = std::max(nmax, static_cast<double>(s.n));
        const double lo = std::max(s.sup - 2 * s.se, s.sup * 0.5);
        if (lo > 0) ymin = std::min(ymin, lo);
        ymax = std::max(ymax, s.sup + 2 * s.se);
    }
    if (!(ymin < INFINITY) || ymin <= 0) ymin = ymax > 0 ? ymax * 1e-3 : 1e-3;
    if (ymax <= ymin) ymax = ymin * 10;
    const double lx0 = std::floor(std::log10(nmin)), lx1 = std::max(lx0 + 1, std::ceil(std::log10(nmax)));
    const double ly0 = std::floor(std::log10(ymin)), ly1 = std::max(ly0 + 1, std::ceil(std::log10(ymax)));
    const auto px = [&](double n) { return L + (std::log10(n) - lx0) / (lx1 - lx0) * (W - L - R); };
    const auto py = [&](double y) {
        y = std::max(y, std::pow(10.0, ly0));
        return H - B - (std::log10(y) - ly0) / (ly1 - ly0) * (H - T - B);
    };
    os << "<g stroke=\"#999\" stroke-width=\"0.5\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (double e = lx0; e <= lx1; e += 1) {
        const double x = px(std::pow(10.0, e));
        os << "<line x1=\"" << fixed(x, 2) << "\" y1=\"" << fixed(T, 2) << "\" x2=\"" << fixed(x, 2) << "\" y2=\""
           << fixed(H - B, 2) << "\"/>\n";
        os << "<text stroke=\"none\" x=\"" << fixed(x, 2) << "\" y=\"" << fixed(H - B + 16, 2)
           << "\" text-anchor=\"middle\">1e" << static_cast<int>(e) << "</text>\n";
    }
    for (double e = ly0; e <= ly1; e += 1) {
        const double y = py(std::pow(10.0, e));
        os << "<line x1=\"" << fixed(L, 2) << "\" y1=\"" << fixed(y, 2) << "\" x2=\"" << fixed(W - R, 2) << "\" y2=\""
           << fixed(y, 2) << "\"/>\n";
        os << "<text stroke=\"none\" x=\"" << fixed(L - 6, 2) << "\" y=\"" << fixed(y + 4, 2)
           << "\" text-anchor=\"end\">1e" << static_cast<int>(e) << "</text>\n";
    }
    os << "</g>\n";
    os << "<text x=\"" << fixed((L + W - R) / 2, 2) << "\" y=\"" << fixed(H - 18, 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">n</text>\n";
    os << "<text x=\"18\" y=\"" << fixed((T + H - B) / 2, 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 18 "
       << fixed((T + H - B) / 2, 2) << ")\">grid sup over v of L1 error</text>\n";
    os << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curve.sups.size(); ++i) {
        const auto& s = curve.sups[i];
        os << (i ? " " : "") << fixed(px(s.n), 2) << "," << fixed(py(s.sup), 2);
    }
    os << "\"/>\n";
    for (const auto& s : curve.sups) {
        const double x = px(s.n);
        os << "<line stroke=\"#1f5fa8\" x1=\"" << fixed(x, 2) << "\" y1=\"" << fixed(py(s.sup - 2 * s.se), 2)
           << "\" x2=\"" << fixed(x, 2) << "\" y2=\"" << fixed(py(s.sup + 2 * s.se), 2) << "\"/>\n";
        os << "<circle fill=\"#1f5fa8\" r=\"3\" cx=\"" << fixed(x, 2) << "\" cy=\"" << fixed(py(s.sup), 2)
           << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string audit_json(const ExperimentConfig& cfg, const ConditionReport& report) {
    ordered_json j;
    j["command"] = "audit";
    j["plan"] = plan_echo(cfg);
    j["conditions"] = ordered_json::array();
    for (const auto& c : report.conditions) {
        ordered_json ev = ordered_json::array();
        for (const auto& e : c.evidence) ev.push_back({{"name", e.name}, {"value", e.value}});
        j["conditions"].push_back({{"id", c.id},
                                   {"group", c.group},
                                   {"status", std::string(to_string(c.status))},
                                   {"evidence", ev},
                                   {"notes", c.notes}});
    }
    if (report.n0) {
        j["n0"] = *report.n0;
    } else {
        j["n0"] = nullptr;
    }
    j["failed"] = report.any_failed();
    return j.dump(2) + "\n";
}

std::string audit_summary(const ConditionReport& report) {
    std::ostringstream os;
    std::string group;
    for (const auto& c : report.conditions) {
        if (c.group != group) {
            group = c.group;
            os << "[" << group << "]\n";
        }
        std::string id = c.id;
        id.resize(std::max<std::size_t>(id.size(), 12), ' ');
        std::string status(to_string(c.status));
        status.resize(std::max<std::size_t>(status.size(), 15), ' ');
        os << "  " << id << status;
        for (std::size_t k = 0; k < std::min<std::size_t>(c.evidence.size(), 2); ++k) {
            os << (k ? "; " : "") << c.evidence[k].name << " = " << format_number(c.evidence[k].value);
        }
        os << "\n";
    }
    os << "N0 (empirical): " << (report.n0 ? std::to_string(*report.n0) : std::string("n/a")) << "\n";
    os << (report.any_failed() ? "RESULT: some conditions failed\n" : "RESULT: no condition failed\n");
    return os.str();
}

std::vector<TailcheckRow> tailcheck_sweep(const TailcheckParams& params, double sigma) {
    std::vector<TailcheckRow> rows;
    const int steps = static_cast<int>(std::floor((params.t_max - params.t_min) / params.t_step + 1e-9));
    for (int n = params.n_min; n <= params.n_max; ++n) {
        for (int k = 0; k <= steps; ++k) {
            TailcheckRow row;
            row.n = n;
            row.t = params.t_min + k * params.t_step;
            row.verdict = median_tail_bound_holds(n, row.t, sigma);
            row.log_tail = log_binomial_upper_median_tail(n, 0.5 * std::exp(-row.t / (2.0 * sigma)));
            row.log_bound = -std::log(2.0) - row.t;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<TaylorRow> taylor_sweep(const ExperimentConfig& cfg, unsigned threads) {
    const auto& p = cfg.plan;
    const auto count = static_cast<std::size_t>(cfg.taylor.samples);
    std::vector<TaylorRow> rows(count);
    detail::parallel_for(count, threads, [&](std::size_t r) {
        const auto seed = replicate_seed(p.master_seed, Stream::taylor, static_cast<std::uint64_t>(cfg.taylor.n), r);
        const auto sample = draw_sample(p.dist, static_cast<std::size_t>(cfg.taylor.n), seed);
        TaylorRow row;
        row.sample = static_cast<int>(r);
        row.theta_star = estimate(sample, p.estimator);
        row.result = taylor_residual(sample, p.theta, row.theta_star, p.h, cfg.taylor.quad_tol);
        rows[r] = row;
    });
    return rows;
}

namespace {

int do_simulate(const ExperimentConfig& cfg, const RunOptions& opts, const fs::path& dir, RunResult& res) {
    EngineOptions eo{opts.threads};
    std::optional<ConvergenceReport> study;
    L1Curve curve;
    if (cfg.plan.n_grid.size() >= 3) {
        study = convergence_study(cfg.plan, cfg.convergence_threshold, eo);
        curve = study->curve;
    } else {
        curve = sup_l1_curve(cfg.plan, eo);
    }
    if (wants(cfg, "csv")) write_file(dir / "simulate.csv", l1_curve_csv(curve), res);
    if (wants(cfg, "json")) write_file(dir / "simulate.json", simulate_json(cfg, curve, study), res);
    if (wants(cfg, "svg")) {
        write_file(dir / "simulate.svg", convergence_svg(curve, cfg.name.empty() ? "sup-L1 vs n" : cfg.name), res);
    }
    if (opts.log) {
        *opts.log << "n        grid-sup L1        se           argmax v\n";
        for (const auto& s : curve.sups) {
            *opts.log << s.n << "\t" << format_number(s.sup) << "\t" << format_number(s.se) << "\t"
                      << format_number(s.argmax_v) << "\n";
        }
        if (study) {
            *opts.log << "convergence: " << (study->converging() ? "converging" : "not converging")
                      << " (decreasing=" << (study->decreasing ? "yes" : "no")
                      << ", final < " << format_number(study->threshold) << ": "
                      << (study->below_threshold ? "yes" : "no") << ")\n";
        }
        *opts.log << "note: the sup is over the declared v grid and is a lower bound on the sup over [0,1]\n";
    }
    return study && !study->converging() ? 1 : 0;
}

int do_audit(const ExperimentConfig& cfg, const RunOptions& opts, const fs::path& dir, RunResult& res) {
    AuditOptions ao = cfg.audit_options;
    ao.threads = opts.threads;
    const ConditionReport rep = audit_conditions(cfg.plan, ao);
    if (wants(cfg, "json")) write_file(dir / "audit.json", audit_json(cfg, rep), res);
    if (opts.log) *opts.log << audit_summary(rep);
    return rep.any_failed() ? 1 : 0;
}

int do_tailcheck(const ExperimentConfig& cfg, const RunOptions& opts, const fs::path& dir, RunResult& res) {
    const auto rows = tailcheck_sweep(cfg.tailcheck, cfg.plan.dist.sigma);
    int held = 0, violated = 0, outside = 0;
    std::string csv = "n,t,sigma,log_tail,log_bound,verdict\n";
    for (const auto& r : rows) {
        csv += std::to_string(r.n) + "," + format_number(r.t) + "," + format_number(cfg.plan.dist.sigma) + "," +
               format_number(r.log_tail) + "," + format_number(r.log_bound) + "," + std::string(to_string(r.verdict)) +
               "\n";
        held += r.verdict == Verdict::holds;
        violated += r.verdict == Verdict::violated;
        outside += r.verdict == Verdict::outside_regime;
    }
    if (wants(cfg, "csv")) write_file(dir / "tailcheck.csv", csv, res);
    if (wants(cfg, "json")) {
        ordered_json j;
        j["command"] = "tailcheck";
        j["plan"] = plan_echo(cfg);
        j["sweep"] = {{"n_min", cfg.tailcheck.n_min}, {"n_max", cfg.tailcheck.n_max}, {"t_min", cfg.tailcheck.t_min},
                      {"t_max", cfg.tailcheck.t_max}, {"t_step", cfg.tailcheck.t_step}};
        j["holds"] = held;
        j["violated"] = violated;
        j["outside_regime"] = outside;
        write_file(dir / "tailcheck.json", j.dump(2) + "\n", res);
    }
    if (opts.log) {
        *opts.log << "median tail bound: " << held << " holds, " << violated << " violated, " << outside
                  << " outside regime\n";
    }
    return violated > 0 ? 1 : 0;
}

int do_taylor(const ExperimentConfig& cfg, const RunOptions& opts, const fs::path& dir, RunResult& res) {
    const auto rows = taylor_sweep(cfg, opts.threads);
    const double limit = 10.0 * cfg.taylor.quad_tol;
    double worst = 0.0;
    int failures = 0;
    std::string csv = "sample,n,theta,theta_star,residual,quad_error,breakpoints\n";
    for (const auto& r : rows) {
        csv += std::to_string(r.sample) + "," + std::to_string(cfg.taylor.n) + "," + format_number(cfg.plan.theta) +
               "," + format_number(r.theta_star) + "," + format_number(r.result.residual) + "," +
               format_number(r.result.quad_error) + "," + std::to_string(r.result.breakpoints) + "\n";
        worst = std::max(worst, r.result.residual);
        failures += !(r.result.residual < limit);
    }
    if (wants(cfg, "csv")) write_file(dir / "taylor.csv", csv, res);
    if (wants(cfg, "json")) {
        ordered_json j;
        j["command"] = "taylor";
        j["plan"] = plan_echo(cfg);
        j["samples"] = cfg.taylor.samples;
        j["n"] = cfg.taylor.n;
        j["quad_tol"] = cfg.taylor.quad_tol;
        j["limit"] = limit;
        j["max_residual"] = worst;
        j["failures"] = failures;
        write_file(dir / "taylor.json", j.dump(2) + "\n", res);
    }
    if (opts.log) {
        *opts.log << "taylor residual: max " << format_number(worst) << " over " << rows.size() << " samples (limit "
                  << format_number(limit) << "), " << failures << " failures\n";
    }
    return failures > 0 ? 1 : 0;
}

}  // namespace

RunResult run_command(std::string_view command, ExperimentConfig cfg, const RunOptions& opts) {
    if (opts.seed) cfg.plan.master_seed = *opts.seed;
    if (opts.out) cfg.output_dir = *opts.out;
    RunResult res;
    fs::create_directories(cfg.output_dir);

    const auto one = [&](std::string_view cmd) -> int {
        if (cmd == "simulate") {
            int code = do_simulate(cfg, opts, cfg.output_dir, res);
            if (cfg.audit) code = std::max(code, do_audit(cfg, opts, cfg.output_dir, res));
            return code;
        }
        if (cmd == "audit") return do_audit(cfg, opts, cfg.output_dir, res);
        if (cmd == "tailcheck") return do_tailcheck(cfg, opts, cfg.output_dir, res);
        if (cmd == "taylor") return do_taylor(cfg, opts, cfg.output_dir, res);
        throw ConfigError("unknown command '" + std::string(cmd) + "'");
    };

    if (command == "run") {
        if (cfg.commands.empty()) throw ConfigError(cfg.source + ": $.commands: empty; nothing to run");
        for (const auto& c : cfg.commands) res.exit_code = std::max(res.exit_code, one(c));
    } else {
        res.exit_code = one(command);
    }
    return res;
}

}  // namespace ulln
