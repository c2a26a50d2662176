#include "ulln/config.hpp"

#include <fstream>
#include <initializer_list>
#include "json.hpp"
#include <set>
#include <sstream>

#include "ulln/error.hpp"

namespace ulln {

namespace {

using nlohmann::json;

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
        throw ConfigError(source_ + ": " + path + ": " + msg);
    }

    void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) const {
        if (!obj.is_object()) fail(path, "expected an object");
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, _] : obj.items()) {
            if (!allowed.contains(k)) fail(path + "." + k, "unknown key");
        }
    }

    double number(const json& v, const std::string& path) const {
        if (!v.is_number()) fail(path, "expected a number");
        return v.get<double>();
    }

    int integer(const json& v, const std::string& path) const {
        if (!v.is_number_integer()) fail(path, "expected an integer");
        return v.get<int>();
    }

    std::uint64_t seed(const json& v, const std::string& path) const {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        fail(path, "expected a non-negative integer");
    }

    std::string string(const json& v, const std::string& path) const {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
    }

    bool boolean(const json& v, const std::string& path) const {
        if (!v.is_boolean()) fail(path, "expected a boolean");
        return v.get<bool>();
    }

    template <class T, class Fn>
    std::vector<T> list(const json& v, const std::string& path, Fn item) const {
        if (!v.is_array()) fail(path, "expected an array");
        std::vector<T> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(item(v[i], path + "[" + std::to_string(i) + "]"));
        return out;
    }

private:
    std::string source_;
};

std::vector<double> v_grid_from(const Reader& rd, const json& v, const std::string& path) {
    if (v.is_object()) {
        rd.only_keys(v, path, {"step"});
        if (!v.contains("step")) rd.fail(path, "missing 'step'");
        const double step = rd.number(v["step"], path + ".step");
        if (!(step > 0.0 && step <= 1.0)) rd.fail(path + ".step", "must lie in (0, 1]");
        const long count = std::lround(1.0 / step);
        if (std::abs(count * step - 1.0) > 1e-9) rd.fail(path + ".step", "must divide 1 evenly");
        std::vector<double> g;
        for (long k = 0; k <= count; ++k) g.push_back(static_cast<double>(k) / static_cast<double>(count));
        return g;
    }
    return rd.list<double>(v, path, [&](const json& x, const std::string& p) { return rd.number(x, p); });
}

}  // namespace

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    auto cfg = parse_config_text(buf.str(), path.string());
    return cfg;
}

ExperimentConfig parse_config_text(std::string_view text, std::string source) {
    Reader rd(source);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": malformed JSON: " + e.what());
    }
    rd.only_keys(doc, "$",
                 {"name", "distribution", "h", "envelope", "estimator", "theta", "n_grid", "v_grid",
                  "replicates", "master_seed", "target", "target_tol", "output", "audit", "commands",
                  "convergence_threshold", "tailcheck", "taylor", "audit_options"});
    for (const char* key : {"distribution", "h", "estimator", "n_grid", "v_grid", "replicates", "master_seed"}) {
        if (!doc.contains(key)) rd.fail(std::string("$.") + key, "required key missing");
    }

    ExperimentConfig cfg;
    cfg.source = source;
    if (doc.contains("name")) cfg.name = rd.string(doc["name"], "$.name");

    // distribution
    {
        const json& d = doc["distribution"];
        rd.only_keys(d, "$.distribution", {"family", "mu", "sigma"});
        if (d.contains("family")) {
            const auto fam = rd.string(d["family"], "$.distribution.family");
            try {
                cfg.plan.dist.family = family_from_string(fam);
            } catch (const DomainError&) {
                rd.fail("$.distribution.family", "unknown id '" + fam + "'");
            }
        }
        if (d.contains("mu")) cfg.plan.dist.mu = rd.number(d["mu"], "$.distribution.mu");
        if (d.contains("sigma")) cfg.plan.dist.sigma = rd.number(d["sigma"], "$.distribution.sigma");
        if (!(cfg.plan.dist.sigma > 0.0)) rd.fail("$.distribution.sigma", "must be positive");
    }

    // envelope
    EnvelopeParams env = flagship_envelope(cfg.plan.dist.sigma);
    if (doc.contains("envelope")) {
        const json& e = doc["envelope"];
        rd.only_keys(e, "$.envelope", {"gamma", "beta0", "p", "alpha0", "C"});
        if (e.contains("gamma")) env.gamma = rd.number(e["gamma"], "$.envelope.gamma");
        if (e.contains("beta0")) env.beta0 = rd.number(e["beta0"], "$.envelope.beta0");
        if (e.contains("p")) env.p = rd.number(e["p"], "$.envelope.p");
        if (e.contains("alpha0")) env.alpha0 = rd.number(e["alpha0"], "$.envelope.alpha0");
        if (e.contains("C")) env.C = rd.number(e["C"], "$.envelope.C");
        try {
            env.validate();
        } catch (const DomainError& err) {
            rd.fail("$.envelope", err.what());
        }
    }

    cfg.h_id = rd.string(doc["h"], "$.h");
    try {
        cfg.plan.h = make_h(cfg.h_id, env);
    } catch (const DomainError&) {
        rd.fail("$.h", "unknown id '" + cfg.h_id + "'");
    }

    cfg.plan.theta = doc.contains("theta") ? rd.number(doc["theta"], "$.theta") : cfg.plan.dist.mu;

    {
        const json& e = doc["estimator"];
        if (e.is_object()) {
            rd.only_keys(e, "$.estimator", {"id", "offset"});
            if (!e.contains("id")) rd.fail("$.estimator.id", "required key missing");
            cfg.estimator_id = rd.string(e["id"], "$.estimator.id");
            if (e.contains("offset")) cfg.constant_offset = rd.number(e["offset"], "$.estimator.offset");
        } else {
            cfg.estimator_id = rd.string(e, "$.estimator");
        }
        try {
            cfg.plan.estimator = make_estimator(cfg.estimator_id, cfg.plan.theta, cfg.constant_offset);
        } catch (const DomainError&) {
            rd.fail("$.estimator", "unknown id '" + cfg.estimator_id + "'");
        }
        if (cfg.plan.estimator.kind == EstimatorKind::median ||
            cfg.plan.estimator.kind == EstimatorKind::m_estimator) {
            cfg.plan.estimator.tail = TailBound{env.C, env.p, env.gamma, static_cast<int>(std::ceil(env.gamma))};
        }
    }

    cfg.plan.n_grid = rd.list<int>(doc["n_grid"], "$.n_grid",
                                   [&](const json& x, const std::string& p) { return rd.integer(x, p); });
    cfg.plan.v_grid = v_grid_from(rd, doc["v_grid"], "$.v_grid");
    cfg.plan.replicates = rd.integer(doc["replicates"], "$.replicates");
    if (cfg.plan.replicates < 2) rd.fail("$.replicates", "must be at least 2");
    cfg.plan.master_seed = rd.seed(doc["master_seed"], "$.master_seed");

    if (doc.contains("target")) {
        const json& t = doc["target"];
        if (t.is_string()) {
            if (t.get<std::string>() != "quadrature") rd.fail("$.target", "expected a number or \"quadrature\"");
        } else {
            cfg.plan.target = rd.number(t, "$.target");
            cfg.target_from_quadrature = false;
        }
    }
    if (doc.contains("target_tol")) cfg.plan.target_tol = rd.number(doc["target_tol"], "$.target_tol");

    try {
        cfg.plan.validate();
    } catch (const DomainError& err) {
        const std::string msg = err.what();
        const std::string path = msg.rfind("n_grid", 0) == 0 ? "$.n_grid"
                                 : msg.rfind("v_grid", 0) == 0 ? "$.v_grid"
                                                               : "$";
        rd.fail(path, msg);
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        rd.only_keys(o, "$.output", {"directory", "formats"});
        if (o.contains("directory")) cfg.output_dir = rd.string(o["directory"], "$.output.directory");
        if (o.contains("formats")) {
            cfg.formats = rd.list<std::string>(o["formats"], "$.output.formats",
                                               [&](const json& x, const std::string& p) {
                                                   auto f = rd.string(x, p);
                                                   if (f != "csv" && f != "json" && f != "svg") {
                                                       rd.fail(p, "format must be csv, json or svg");
                                                   }
                                                   return f;
                                               });
        }
    }
    if (doc.contains("audit")) cfg.audit = rd.boolean(doc["audit"], "$.audit");
    if (doc.contains("commands")) {
        cfg.commands = rd.list<std::string>(doc["commands"], "$.commands", [&](const json& x, const std::string& p) {
            auto c = rd.string(x, p);
            if (c != "simulate" && c != "audit" && c != "tailcheck" && c != "taylor") {
                rd.fail(p, "unknown command '" + c + "'");
            }
            return c;
        });
    }
    if (doc.contains("convergence_threshold")) {
        cfg.convergence_threshold = rd.number(doc["convergence_threshold"], "$.convergence_threshold");
    }

    if (doc.contains("tailcheck")) {
        const json& t = doc["tailcheck"];
        rd.only_keys(t, "$.tailcheck", {"n_min", "n_max", "t_min", "t_max", "t_step"});
        auto& tc = cfg.tailcheck;
        if (t.contains("n_min")) tc.n_min = rd.integer(t["n_min"], "$.tailcheck.n_min");
        if (t.contains("n_max")) tc.n_max = rd.integer(t["n_max"], "$.tailcheck.n_max");
        if (t.contains("t_min")) tc.t_min = rd.number(t["t_min"], "$.tailcheck.t_min");
        if (t.contains("t_max")) tc.t_max = rd.number(t["t_max"], "$.tailcheck.t_max");
        if (t.contains("t_step")) tc.t_step = rd.number(t["t_step"], "$.tailcheck.t_step");
        if (tc.n_min < 1 || tc.n_max < tc.n_min) rd.fail("$.tailcheck", "need 1 <= n_min <= n_max");
        if (!(tc.t_step > 0.0) || tc.t_max < tc.t_min) rd.fail("$.tailcheck", "need t_step > 0 and t_min <= t_max");
    }
    if (doc.contains("taylor")) {
        const json& t = doc["taylor"];
        rd.only_keys(t, "$.taylor", {"samples", "n", "quad_tol"});
        auto& tp = cfg.taylor;
        if (t.contains("samples")) tp.samples = rd.integer(t["samples"], "$.taylor.samples");
        if (t.contains("n")) tp.n = rd.integer(t["n"], "$.taylor.n");
        if (t.contains("quad_tol")) tp.quad_tol = rd.number(t["quad_tol"], "$.taylor.quad_tol");
        if (tp.samples < 1 || tp.n < 1 || !(tp.quad_tol > 0.0)) rd.fail("$.taylor", "values must be positive");
    }
    if (doc.contains("audit_options")) {
        const json& a = doc["audit_options"];
        rd.only_keys(a, "$.audit_options",
                     {"quad_tol", "e1_replicates", "e2_trials", "e4_n", "e4_v", "e4_replicates",
                      "e4_bin_width", "e4_half_width", "e5_n", "e5_replicates", "l3_replicates"});
        auto& ao = cfg.audit_options;
        const auto pos_int = [&](const char* key) {
            const int v = rd.integer(a[key], std::string("$.audit_options.") + key);
            if (v < 1) rd.fail(std::string("$.audit_options.") + key, "must be positive");
            return v;
        };
        if (a.contains("quad_tol")) ao.quad_tol = rd.number(a["quad_tol"], "$.audit_options.quad_tol");
        if (a.contains("e1_replicates")) ao.e1_replicates = pos_int("e1_replicates");
        if (a.contains("e2_trials")) ao.e2_trials = pos_int("e2_trials");
        if (a.contains("e4_n")) {
            ao.e4_n = rd.list<int>(a["e4_n"], "$.audit_options.e4_n",
                                   [&](const json& x, const std::string& p) { return rd.integer(x, p); });
        }
        if (a.contains("e4_v")) {
            ao.e4_v = rd.list<double>(a["e4_v"], "$.audit_options.e4_v",
                                      [&](const json& x, const std::string& p) { return rd.number(x, p); });
        }
        if (a.contains("e4_replicates")) ao.e4_replicates = pos_int("e4_replicates");
        if (a.contains("e4_bin_width")) ao.e4_bin_width = rd.number(a["e4_bin_width"], "$.audit_options.e4_bin_width");
        if (a.contains("e4_half_width")) ao.e4_half_width = rd.number(a["e4_half_width"], "$.audit_options.e4_half_width");
        if (a.contains("e5_n")) ao.e5_n = pos_int("e5_n");
        if (a.contains("e5_replicates")) ao.e5_replicates = pos_int("e5_replicates");
        if (a.contains("l3_replicates")) ao.l3_replicates = pos_int("l3_replicates");
    }
    return cfg;
}

std::string plan_echo_json(const ExperimentConfig& cfg) {
    const auto& p = cfg.plan;
    const auto& env = p.h.envelope;
    json j;
    j["name"] = cfg.name;
    j["distribution"] = {{"family", std::string(to_string(p.dist.family))}, {"mu", p.dist.mu}, {"sigma", p.dist.sigma}};
    j["h"] = cfg.h_id;
    j["envelope"] = {{"gamma", env.gamma}, {"beta0", env.beta0}, {"p", env.p}, {"alpha0", env.alpha0}, {"C", env.C}};
    if (p.estimator.kind == EstimatorKind::constant) {
        j["estimator"] = {{"id", cfg.estimator_id}, {"offset", cfg.constant_offset}};
    } else {
        j["estimator"] = cfg.estimator_id;
    }
    j["theta"] = p.theta;
    j["n_grid"] = p.n_grid;
    j["v_grid"] = p.v_grid;
    j["replicates"] = p.replicates;
    j["master_seed"] = p.master_seed;
    if (p.target) {
        j["target"] = *p.target;
    } else {
        j["target"] = "quadrature";
    }
    j["target_tol"] = p.target_tol;
    j["convergence_threshold"] = cfg.convergence_threshold;
    return j.dump();
}

}  // namespace ulln
