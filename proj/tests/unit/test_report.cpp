#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "ulln/config.hpp"
#include "ulln/report.hpp"

using namespace ulln;
namespace fs = std::filesystem;

namespace {

const std::string kSmall = R"({
  "name": "small",
  "distribution": {"family": "laplace", "mu": 0.0, "sigma": 1.0},
  "h": "signlog",
  "estimator": "median",
  "n_grid": [20, 40, 80],
  "v_grid": [0.0, 0.5, 1.0],
  "replicates": 50,
  "master_seed": 5,
  "output": {"formats": ["csv", "json", "svg"]},
  "taylor": {"samples": 10, "n": 21},
  "tailcheck": {"n_max": 30, "t_max": 12},
  "audit_options": {"e4_replicates": 2000, "e5_replicates": 500, "l3_replicates": 200, "e1_replicates": 200}
})";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ulln_report_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("number formatting is shortest round-trip") {
    CHECK(format_number(0.05) == "0.05");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-2.5e-300) == "-2.5e-300");
    CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
    CHECK(format_number(INFINITY) == "inf");
}

TEST_CASE("CSV schema") {
    L1Curve c;
    c.points = {{10, 0.0, 0.5, 0.01, 7}, {10, 1.0, 0.25, 0.02, 7}};
    c.sups = {{10, 0.5, 0.01, 0.0}};
    CHECK(l1_curve_csv(c) == "n,v,l1_estimate,l1_se,replicates\n10,0,0.5,0.01,7\n10,1,0.25,0.02,7\n10,sup,0.5,0.01,7\n");
}

TEST_CASE("SVG is pure content") {
    L1Curve c;
    c.sups = {{50, 0.15, 0.002, 0.8}, {200, 0.075, 0.001, 0.9}, {800, 0.037, 0.0006, 0.95}};
    const auto a = convergence_svg(c, "t");
    CHECK(a == convergence_svg(c, "t"));
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(a.find("<polyline") != std::string::npos);
    CHECK(a.find("1e2") != std::string::npos);
}

TEST_CASE("simulate writes deterministic artifacts") {
    const auto cfg = parse_config_text(kSmall, "small");
    RunOptions o1;
    o1.out = scratch("sim1");
    RunOptions o2;
    o2.out = scratch("sim2");
    o2.threads = 3;
    const auto r1 = run_command("simulate", cfg, o1);
    const auto r2 = run_command("simulate", cfg, o2);
    REQUIRE(r1.artifacts.size() == 3);
    for (const char* f : {"simulate.csv", "simulate.json", "simulate.svg"}) {
        CHECK(slurp(*o1.out / f) == slurp(*o2.out / f));
    }
    const auto csv = slurp(*o1.out / "simulate.csv");
    CHECK(csv.rfind("n,v,l1_estimate,l1_se,replicates\n", 0) == 0);
    CHECK(csv.find("\n80,sup,") != std::string::npos);
    const auto j = nlohmann::json::parse(slurp(*o1.out / "simulate.json"));
    CHECK(j["plan"]["master_seed"] == 5);
    CHECK(j["grid_sup_is_lower_bound"] == true);
    CHECK(j["points"].size() == 9);
    CHECK(j["sup"].size() == 3);
    CHECK(j.contains("convergence"));

    RunOptions o3 = o1;
    o3.out = scratch("sim3");
    o3.seed = 6;
    run_command("simulate", cfg, o3);
    CHECK(slurp(*o1.out / "simulate.csv") != slurp(*o3.out / "simulate.csv"));
    CHECK(nlohmann::json::parse(slurp(*o3.out / "simulate.json"))["plan"]["master_seed"] == 6);
}

TEST_CASE("audit report") {
    const auto cfg = parse_config_text(kSmall, "small");
    RunOptions o;
    o.out = scratch("audit");
    std::ostringstream log;
    o.log = &log;
    const auto r = run_command("audit", cfg, o);
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(slurp(*o.out / "audit.json"));
    CHECK(j["conditions"].size() == condition_ids().size());
    CHECK(j["conditions"][0]["id"] == "X.1");
    CHECK(j["failed"] == false);
    const auto text = log.str();
    const auto px = text.find("[sampling]"), pp = text.find("[consistency]"), p2 = text.find("[uniform integrability]"),
               p3 = text.find("[M-estimator tails]");
    CHECK(px < pp);
    CHECK(pp < p2);
    CHECK(p2 < p3);
    CHECK(p3 != std::string::npos);
}

TEST_CASE("tailcheck and taylor tables") {
    auto cfg = parse_config_text(kSmall, "small");
    RunOptions o;
    o.out = scratch("tables");
    CHECK(run_command("tailcheck", cfg, o).exit_code == 0);
    const auto csv = slurp(*o.out / "tailcheck.csv");
    CHECK(csv.rfind("n,t,sigma,log_tail,log_bound,verdict\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 23 * 5);
    CHECK(tailcheck_sweep(TailcheckParams{3, 9, 7, 9, 1}, 1.0).front().verdict == Verdict::outside_regime);

    CHECK(run_command("taylor", cfg, o).exit_code == 0);
    const auto tcsv = slurp(*o.out / "taylor.csv");
    CHECK(std::count(tcsv.begin(), tcsv.end(), '\n') == 11);

    cfg.plan.dist.sigma = 2.0;
    cfg.tailcheck = TailcheckParams{16, 40, 16, 30, 2};
    CHECK(run_command("tailcheck", cfg, o).exit_code == 0);
}

TEST_CASE("failing verdicts give a nonzero exit") {
    auto cfg = parse_config_text(kSmall, "small");
    cfg.convergence_threshold = 1e-6;
    RunOptions o;
    o.out = scratch("fail");
    CHECK(run_command("simulate", cfg, o).exit_code == 1);
    cfg.commands = {};
    CHECK_THROWS(run_command("run", cfg, o));
    CHECK_THROWS(run_command("plot", cfg, o));
}
