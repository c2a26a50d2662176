#pragma once

// Command dispatch and artifact rendering for the ulln-lab front end.
//
// Artifacts are written as {command}.{format} under the output directory.
// Every renderer is a pure function of its inputs (no timestamps, no
// locale), so repeated runs produce byte-identical files.
//
// CSV schema of simulate.csv:
//     n,v,l1_estimate,l1_se,replicates
// one row per (n, v) lattice point, then one row per n with v = "sup".

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ulln/auditor.hpp"
#include "ulln/config.hpp"
#include "ulln/engine.hpp"

namespace ulln {

struct RunOptions {
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::ostream* log = nullptr;  // human-readable progress and summaries
};

struct RunResult {
    int exit_code = 0;
    std::vector<std::filesystem::path> artifacts;
};

const std::vector<std::string>& command_names();

// command in {simulate, audit, tailcheck, taylor, run}; "run" executes the
// config's `commands` list in order. Failing verdicts give exit code 1;
// engine or auditor errors give exit code 2.
RunResult run_command(std::string_view command, ExperimentConfig cfg, const RunOptions& opts);

std::string format_number(double x);

std::string l1_curve_csv(const L1Curve& curve);
std::string simulate_json(const ExperimentConfig& cfg, const L1Curve& curve,
                          const std::optional<ConvergenceReport>& study);
std::string convergence_svg(const L1Curve& curve, std::string_view title);

std::string audit_json(const ExperimentConfig& cfg, const ConditionReport& report);
std::string audit_summary(const ConditionReport& report);

struct TailcheckRow {
    int n = 0;
    double t = 0.0;
    double log_tail = 0.0;
    double log_bound = 0.0;
    Verdict verdict = Verdict::outside_regime;
};
std::vector<TailcheckRow> tailcheck_sweep(const TailcheckParams& params, double sigma);

struct TaylorRow {
    int sample = 0;
    double theta_star = 0.0;
    TaylorResult result;
};
std::vector<TaylorRow> taylor_sweep(const ExperimentConfig& cfg, unsigned threads);

}  // namespace ulln
