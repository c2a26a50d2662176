#pragma once

// Experiment configuration files (JSON). Parsing is strict: unknown keys,
// unknown registry ids and invalid grids are rejected with the JSON path of
// the offending value.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ulln/auditor.hpp"
#include "ulln/engine.hpp"

namespace ulln {

struct TailcheckParams {
    int n_min = 8;
    int n_max = 200;
    double t_min = 8.0;
    double t_max = 30.0;
    double t_step = 1.0;
};

struct TaylorParams {
    int samples = 100;
    int n = 51;
    double quad_tol = 1e-8;
};

struct ExperimentConfig {
    std::string name;
    std::string source;  // path or label used in messages
    SimulationPlan plan;
    std::string h_id;
    std::string estimator_id;
    double constant_offset = 1.0;
    bool target_from_quadrature = true;

    std::filesystem::path output_dir = "out";
    std::vector<std::string> formats = {"csv", "json"};
    bool audit = false;
    std::vector<std::string> commands;
    double convergence_threshold = 0.05;

    TailcheckParams tailcheck;
    TaylorParams taylor;
    AuditOptions audit_options;
};

ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(std::string_view text, std::string source = "<config>");

// Plan echo for self-reproducing reports, as a JSON string.
std::string plan_echo_json(const ExperimentConfig& cfg);

}  // namespace ulln
