#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ulln/config.hpp"
#include "ulln/error.hpp"
#include "ulln/report.hpp"

namespace {

unsigned threads_from_env() {
    const char* env = std::getenv("ULLN_LAB_THREADS");
    if (!env || !*env) return 1;
    try {
        const long v = std::stol(env);
        if (v >= 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "ulln-lab: ignoring invalid ULLN_LAB_THREADS='" << env << "'\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uniform L1 law of large numbers verification lab"};
    app.set_version_flag("--version", "ulln-lab 0.1.0");

    std::string command;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 0;

    app.add_option("command", command, "simulate | audit | tailcheck | taylor | run")
        ->required()
        ->check(CLI::IsMember(ulln::command_names()));
    app.add_option("config", config_path, "experiment config (JSON)")->required();
    auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides config)");
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides config)");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads, 0 = hardware concurrency");

    CLI11_PARSE(app, argc, argv);

    ulln::RunOptions opts;
    if (*out_opt) opts.out = out_dir;
    if (*seed_opt) opts.seed = seed;
    opts.threads = *threads_opt ? threads : threads_from_env();
    opts.log = &std::cout;

    try {
        const auto cfg = ulln::parse_config(config_path);
        const auto result = ulln::run_command(command, cfg, opts);
        for (const auto& path : result.artifacts) std::cout << "wrote " << path.string() << "\n";
        return result.exit_code;
    } catch (const ulln::ConfigError& e) {
        std::cerr << "ulln-lab: config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ulln-lab: " << command << " failed: " << e.what() << "\n";
        return 2;
    }
}
