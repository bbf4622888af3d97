#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "mfcg/harness.hpp"

namespace {

// exit codes: 0 success, 1 validation error, 2 solver non-convergence
constexpr int kExitValidation = 1;
constexpr int kExitNoConvergence = 2;

int do_run(const std::string& config_path, const std::string& mode_override,
           const std::vector<std::uint64_t>& seed_override, std::int64_t steps_override,
           const std::string& out_override, std::int64_t trace_override) {
    mfcg::ExperimentConfig cfg = mfcg::parse_config(config_path);
    if (!mode_override.empty()) cfg.mode = mfcg::parse_mode(mode_override);
    if (!seed_override.empty()) cfg.seeds = seed_override;
    if (steps_override > 0) cfg.n_steps = steps_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (trace_override > 0) cfg.trace_every = trace_override;

    const auto reports = mfcg::run_experiment(cfg);
    for (const auto& r : reports) {
        std::cout << mfcg::format_report(r);
        std::cout << "csv: " << r.csv_path << "\n";
        std::cout << "report: " << r.report_path << "\n\n";
    }
    return 0;
}

int do_check(const std::string& config_path) {
    mfcg::ExperimentConfig cfg = mfcg::parse_config(config_path);
    cfg.mode = mfcg::RunMode::Check;
    const auto reports = mfcg::run_experiment(cfg);
    const auto& r = reports.front();
    std::cout << mfcg::format_report(r);
    if (r.assumptions) {
        const auto& a = *r.assumptions;
        if (!(a.contraction_loc.holds && a.contraction_glob.holds && a.phi_bound.holds)) {
            std::cout << "one or more assumptions do not hold\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-timescale mean field control game solver"};
    app.require_subcommand(1);

    std::string config_path;
    std::string mode_override;
    std::vector<std::uint64_t> seed_override;
    std::int64_t steps_override = 0;
    std::string out_override;
    std::int64_t trace_override = 0;

    auto* run = app.add_subcommand("run", "Run an experiment from a config file");
    run->add_option("config", config_path, "Path to the config file")->required();
    run->add_option("--mode", mode_override, "Override mode (ideal|sync|async|exact|check)");
    run->add_option("--seed", seed_override, "Override seed list (repeatable)");
    run->add_option("--steps", steps_override, "Override step count");
    run->add_option("--out", out_override, "Override output directory");
    run->add_option("--trace-every", trace_override, "Override trace interval");

    auto* check = app.add_subcommand("check", "Print assumption verdicts for a config's model");
    check->add_option("config", config_path, "Path to the config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run))
            return do_run(config_path, mode_override, seed_override, steps_override, out_override,
                          trace_override);
        return do_check(config_path);
    } catch (const mfcg::IterationLimitError& e) {
        std::cerr << "error: " << e.what() << " (last residual " << e.last_residual << ")\n";
        return kExitNoConvergence;
    } catch (const mfcg::DegenerateGapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const mfcg::ModelContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
