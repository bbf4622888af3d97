#ifndef MFCG_HARNESS_HPP
#define MFCG_HARNESS_HPP

#include "mfcg/async.hpp"
#include "mfcg/envs.hpp"
#include "mfcg/sync.hpp"

namespace mfcg {

enum class RunMode { Ideal, Sync, Async, Exact, Check };

std::string mode_name(RunMode m);
RunMode parse_mode(const std::string& s);

/// Model selector: either the built-in two-state benchmark or a dense
/// model file on disk.
struct ModelRef {
    bool builtin_two_state = true;
    TwoStateParams two_state;
    std::string dense_path;
};

struct ExperimentConfig {
    ModelRef model;
    RunMode mode = RunMode::Ideal;
    RateExponents exponents;
    std::int64_t n_steps = 1000;
    std::vector<std::uint64_t> seeds = {0};
    std::int64_t trace_every = 1;
    double tolerance = 1e-10;
    // Exploration mixture exponent for async mode; <= 0 disables.
    double exploration = 0.4;
    std::string out_dir; // empty: MFCG_OUT_DIR env var, else "."
};

/// Per-entry absolute errors against an exact solution.
struct ComparisonTable {
    QTable q_error;
    std::vector<double> mu_error;
    double max_q_error = 0.0;
    double max_mu_error = 0.0;
    double max_local_error = 0.0;
};

struct RunReport {
    RunMode mode = RunMode::Ideal;
    std::uint64_t seed = 0;
    SimplexDist mu;
    QTable q;
    LocalFamily locals;
    std::optional<ComparisonTable> comparison;
    std::optional<StructuralConstants> constants;
    std::optional<AssumptionReport> assumptions;
    double seconds = 0.0;
    std::string csv_path;
    std::string report_path;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);
bool config_equal(const ExperimentConfig& a, const ExperimentConfig& b);

MeanFieldModel build_model(const ModelRef& ref);
DenseModelSpec parse_dense_spec(const std::string& path);

ComparisonTable compare_to_exact(const SimplexDist& mu, const QTable& q,
                                 const LocalFamily& locals, const SolutionTriple& exact);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
std::string format_report(const RunReport& r);

/// Runs the configured experiment, one report per seed. Stochastic modes
/// execute their seeds in parallel worker threads; each worker writes its
/// own CSV, reports are collected after the join.
std::vector<RunReport> run_experiment(const ExperimentConfig& cfg);

} // namespace mfcg

#endif
