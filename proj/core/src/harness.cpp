#include "mfcg/harness.hpp"

#include <yaml-cpp/yaml.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace mfcg {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void config_error(const std::string& path, const std::string& msg) {
    throw std::invalid_argument("config: " + path + ": " + msg);
}

double get_double(const YAML::Node& n, const std::string& path) {
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        config_error(path, "expected a number");
    }
}

std::int64_t get_int(const YAML::Node& n, const std::string& path) {
    try {
        return n.as<std::int64_t>();
    } catch (const YAML::Exception&) {
        config_error(path, "expected an integer");
    }
}

/// Folds flat dotted keys ("model.p: 0.1") into the nested layout so the
/// rest of the parser sees a single shape.
YAML::Node normalize(const YAML::Node& root) {
    YAML::Node out(YAML::NodeType::Map);
    if (!root.IsMap()) throw std::invalid_argument("config: top level must be a mapping");
    for (const auto& kv : root) {
        const std::string key = kv.first.as<std::string>();
        std::vector<std::string> parts;
        std::stringstream ss(key);
        std::string part;
        while (std::getline(ss, part, '.')) parts.push_back(part);
        // Node assignment writes through to the aliased tree node, so
        // rebinding the cursor needs reset().
        YAML::Node cur;
        cur.reset(out);
        for (size_t i = 0; i + 1 < parts.size(); ++i) {
            if (!cur[parts[i]]) cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
            cur.reset(cur[parts[i]]);
        }
        cur[parts.back()] = kv.second;
    }
    return out;
}

ModelRef parse_model(const YAML::Node& node) {
    if (!node.IsMap()) config_error("model", "expected a mapping");
    ModelRef ref;
    std::string type = "two_state";
    if (node["type"]) type = node["type"].as<std::string>();
    if (type == "two_state") {
        ref.builtin_two_state = true;
        for (const auto& kv : node) {
            const std::string k = kv.first.as<std::string>();
            if (k == "type") continue;
            if (k == "p") ref.two_state.p = get_double(kv.second, "model.p");
            else if (k == "c_g") ref.two_state.c_g = get_double(kv.second, "model.c_g");
            else if (k == "c_l") ref.two_state.c_l = get_double(kv.second, "model.c_l");
            else if (k == "gamma") ref.two_state.gamma = get_double(kv.second, "model.gamma");
            else if (k == "phi") ref.two_state.phi = get_double(kv.second, "model.phi");
            else config_error("model." + k, "unknown key");
        }
    } else if (type == "dense") {
        ref.builtin_two_state = false;
        for (const auto& kv : node) {
            const std::string k = kv.first.as<std::string>();
            if (k == "type") continue;
            if (k == "path") ref.dense_path = kv.second.as<std::string>();
            else config_error("model." + k, "unknown key");
        }
        if (ref.dense_path.empty()) config_error("model.path", "required for dense models");
    } else {
        config_error("model.type", "unknown model type '" + type + "'");
    }
    return ref;
}

RateExponents parse_exponents(const YAML::Node& node) {
    if (!node.IsMap()) config_error("exponents", "expected a mapping");
    RateExponents e;
    for (const auto& kv : node) {
        const std::string k = kv.first.as<std::string>();
        if (k == "mu") e.omega_mu = get_double(kv.second, "exponents.mu");
        else if (k == "q") e.omega_q = get_double(kv.second, "exponents.q");
        else if (k == "mu_tilde") e.omega_mu_tilde = get_double(kv.second, "exponents.mu_tilde");
        else config_error("exponents." + k, "unknown key");
    }
    try {
        check_exponents(e);
    } catch (const std::invalid_argument& ex) {
        config_error("exponents", ex.what());
    }
    return e;
}

std::vector<std::vector<double>> as_matrix(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence()) config_error(path, "expected a list of rows");
    std::vector<std::vector<double>> m;
    for (const auto& row : n) {
        if (!row.IsSequence()) config_error(path, "expected a list of rows");
        m.push_back(row.as<std::vector<double>>());
    }
    return m;
}

std::vector<std::vector<std::vector<double>>> as_tensor(const YAML::Node& n,
                                                        const std::string& path) {
    if (!n.IsSequence()) config_error(path, "expected a 3d list");
    std::vector<std::vector<std::vector<double>>> t;
    for (const auto& plane : n) t.push_back(as_matrix(plane, path));
    return t;
}

void run_worker(const MeanFieldModel& model, const ExperimentConfig& cfg, std::uint64_t seed,
                RunReport& out) {
    const auto t0 = std::chrono::steady_clock::now();
    Trajectory traj;
    if (cfg.mode == RunMode::Sync) {
        auto [state, tr, mart] = run_sync(model, cfg.exponents, cfg.n_steps, seed, cfg.trace_every);
        traj = std::move(tr);
        traj.push_back({state.step, state.mu, state.q, state.locals});
        out.mu = state.mu;
        out.q = state.q;
        out.locals = state.locals;
    } else {
        ExplorationSchedule expl;
        if (cfg.exploration > 0.0) {
            expl.omega = cfg.exploration;
        } else {
            expl.enabled = false;
        }
        auto [state, tr] =
            run_async(model, cfg.exponents, cfg.n_steps, seed, cfg.trace_every, expl);
        traj = std::move(tr);
        traj.push_back({state.step, state.mu, state.q, state.locals});
        out.mu = state.mu;
        out.q = state.q;
        out.locals = state.locals;
    }
    write_trajectory_csv(out.csv_path, traj);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

std::string mode_name(RunMode m) {
    switch (m) {
        case RunMode::Ideal: return "ideal";
        case RunMode::Sync: return "sync";
        case RunMode::Async: return "async";
        case RunMode::Exact: return "exact";
        case RunMode::Check: return "check";
    }
    throw std::invalid_argument("mode_name: bad enum");
}

RunMode parse_mode(const std::string& s) {
    if (s == "ideal") return RunMode::Ideal;
    if (s == "sync") return RunMode::Sync;
    if (s == "async") return RunMode::Async;
    if (s == "exact") return RunMode::Exact;
    if (s == "check") return RunMode::Check;
    throw std::invalid_argument("config: mode: must be one of ideal|sync|async|exact|check, got '" +
                                s + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw std::invalid_argument(std::string("config: parse error: ") + e.what());
    }
    root = normalize(root);

    ExperimentConfig cfg;
    bool have_model = false;
    for (const auto& kv : root) {
        const std::string k = kv.first.as<std::string>();
        if (k == "model") {
            cfg.model = parse_model(kv.second);
            have_model = true;
        } else if (k == "mode") {
            cfg.mode = parse_mode(kv.second.as<std::string>());
        } else if (k == "exponents") {
            cfg.exponents = parse_exponents(kv.second);
        } else if (k == "n_steps") {
            cfg.n_steps = get_int(kv.second, "n_steps");
            if (cfg.n_steps < 1) config_error("n_steps", "must be >= 1");
        } else if (k == "seeds") {
            cfg.seeds.clear();
            if (kv.second.IsSequence()) {
                for (const auto& s : kv.second)
                    cfg.seeds.push_back(static_cast<std::uint64_t>(get_int(s, "seeds")));
            } else {
                cfg.seeds.push_back(static_cast<std::uint64_t>(get_int(kv.second, "seeds")));
            }
            if (cfg.seeds.empty()) config_error("seeds", "must list at least one seed");
        } else if (k == "trace_every") {
            cfg.trace_every = get_int(kv.second, "trace_every");
            if (cfg.trace_every < 1) config_error("trace_every", "must be >= 1");
        } else if (k == "tolerance") {
            cfg.tolerance = get_double(kv.second, "tolerance");
            if (!(cfg.tolerance > 0.0)) config_error("tolerance", "must be positive");
        } else if (k == "exploration") {
            cfg.exploration = get_double(kv.second, "exploration");
        } else if (k == "out_dir") {
            cfg.out_dir = kv.second.as<std::string>();
        } else {
            config_error(k, "unknown key");
        }
    }
    if (!have_model) config_error("model", "missing");
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    if (cfg.model.builtin_two_state) {
        e << YAML::Key << "type" << YAML::Value << "two_state";
        e << YAML::Key << "p" << YAML::Value << fmt17(cfg.model.two_state.p);
        e << YAML::Key << "c_g" << YAML::Value << fmt17(cfg.model.two_state.c_g);
        e << YAML::Key << "c_l" << YAML::Value << fmt17(cfg.model.two_state.c_l);
        e << YAML::Key << "gamma" << YAML::Value << fmt17(cfg.model.two_state.gamma);
        e << YAML::Key << "phi" << YAML::Value << fmt17(cfg.model.two_state.phi);
    } else {
        e << YAML::Key << "type" << YAML::Value << "dense";
        e << YAML::Key << "path" << YAML::Value << cfg.model.dense_path;
    }
    e << YAML::EndMap;
    e << YAML::Key << "mode" << YAML::Value << mode_name(cfg.mode);
    e << YAML::Key << "exponents" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "mu_tilde" << YAML::Value << fmt17(cfg.exponents.omega_mu_tilde);
    e << YAML::Key << "q" << YAML::Value << fmt17(cfg.exponents.omega_q);
    e << YAML::Key << "mu" << YAML::Value << fmt17(cfg.exponents.omega_mu);
    e << YAML::EndMap;
    e << YAML::Key << "n_steps" << YAML::Value << cfg.n_steps;
    e << YAML::Key << "seeds" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (auto s : cfg.seeds) e << s;
    e << YAML::EndSeq;
    e << YAML::Key << "trace_every" << YAML::Value << cfg.trace_every;
    e << YAML::Key << "tolerance" << YAML::Value << fmt17(cfg.tolerance);
    e << YAML::Key << "exploration" << YAML::Value << fmt17(cfg.exploration);
    if (!cfg.out_dir.empty()) e << YAML::Key << "out_dir" << YAML::Value << cfg.out_dir;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

bool config_equal(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.model.builtin_two_state == b.model.builtin_two_state &&
           a.model.two_state.p == b.model.two_state.p &&
           a.model.two_state.c_g == b.model.two_state.c_g &&
           a.model.two_state.c_l == b.model.two_state.c_l &&
           a.model.two_state.gamma == b.model.two_state.gamma &&
           a.model.two_state.phi == b.model.two_state.phi &&
           a.model.dense_path == b.model.dense_path && a.mode == b.mode &&
           a.exponents.omega_mu == b.exponents.omega_mu &&
           a.exponents.omega_q == b.exponents.omega_q &&
           a.exponents.omega_mu_tilde == b.exponents.omega_mu_tilde && a.n_steps == b.n_steps &&
           a.seeds == b.seeds && a.trace_every == b.trace_every && a.tolerance == b.tolerance &&
           a.exploration == b.exploration && a.out_dir == b.out_dir;
}

DenseModelSpec parse_dense_spec(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw std::invalid_argument("dense model '" + path + "': " + e.what());
    }
    DenseModelSpec spec;
    for (const auto& kv : root) {
        const std::string k = kv.first.as<std::string>();
        if (k == "dims") {
            spec.dims.n_states = static_cast<int>(get_int(kv.second["n_states"], "dims.n_states"));
            spec.dims.n_actions = static_cast<int>(get_int(kv.second["n_actions"], "dims.n_actions"));
        } else if (k == "kernel") {
            spec.kernel = as_tensor(kv.second, "kernel");
        } else if (k == "cost") {
            spec.cost = as_matrix(kv.second, "cost");
        } else if (k == "cost_mu") {
            spec.cost_mu = as_tensor(kv.second, "cost_mu");
        } else if (k == "cost_mu_tilde") {
            spec.cost_mu_tilde = as_tensor(kv.second, "cost_mu_tilde");
        } else if (k == "gamma") {
            spec.gamma = get_double(kv.second, "gamma");
        } else if (k == "phi") {
            spec.phi = get_double(kv.second, "phi");
        } else if (k == "cost_bound") {
            spec.cost_bound = get_double(kv.second, "cost_bound");
        } else if (k == "lipschitz") {
            LipschitzDecl d;
            d.l_p_glob = get_double(kv.second["l_p_glob"], "lipschitz.l_p_glob");
            d.l_p_loc = get_double(kv.second["l_p_loc"], "lipschitz.l_p_loc");
            d.l_f_glob = get_double(kv.second["l_f_glob"], "lipschitz.l_f_glob");
            d.l_f_loc = get_double(kv.second["l_f_loc"], "lipschitz.l_f_loc");
            spec.lipschitz = d;
        } else {
            config_error(k, "unknown key in dense model spec");
        }
    }
    return spec;
}

MeanFieldModel build_model(const ModelRef& ref) {
    if (ref.builtin_two_state) return build_two_state(ref.two_state);
    return load_dense_model(parse_dense_spec(ref.dense_path));
}

ComparisonTable compare_to_exact(const SimplexDist& mu, const QTable& q,
                                 const LocalFamily& locals, const SolutionTriple& exact) {
    if (q.nx != exact.q_star.nx || q.na != exact.q_star.na ||
        mu.size() != exact.mu_star.size())
        throw std::invalid_argument("compare_to_exact: dimension mismatch");
    ComparisonTable c;
    c.q_error = QTable(q.nx, q.na);
    for (int x = 0; x < q.nx; ++x) {
        for (int a = 0; a < q.na; ++a) {
            c.q_error(x, a) = std::abs(q(x, a) - exact.q_star(x, a));
            c.max_q_error = std::max(c.max_q_error, c.q_error(x, a));
        }
    }
    c.mu_error.resize(mu.size());
    for (int y = 0; y < mu.size(); ++y) {
        c.mu_error[y] = std::abs(mu[y] - exact.mu_star[y]);
        c.max_mu_error = std::max(c.max_mu_error, c.mu_error[y]);
    }
    for (int x = 0; x < locals.nx; ++x)
        for (int a = 0; a < locals.na; ++a)
            c.max_local_error =
                std::max(c.max_local_error, locals.at(x, a).l1_distance(exact.locals_star.at(x, a)));
    return c;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    if (traj.empty()) throw std::invalid_argument("write_trajectory_csv: empty trajectory");
    const int nx = traj.front().mu.size();
    const int na = traj.front().q.na;
    out << "step";
    for (int y = 0; y < nx; ++y) out << ",mu_" << y;
    for (int x = 0; x < nx; ++x)
        for (int a = 0; a < na; ++a) out << ",q_" << x << "_" << a;
    for (int x = 0; x < nx; ++x)
        for (int a = 0; a < na; ++a)
            for (int y = 0; y < nx; ++y) out << ",local_" << x << "_" << a << "_" << y;
    out << "\n";
    for (const auto& row : traj) {
        out << row.step;
        for (int y = 0; y < nx; ++y) out << "," << fmt17(row.mu[y]);
        for (int x = 0; x < nx; ++x)
            for (int a = 0; a < na; ++a) out << "," << fmt17(row.q(x, a));
        for (int x = 0; x < nx; ++x)
            for (int a = 0; a < na; ++a)
                for (int y = 0; y < nx; ++y) out << "," << fmt17(row.locals.at(x, a)[y]);
        out << "\n";
        out.flush();
    }
}

std::string format_report(const RunReport& r) {
    std::ostringstream os;
    os << "mode: " << mode_name(r.mode) << "\n";
    os << "seed: " << r.seed << "\n";
    os << "mu:";
    for (int y = 0; y < r.mu.size(); ++y) os << " " << fmt17(r.mu[y]);
    os << "\n";
    os << "q:\n";
    for (int x = 0; x < r.q.nx; ++x) {
        os << "  x=" << x << ":";
        for (int a = 0; a < r.q.na; ++a) os << " " << fmt17(r.q(x, a));
        os << "\n";
    }
    os << "locals:\n";
    for (int x = 0; x < r.locals.nx; ++x) {
        for (int a = 0; a < r.locals.na; ++a) {
            os << "  (" << x << "," << a << "):";
            for (int y = 0; y < r.locals.nx; ++y) os << " " << fmt17(r.locals.at(x, a)[y]);
            os << "\n";
        }
    }
    if (r.comparison) {
        const auto& c = *r.comparison;
        os << "comparison (absolute error vs exact):\n";
        for (int x = 0; x < c.q_error.nx; ++x) {
            os << "  q x=" << x << ":";
            for (int a = 0; a < c.q_error.na; ++a) os << " " << fmt17(c.q_error(x, a));
            os << "\n";
        }
        os << "  mu:";
        for (double v : c.mu_error) os << " " << fmt17(v);
        os << "\n";
        os << "  max_q_error: " << fmt17(c.max_q_error) << "\n";
        os << "  max_mu_error: " << fmt17(c.max_mu_error) << "\n";
        os << "  max_local_error: " << fmt17(c.max_local_error) << "\n";
    }
    if (r.constants) {
        const auto& s = *r.constants;
        os << "structural constants:\n";
        os << "  c_min: " << fmt17(s.c_min) << "\n";
        os << "  l_p_glob: " << fmt17(s.l_p_glob) << "  l_p_loc: " << fmt17(s.l_p_loc) << "\n";
        os << "  l_f_glob: " << fmt17(s.l_f_glob) << "  l_f_loc: " << fmt17(s.l_f_loc) << "\n";
        os << "  action_gap: " << fmt17(s.action_gap) << "\n";
    }
    if (r.assumptions) {
        const auto& a = *r.assumptions;
        auto line = [&](const char* name, const AssumptionVerdict& v) {
            os << "  " << name << ": " << (v.holds ? "holds" : "VIOLATED") << " (lhs "
               << fmt17(v.lhs) << " vs threshold " << fmt17(v.threshold) << ")\n";
        };
        os << "assumptions:\n";
        line("contraction_loc", a.contraction_loc);
        line("contraction_glob", a.contraction_glob);
        line("phi_bound", a.phi_bound);
    }
    os << "elapsed_seconds: " << fmt17(r.seconds) << "\n";
    return os.str();
}

std::vector<RunReport> run_experiment(const ExperimentConfig& cfg) {
    const MeanFieldModel model = build_model(cfg.model);
    check_exponents(cfg.exponents);

    std::string out_dir = cfg.out_dir;
    if (out_dir.empty()) {
        const char* env = std::getenv("MFCG_OUT_DIR");
        out_dir = env && *env ? env : ".";
    }
    std::filesystem::create_directories(out_dir);

    // The exact oracle for comparisons, when one exists for this model.
    std::optional<SolutionTriple> exact;
    if (cfg.model.builtin_two_state) {
        try {
            exact = two_state_exact(cfg.model.two_state);
        } catch (const std::invalid_argument&) {
            // outside the closed-form regime; no comparison column
        }
    }

    auto paths_for = [&](std::uint64_t seed, RunReport& r) {
        const std::string stem =
            out_dir + "/run_" + mode_name(cfg.mode) + "_seed" + std::to_string(seed);
        r.csv_path = stem + ".csv";
        r.report_path = stem + ".report.txt";
    };

    std::vector<RunReport> reports;

    if (cfg.mode == RunMode::Sync || cfg.mode == RunMode::Async) {
        reports.resize(cfg.seeds.size());
        std::vector<std::exception_ptr> errs(cfg.seeds.size());
        std::vector<std::thread> workers;
        for (size_t i = 0; i < cfg.seeds.size(); ++i) {
            reports[i].mode = cfg.mode;
            reports[i].seed = cfg.seeds[i];
            paths_for(cfg.seeds[i], reports[i]);
            workers.emplace_back([&, i] {
                try {
                    run_worker(model, cfg, cfg.seeds[i], reports[i]);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            });
        }
        for (auto& w : workers) w.join();
        for (const auto& e : errs)
            if (e) std::rethrow_exception(e);
    } else {
        RunReport r;
        r.mode = cfg.mode;
        r.seed = cfg.seeds.front();
        paths_for(r.seed, r);
        const auto t0 = std::chrono::steady_clock::now();
        if (cfg.mode == RunMode::Ideal) {
            auto [state, traj] = run_ideal(model, cfg.exponents, cfg.n_steps, cfg.trace_every);
            traj.push_back({state.step, state.mu, state.q, state.locals});
            r.mu = state.mu;
            r.q = state.q;
            r.locals = state.locals;
            write_trajectory_csv(r.csv_path, traj);
        } else if (cfg.mode == RunMode::Exact) {
            SolutionTriple sol = solve_global_gase(model, cfg.tolerance);
            sol = extract_solution(model, sol.mu_star_phi, sol.q_star_phi, sol.locals_star_phi,
                                   cfg.tolerance);
            r.mu = sol.mu_star;
            r.q = sol.q_star;
            r.locals = sol.locals_star;
            write_trajectory_csv(r.csv_path, {{0, r.mu, r.q, r.locals}});
        } else { // Check
            r.csv_path.clear(); // verdicts only, no trajectory
            QTable ref;
            const QTable* refp = nullptr;
            try {
                ref = solve_q_gase(model, SimplexDist::uniform(model.dims.n_states), cfg.tolerance);
                refp = &ref;
            } catch (const IterationLimitError&) {
                // no reference table; the gap stays at +inf
            }
            r.constants = structural_constants(model, 200, refp);
            r.assumptions = check_assumptions(*r.constants, model);
            r.mu = SimplexDist::uniform(model.dims.n_states);
            r.q = QTable(model.dims.n_states, model.dims.n_actions);
            r.locals = LocalFamily(model.dims.n_states, model.dims.n_actions, r.mu);
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        reports.push_back(std::move(r));
    }

    for (auto& r : reports) {
        if (exact && cfg.mode != RunMode::Check)
            r.comparison = compare_to_exact(r.mu, r.q, r.locals, *exact);
        std::ofstream rep(r.report_path);
        if (!rep) throw std::runtime_error("cannot open report file '" + r.report_path + "'");
        rep << format_report(r);
    }
    return reports;
}

} // namespace mfcg
