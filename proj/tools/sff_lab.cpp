#include <atomic>
#include <chrono>
#include <csignal>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfflab/config.hpp"
#include "sfflab/errors.hpp"
#include "sfflab/io.hpp"
#include "sfflab/protocol.hpp"
#include "sfflab/rydberg.hpp"
#include "sfflab/sff.hpp"

namespace {

std::atomic<bool> g_cancel{false};

void on_interrupt(int) { g_cancel.store(true); }

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    int workers = 0;
    std::uint64_t seed_override = 0;
    bool has_seed_override = false;
};

void add_common(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "experiment config file")->required();
    cmd->add_option("--out-dir", opt.out_dir, "output directory");
    cmd->add_option("--workers", opt.workers, "worker threads (default: hardware)");
    cmd->add_option("--seed", opt.seed_override, "override [plan] master_seed")
        ->each([&opt](const std::string&) { opt.has_seed_override = true; });
}

std::string out_path(const CliOptions& opt, const std::string& prefix,
                     const std::string& suffix) {
    std::filesystem::create_directories(opt.out_dir);
    return (std::filesystem::path(opt.out_dir) / (prefix + suffix)).string();
}

sfflab::Config load_config(CliOptions& opt) {
    sfflab::Config cfg = sfflab::Config::load(opt.config_path);
    if (opt.has_seed_override)
        cfg.set("plan", "master_seed", std::to_string(opt.seed_override));
    return cfg;
}

sfflab::SpinModelSpec read_model(sfflab::Config& cfg) {
    sfflab::SpinModelSpec m;
    m.sites = static_cast<int>(cfg.integer("model", "l"));
    m.delta = cfg.num_or("model", "delta", 0.8);
    m.j2 = cfg.num_or("model", "j2", 0.02);
    m.delta2 = cfg.num_or("model", "delta2", 0.06);
    m.w = cfg.num_or("model", "w", 0.0);
    m.validate();
    return m;
}

sfflab::ShotPlan read_plan(sfflab::Config& cfg) {
    sfflab::ShotPlan p;
    p.shots = static_cast<int>(cfg.integer_or("plan", "n", 100));
    p.disorders = static_cast<int>(cfg.integer_or("plan", "n_disorder", 20));
    p.reuse = static_cast<int>(cfg.integer_or("plan", "n_reuse", 10));
    p.master_seed = cfg.u64_or("plan", "master_seed", 1);
    p.validate();
    return p;
}

std::vector<double> read_grid(sfflab::Config& cfg) {
    const double t_min = cfg.num("grid", "t_min");
    const double t_max = cfg.num("grid", "t_max");
    const int points = static_cast<int>(cfg.integer("grid", "points"));
    const std::string spacing = cfg.str_or("grid", "spacing", "log");
    if (spacing != "log" && spacing != "linear")
        throw sfflab::config_error("grid: spacing must be log or linear");
    return sfflab::TimeGrid::make(t_min, t_max, points,
                                  spacing == "log" ? sfflab::TimeGrid::Spacing::log
                                                   : sfflab::TimeGrid::Spacing::linear);
}

int run_sff(CliOptions& opt, bool measure) {
    using namespace sfflab;
    Config cfg = load_config(opt);
    ExperimentSpec spec;
    spec.kind = ModelKind::heisenberg;
    const std::string kind = cfg.str_or("model", "kind", "heisenberg");
    if (kind != "heisenberg")
        throw config_error("sff-exact/sff-measure run the heisenberg model; "
                           "use the floquet command for '" + kind + "'");
    spec.model = read_model(cfg);
    const std::string law = cfg.str_or("model", "disorder_law", "uniform");
    if (law != "uniform")
        throw config_error("the Sz-sector protocol needs the uniform z-field law");
    spec.law = DisorderLaw::uniform;
    spec.prep.steps = static_cast<int>(cfg.integer_or("prep", "m", 3));
    spec.prep.t0 = cfg.num_or_auto("prep", "t0");
    spec.prep.center = cfg.num_or_auto("prep", "delta");
    spec.plan = read_plan(cfg);
    spec.times = read_grid(cfg);
    spec.measure = measure;
    spec.t_coh = cfg.num_or("plan", "t_coh", 0.0);
    const std::string exact_filter = cfg.str_or("sff", "exact_filter", "pea");
    if (exact_filter == "gaussian")
        spec.exact_filter = ExactFilter::gaussian_sixth;
    else if (exact_filter != "pea")
        throw config_error("sff: exact_filter must be pea or gaussian");
    const std::string prefix =
        cfg.str_or("output", "prefix", measure ? "sff_measure" : "sff_exact");
    const bool clamp = cfg.str_or("output", "clamp_negative", "false") == "true";
    cfg.reject_unknown();

    const auto start = std::chrono::steady_clock::now();
    ExperimentResult res = run_experiment(spec, opt.workers, &g_cancel);
    const double wall = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();

    write_curve_csv(out_path(opt, prefix, "_exact.csv"), res.exact);
    write_curve_json(out_path(opt, prefix, "_exact.json"), res.exact);
    if (measure) {
        if (clamp)  // presentation option; the unclamped estimator is unbiased
            for (double& k : res.measured.k) k = std::max(k, 0.0);
        write_curve_csv(out_path(opt, prefix, "_measured.csv"), res.measured);
        write_curve_json(out_path(opt, prefix, "_measured.json"), res.measured);
    }
    nlohmann::json man = manifest_json(measure ? "sff-measure" : "sff-exact", cfg, &res, wall);
    write_text(out_path(opt, prefix, "_manifest.json"), man.dump(2) + "\n");
    std::cerr << prefix << ": " << res.realizations.size() << " realizations ("
              << res.n_failed << " failed) in " << wall << " s\n";
    if (!res.complete) {
        std::cerr << "interrupted: partial results written\n";
        return 4;
    }
    return 0;
}

int run_floquet(CliOptions& opt) {
    using namespace sfflab;
    Config cfg = load_config(opt);
    ExperimentSpec spec;
    spec.kind = parse_model_kind(cfg.str("model", "kind"));
    if (!spec.is_floquet())
        throw config_error("floquet: model kind must be floquet-heisenberg or kicked-ising-*");
    spec.model.sites = static_cast<int>(cfg.integer("model", "l"));
    spec.model.w = 0.0;
    spec.theta = cfg.num("model", "theta");
    if (!(spec.theta > 0.0)) throw config_error("model: theta must be > 0");
    spec.law = spec.kind == ModelKind::floquet_heisenberg ? DisorderLaw::normal
                                                          : DisorderLaw::uniform;
    spec.plan = read_plan(cfg);
    spec.plan.reuse = 1;  // no preparation to recycle
    const int t_max = static_cast<int>(cfg.integer("grid", "t_max"));
    spec.times = TimeGrid::integer_steps(t_max);
    spec.measure = true;
    const std::string sampling = cfg.str_or("plan", "sampling", "eigenbasis");
    if (sampling == "eigenbasis") spec.sampling = FloquetSampling::eigenbasis;
    else if (sampling == "product-state") spec.sampling = FloquetSampling::product_state;
    else throw config_error("plan: sampling must be eigenbasis or product-state");
    const std::string prefix = cfg.str_or("output", "prefix", "floquet");
    cfg.reject_unknown();

    const auto start = std::chrono::steady_clock::now();
    ExperimentResult res = run_experiment(spec, opt.workers, &g_cancel);
    const double wall = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();

    write_curve_csv(out_path(opt, prefix, "_exact.csv"), res.exact);
    write_curve_json(out_path(opt, prefix, "_exact.json"), res.exact);
    write_curve_csv(out_path(opt, prefix, "_measured.csv"), res.measured);
    write_curve_json(out_path(opt, prefix, "_measured.json"), res.measured);
    RmtParams p;
    p.dim = res.dim;
    write_curve_csv(out_path(opt, prefix, "_coe.csv"),
                    rmt_baseline(RmtEnsemble::coe, p, spec.times));
    write_curve_csv(out_path(opt, prefix, "_cue.csv"),
                    rmt_baseline(RmtEnsemble::cue, p, spec.times));
    nlohmann::json man = manifest_json("floquet", cfg, &res, wall);
    write_text(out_path(opt, prefix, "_manifest.json"), man.dump(2) + "\n");
    if (!res.complete) {
        std::cerr << "interrupted: partial results written\n";
        return 4;
    }
    return 0;
}

int run_rmt(CliOptions& opt) {
    using namespace sfflab;
    Config cfg = load_config(opt);
    const RmtEnsemble e = parse_ensemble(cfg.str("rmt", "ensemble"));
    RmtParams p;
    if (e == RmtEnsemble::coe || e == RmtEnsemble::cue) {
        p.dim = static_cast<int>(cfg.integer("rmt", "dim"));
    } else {
        p.tau_h = cfg.num("rmt", "tau_h");
        p.k_inf = cfg.num("rmt", "k_inf");
    }
    const std::vector<double> grid = read_grid(cfg);
    const std::string prefix = cfg.str_or("output", "prefix", "rmt");
    cfg.reject_unknown();
    write_curve_csv(out_path(opt, prefix, "_" + ensemble_name(e) + ".csv"),
                    rmt_baseline(e, p, grid));
    nlohmann::json man = manifest_json("rmt", cfg, nullptr, 0.0);
    write_text(out_path(opt, prefix, "_manifest.json"), man.dump(2) + "\n");
    return 0;
}

struct RydbergInputs {
    sfflab::RydbergConfig cfg;
    sfflab::RingGeometry geom;
    double electronic_offset = 0.0;
};

RydbergInputs read_rydberg(sfflab::Config& cfg) {
    RydbergInputs in;
    in.cfg.c6 = cfg.num("rydberg", "c6");
    in.cfg.c6_tilde = cfg.num("rydberg", "c6_tilde");
    in.cfg.c6_prime = cfg.num("rydberg", "c6_prime");
    in.cfg.detuning = cfg.num("rydberg", "delta_mhz");
    in.cfg.xi = cfg.num("rydberg", "xi");
    in.cfg.delta_b = cfg.num_or("rydberg", "delta_b", 0.0);
    in.cfg.gamma_d = cfg.num_or("rydberg", "gamma_d", 0.0);
    in.cfg.gamma_d_prime = cfg.num_or("rydberg", "gamma_d_prime", 0.0);
    in.geom.sites = static_cast<int>(cfg.integer("rydberg", "l"));
    in.geom.radius = cfg.num("rydberg", "radius");
    in.geom.r_c = cfg.num_or("rydberg", "r_c", 2.4);
    in.geom.r_c_prime = cfg.num_or("rydberg", "r_c_prime", 0.0);
    in.electronic_offset = cfg.num_or("rydberg", "electronic_offset", 0.0);
    return in;
}

int run_rydberg(CliOptions& opt, bool with_couplings) {
    using namespace sfflab;
    Config cfg = load_config(opt);
    RydbergInputs in = read_rydberg(cfg);
    const std::string prefix =
        cfg.str_or("output", "prefix", with_couplings ? "rydberg" : "budget");
    cfg.reject_unknown();

    const RingModel model = build_ring_model(in.cfg, in.geom, in.electronic_offset);
    for (const std::string& w : model.warnings) std::cerr << "warning: " << w << "\n";
    if (with_couplings)
        write_couplings_csv(out_path(opt, prefix, "_couplings.csv"), model, in.geom);
    const DecoherenceBudget budget = decoherence_budget(in.cfg, in.geom, model);
    write_text(out_path(opt, prefix, "_budget.json"),
               budget_to_json(in.cfg, in.geom, model, budget).dump(2) + "\n");
    nlohmann::json man = manifest_json(with_couplings ? "rydberg-couplings" : "budget",
                                       cfg, nullptr, 0.0);
    write_text(out_path(opt, prefix, "_manifest.json"), man.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    // worker-level parallelism only; keeps results independent of BLAS threading
    setenv("OPENBLAS_NUM_THREADS", "1", 0);
    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);

    CLI::App app{"sff-lab: spectral form factor measurement protocol simulator"};
    app.require_subcommand(1);

    CliOptions opt;
    auto* sff_exact = app.add_subcommand("sff-exact", "disorder-averaged exact SFF curves");
    auto* sff_measure = app.add_subcommand("sff-measure", "shot-faithful simulated measurement");
    auto* floquet = app.add_subcommand("floquet", "Floquet model SFF with COE/CUE baselines");
    auto* rmt = app.add_subcommand("rmt", "RMT baseline curves");
    auto* rydberg = app.add_subcommand("rydberg-couplings", "dressed coupling tables + budget");
    auto* budget = app.add_subcommand("budget", "decoherence budget only");
    for (auto* c : {sff_exact, sff_measure, floquet, rmt, rydberg, budget})
        add_common(c, opt);

    try {
        app.parse(argc, argv);
        if (sff_exact->parsed()) return run_sff(opt, false);
        if (sff_measure->parsed()) return run_sff(opt, true);
        if (floquet->parsed()) return run_floquet(opt);
        if (rmt->parsed()) return run_rmt(opt);
        if (rydberg->parsed()) return run_rydberg(opt, true);
        if (budget->parsed()) return run_rydberg(opt, false);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const sfflab::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const sfflab::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
