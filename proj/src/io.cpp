#include "sfflab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sfflab/errors.hpp"

namespace sfflab {

namespace {

constexpr char kVersion[] = "sff-lab 0.1.0";

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string curve_to_csv(const SffCurve& curve) {
    std::ostringstream os;
    os << "time,K,stderr,n_disorder\n";
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        os << fmt(curve.times[i]) << ',' << fmt(curve.k[i]) << ','
           << fmt(curve.stderr_k[i]) << ',' << curve.meta.n_disorder << '\n';
    return os.str();
}

SffCurve curve_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) !=
            std::vector<std::string>{"time", "K", "stderr", "n_disorder"})
        throw config_error("curve CSV: bad header");
    SffCurve c;
    double prev = -1e300;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4) throw config_error("curve CSV: expected 4 columns");
        const double t = std::stod(f[0]), k = std::stod(f[1]), se = std::stod(f[2]);
        if (!(t > prev)) throw config_error("curve CSV: times not strictly increasing");
        prev = t;
        c.times.push_back(t);
        c.k.push_back(k);
        c.stderr_k.push_back(se);
        c.meta.n_disorder = std::stoi(f[3]);
    }
    if (c.times.empty()) throw config_error("curve CSV: no rows");
    return c;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write file: " + path);
    out << text;
    if (!out) throw config_error("write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_curve_csv(const std::string& path, const SffCurve& curve) {
    const std::string text = curve_to_csv(curve);
    curve_from_csv(text);  // self-validation before anything touches disk
    write_text(path, text);
}

nlohmann::json curve_to_json(const SffCurve& curve) {
    nlohmann::json j;
    j["times"] = curve.times;
    j["k"] = curve.k;
    j["stderr"] = curve.stderr_k;
    j["meta"]["n_disorder"] = curve.meta.n_disorder;
    j["meta"]["n_shots"] = curve.meta.n_shots;
    j["meta"]["n_reuse"] = curve.meta.n_reuse;
    j["meta"]["filter"] = curve.meta.filter;
    j["meta"]["model_hash"] = curve.meta.model_hash;
    return j;
}

void write_curve_json(const std::string& path, const SffCurve& curve) {
    write_text(path, curve_to_json(curve).dump(2) + "\n");
}

std::string couplings_to_csv(const RingModel& model, const RingGeometry& geom) {
    std::ostringstream os;
    os << "pair_i,pair_j,distance_um,J_xy,J_z,beta,Jp_xy,Jp_z\n";
    const int L = model.sites;
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j) {
            const std::size_t a = static_cast<std::size_t>(i) * L + j;
            os << i << ',' << j << ',' << fmt(geom.chord(i, j)) << ','
               << fmt(model.j_xy[a]) << ',' << fmt(model.j_z[a]) << ','
               << fmt(model.beta[a]) << ',' << fmt(model.jp_xy[a]) << ','
               << fmt(model.jp_z[a]) << '\n';
        }
    return os.str();
}

void write_couplings_csv(const std::string& path, const RingModel& model,
                         const RingGeometry& geom) {
    write_text(path, couplings_to_csv(model, geom));
}

nlohmann::json budget_to_json(const RydbergConfig& cfg, const RingGeometry& geom,
                              const RingModel& model, const DecoherenceBudget& b) {
    nlohmann::json j;
    j["kappa1"] = b.kappa1;
    j["kappa2"] = b.kappa2;
    j["kappa3"] = b.kappa3;
    j["kappa3_analytic"] = b.kappa3_analytic;
    j["h_spin_range_mhz"] = b.h_range;
    j["hp_spin_range_mhz"] = b.hp_range;
    // |H_spin| back-solved from kappa1 (= gamma_d'/kappa1); printed so the
    // scale can be checked against reference numbers
    j["implied_h_spin_mhz"] = b.kappa1 > 0.0 ? cfg.gamma_d_prime / b.kappa1 : 0.0;
    j["t_coh_us"] = b.t_coh_us;
    j["t_coh_inv_j"] = b.t_coh_inv_j;
    j["blockade_radius_um"] = b.blockade_radius;
    j["j_unit_mhz"] = model.j_unit;
    j["delta_offset_mhz"] = model.delta_offset;
    j["l_max"] = max_ring_atoms(geom.r_c, 0.75 * b.blockade_radius);
    j["warnings"] = model.warnings;
    return j;
}

nlohmann::json manifest_json(const std::string& command, const Config& resolved,
                             const ExperimentResult* result, double wall_seconds) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["command"] = command;
    j["resolved_config"] = resolved.resolved();
    j["wall_time_seconds"] = wall_seconds;
    if (result) {
        j["complete"] = result->complete;
        j["dim"] = result->dim;
        j["n_failed"] = result->n_failed;
        j["mean_p_mc"] = result->mean_p_mc;
        j["tau_h_estimate"] = result->mean_tau_h_estimate;
        j["k_inf_estimate"] = result->mean_k_inf_estimate;
        j["tau_h_spectral"] = result->mean_tau_h_spectral;
        j["k_inf_filter"] = result->mean_k_inf_filter;
        j["k_star"] = result->k_star_threshold;
        j["n_run_per_point_formula"] = result->n_run_per_point_formula;
        j["n_run_per_point_actual"] = result->n_run_per_point_actual;
        nlohmann::json reals = nlohmann::json::array();
        for (const auto& r : result->realizations) {
            nlohmann::json e;
            e["seed"] = r.seed;
            if (r.failed) {
                e["error"] = r.error;
            } else {
                e["p_mc"] = r.p_mc;
                e["t0"] = r.t0;
                e["delta"] = r.delta;
                e["tau_h_estimate"] = r.tau_h_estimate;
                e["k_inf_estimate"] = r.k_inf_estimate;
                e["prep_attempts"] = r.prep_attempts;
                e["prep_successes"] = r.prep_successes;
                if (r.coherence_budget_exceeded) e["coherence_budget_exceeded"] = true;
            }
            reals.push_back(std::move(e));
        }
        j["realizations"] = std::move(reals);
    }
    return j;
}

}  // namespace sfflab
