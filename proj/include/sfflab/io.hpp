#pragma once

#include <string>

#include <json.hpp>

#include "sfflab/config.hpp"
#include "sfflab/protocol.hpp"
#include "sfflab/rydberg.hpp"
#include "sfflab/sff.hpp"

namespace sfflab {

// CSV schema: time,K,stderr,n_disorder. Written with full double precision;
// every writer re-parses its own output before returning.
std::string curve_to_csv(const SffCurve& curve);
SffCurve curve_from_csv(const std::string& text);
void write_curve_csv(const std::string& path, const SffCurve& curve);

// JSON form carries the full metadata block next to the arrays.
nlohmann::json curve_to_json(const SffCurve& curve);
void write_curve_json(const std::string& path, const SffCurve& curve);

// CSV schema: pair_i,pair_j,distance_um,J_xy,J_z,beta,Jp_xy,Jp_z
std::string couplings_to_csv(const RingModel& model, const RingGeometry& geom);
void write_couplings_csv(const std::string& path, const RingModel& model,
                         const RingGeometry& geom);

nlohmann::json budget_to_json(const RydbergConfig& cfg, const RingGeometry& geom,
                              const RingModel& model, const DecoherenceBudget& b);

nlohmann::json manifest_json(const std::string& command, const Config& resolved,
                             const ExperimentResult* result, double wall_seconds);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace sfflab
