#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "syncnet/numerics.hpp"
#include "syncnet/simulate.hpp"
#include "syncnet/synthesis.hpp"
#include "syncnet/sysmodel.hpp"
#include "syncnet/topology.hpp"

namespace syncnet::io {

using json = nlohmann::json;

/// {"name": ..., "rows": r, "cols": c, "data": [row-major values]}.
/// Throws InputError on any schema violation or non-finite value.
Mat matrix_from_json(const json& j);
json matrix_to_json(const Mat& m, const std::string& name = "");

/// Reads and parses a JSON file; InputError on I/O or syntax errors.
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

/// {"A": MatrixFile, "C": MatrixFile}; either member may also be a path to
/// a MatrixFile relative to `base_dir`.
LinearSystem system_from_json(const json& j, const std::filesystem::path& base_dir = {});
json system_to_json(const LinearSystem& sys);

/// A MatrixFile, or {"lambda": MatrixFile}.
Mat lambda_from_json(const json& j, const std::filesystem::path& base_dir = {});

struct ScenarioOptions {
  bool allow_disconnected = false;
  std::optional<std::uint64_t> seed_override;
};

struct ParsedScenario {
  Scenario scenario;
  bool emit_states = false;
  // Set when the gain came from synthesis.
  std::optional<GainSynthesis> synthesis;
};

/// Builds a validated Scenario. Schema problems raise InputError; synthesis
/// failures propagate as their own domain errors.
ParsedScenario scenario_from_json(const json& j, const std::filesystem::path& base_dir,
                                  const ScenarioOptions& opts = {});

/// One row per step: k, sync_error, disagreement, then (optionally) the
/// flattened agent states x<i>_<j>. State cells are left empty on rows that
/// are not snapshots.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace,
                     const Scenario& scenario, bool emit_states);

json trace_summary(const SimulationTrace& trace, const Scenario& scenario);

json assumption_report_to_json(const AssumptionReport& report);
json connectivity_report_to_json(const ConnectivityReport& report);
json synthesis_to_json(const GainSynthesis& g, const LinearSystem& sys,
                       const SynthesisOptions& opts);

/// printf("%.17g") formatting used for CSV cells.
std::string format_double(double v);

}  // namespace syncnet::io
