// io.hpp - CSV and JSON artifacts: results, plot data, run manifests
#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "nanolase/experiments.hpp"
#include "nanolase/fit.hpp"

namespace nanolase::io {

using json = nlohmann::json;

inline constexpr const char* kToolName = "nanolase";
inline constexpr const char* kToolVersion = "0.1.0";

// strict (unknown keys rejected) JSON <-> struct mapping; all physical
// quantities carry an SI unit suffix in the key name
json params_to_json(const LaserParams& p);
LaserParams params_from_json(const json& j, const LaserParams& base);
json pump_to_json(const PumpProfile& pump);
PumpProfile pump_from_json(const json& j);

void write_text_file(const std::string& path, const std::string& content);
std::string format_double(double v);  // shortest round-trip-exact decimal

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const LaserParams& p);
void write_ll_csv(const std::string& path, const LLCurve& ll);

// measured LL data: header row with pump_W and light_arb (or light_out_W)
LLCurve read_ll_csv(const std::string& path, LLRegime regime);

json ll_plot_json(const LLCurve& ll, const std::optional<ThresholdFit>& fit);
json trajectory_plot_json(const Trajectory& traj, const LaserParams& p);

json make_manifest(const std::string& command, const json& resolved_config,
                   const json& outputs, double rel_tol,
                   std::uint64_t params_hash);

}  // namespace nanolase::io
