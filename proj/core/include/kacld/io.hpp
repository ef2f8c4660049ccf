#pragma once

#include "kacld/cw.hpp"
#include "kacld/finite.hpp"
#include "kacld/kernel.hpp"
#include "kacld/torus.hpp"
#include "kacld/variational.hpp"

#include <string>

namespace kacld {

/// Shortest decimal that round-trips a double (17 significant digits max).
std::string format_double(double x);
double parse_double(const std::string& s);

/// Grid functions serialize as CSV (one value per node, row-major) and as
/// JSON objects {d, M, values}.
std::string to_csv(const GridFunction& f);
std::string to_json_string(const GridFunction& f);
GridFunction grid_function_from_csv(const TorusGrid& grid, const std::string& csv);
GridFunction grid_function_from_json(const std::string& json);

Profile profile_from_csv(const TorusGrid& grid, const std::string& csv);
Profile profile_from_json(const std::string& json);

/// Trajectories: time column plus one column per node.
std::string to_csv(const TrajectoryGrid& traj);

std::string to_json_string(const MinimizerReport& report);
std::string to_json_string(const ProfileClassification& c);
std::string to_json_string(const std::vector<TransitionFeature>& features);

std::string phase_diagram_csv(const PhaseDiagram& diagram);
std::string ldp_probe_csv(const LdpProbeResult& probe);
std::string sim_run_csv(const SimRun& run);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace kacld
