#include "kacld/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace kacld {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    if (res.ec != std::errc{}) throw std::runtime_error("double formatting failed");
    return {buf, res.ptr};
}

double parse_double(const std::string& s) {
    double out = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{}) throw std::invalid_argument("malformed number: " + s);
    return out;
}

std::string to_csv(const GridFunction& f) {
    std::string out;
    out.reserve(f.values.size() * 20);
    for (double v : f.values) {
        out += format_double(v);
        out += '\n';
    }
    return out;
}

std::string to_json_string(const GridFunction& f) {
    json j;
    j["d"] = f.grid.dim;
    j["M"] = f.grid.points_per_axis;
    j["values"] = f.values;
    return j.dump(2);
}

GridFunction grid_function_from_csv(const TorusGrid& grid, const std::string& csv) {
    std::vector<double> values;
    values.reserve(grid.node_count());
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        values.push_back(parse_double(line));
    }
    return {grid, std::move(values)};
}

GridFunction grid_function_from_json(const std::string& text) {
    const json j = json::parse(text);
    const TorusGrid grid(j.at("d").get<int>(), j.at("M").get<int>());
    return {grid, j.at("values").get<std::vector<double>>()};
}

Profile profile_from_csv(const TorusGrid& grid, const std::string& csv) {
    GridFunction f = grid_function_from_csv(grid, csv);
    return {f.grid, std::move(f.values)};
}

Profile profile_from_json(const std::string& text) {
    GridFunction f = grid_function_from_json(text);
    return {f.grid, std::move(f.values)};
}

std::string to_csv(const TrajectoryGrid& traj) {
    std::string out = "time";
    for (std::size_t u = 0; u < traj.grid.node_count(); ++u)
        out += ",node_" + std::to_string(u);
    out += '\n';
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out += format_double(traj.times[k]);
        for (double v : traj.profiles[k].values) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::string to_json_string(const MinimizerReport& report) {
    json j;
    j["t"] = report.t;
    j["alpha_prime"] = report.alpha_prime.values;
    j["unique"] = report.unique;
    j["gap"] = std::isfinite(report.gap) ? json(report.gap) : json("inf");
    j["global_set"] = report.global_set;
    j["seeds_used"] = report.seeds_used;
    j["seeds_converged"] = report.seeds_converged;
    j["critical_profiles"] = json::array();
    for (const auto& cp : report.critical_profiles) {
        json e;
        e["cost"] = cp.cost;
        e["residual"] = cp.residual;
        e["profile"] = cp.profile.values;
        j["critical_profiles"].push_back(std::move(e));
    }
    return j.dump(2);
}

std::string to_json_string(const ProfileClassification& c) {
    json j;
    j["t"] = c.t;
    j["alpha_prime_ref"] = c.alpha_prime.values;
    j["verdict"] = to_string(c.verdict);
    j["minimizer_count"] = c.minimizer_count;
    j["certificate"] = {{"certified", c.certificate.certified},
                        {"lipschitz_bound", std::isfinite(c.certificate.lipschitz_bound)
                                                ? json(c.certificate.lipschitz_bound)
                                                : json("inf")},
                        {"enclosure_sweeps", c.certificate.enclosure_sweeps}};
    j["witnesses"] = json::array();
    for (const auto& w : c.witnesses)
        j["witnesses"].push_back({{"u", w.node},
                                  {"limit_plus_side", w.limit_plus_side},
                                  {"limit_minus_side", w.limit_minus_side}});
    if (!c.kernel_values.empty()) {
        json kv = json::array();
        for (const auto& k : c.kernel_values) kv.push_back({k.p_plus, k.p_minus});
        j["kernel_values"] = std::move(kv);
    }
    if (!c.note.empty()) j["note"] = c.note;
    return j.dump(2);
}

std::string to_json_string(const std::vector<TransitionFeature>& features) {
    json j = json::array();
    for (const auto& f : features)
        j.push_back({{"label", f.label},
                     {"t", f.t},
                     {"bad_set_before", f.bad_set_before},
                     {"bad_set_after", f.bad_set_after}});
    return j.dump(2);
}

std::string phase_diagram_csv(const PhaseDiagram& diagram) {
    std::string out = "t,m_prime,multiplicity,global_min_1,global_min_2,cost\n";
    for (const auto& c : diagram.cells) {
        out += format_double(c.t);
        out += ',';
        out += format_double(c.m_prime);
        out += ',';
        out += std::to_string(c.multiplicity);
        out += ',';
        out += format_double(c.global_min_1);
        out += ',';
        out += std::isnan(c.global_min_2) ? "nan" : format_double(c.global_min_2);
        out += ',';
        out += format_double(c.cost);
        out += '\n';
    }
    return out;
}

std::string ldp_probe_csv(const LdpProbeResult& probe) {
    std::string out = "n,value,exact,std_error,variational_value,static_infimum\n";
    for (const auto& r : probe.rows) {
        out += std::to_string(r.n);
        out += ',';
        out += format_double(r.value);
        out += ',';
        out += r.exact ? "1" : "0";
        out += ',';
        out += format_double(r.std_error);
        out += ',';
        out += format_double(probe.variational_value);
        out += ',';
        out += format_double(probe.static_infimum);
        out += '\n';
    }
    return out;
}

std::string sim_run_csv(const SimRun& run) {
    std::string out = "time";
    for (int b = 0; b < run.blocks; ++b) out += ",block_" + std::to_string(b);
    out += '\n';
    for (const auto& s : run.samples) {
        out += format_double(s.time);
        for (double v : s.block_means) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

} // namespace kacld
