#include "kacld/config.hpp"

#include <stdexcept>

#include <json.hpp>

namespace kacld {

using nlohmann::json;

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

RunConfig RunConfig::from_json(const std::string& text) {
    const json j = json::parse(text);
    RunConfig c;
    if (j.contains("grid")) {
        read_if(j.at("grid"), "d", c.d);
        read_if(j.at("grid"), "M", c.m);
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        if (m.contains("kernel")) {
            const json& k = m.at("kernel");
            if (k.is_string()) {
                c.kernel_kind = k.get<std::string>();
            } else {
                c.kernel_kind = "values";
                c.kernel_values = k.at("values").get<std::vector<double>>();
            }
        }
        if (m.contains("field")) {
            const json& f = m.at("field");
            if (f.is_number()) {
                c.field_kind = "constant";
                c.field_constant = f.get<double>();
            } else {
                c.field_kind = "values";
                c.field_values = f.at("values").get<std::vector<double>>();
            }
        }
        read_if(m, "beta", c.beta);
        read_if(m, "beta_prime", c.beta_prime);
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        read_if(s, "damping", c.solver.damping);
        read_if(s, "max_iter", c.solver.max_iter);
        read_if(s, "tol", c.solver.tol);
        read_if(s, "residual_tol", c.solver.residual_tol);
        read_if(s, "gap_tol", c.solver.gap_tol);
        read_if(s, "seeds", c.solver.random_seeds);
        read_if(s, "seed", c.solver.seed);
    }
    if (j.contains("simulator")) {
        const json& s = j.at("simulator");
        read_if(s, "n", c.sim_n);
        read_if(s, "replicas", c.replicas);
        read_if(s, "seed", c.seed);
        read_if(s, "rate_scale", c.rate_scale);
        read_if(s, "sweeps", c.sweeps);
        read_if(s, "blocks", c.blocks);
    }
    read_if(j, "threads", c.threads);
    read_if(j, "output_dir", c.output_dir);
    c.solver.threads = c.threads;
    return c;
}

std::string RunConfig::to_json() const {
    json j;
    j["grid"] = {{"d", d}, {"M", m}};
    json kernel;
    if (kernel_kind == "values")
        kernel = json{{"values", kernel_values}};
    else
        kernel = kernel_kind;
    json field;
    if (field_kind == "values")
        field = json{{"values", field_values}};
    else
        field = field_constant;
    j["model"] = {{"kernel", kernel},
                  {"field", field},
                  {"beta", beta},
                  {"beta_prime", beta_prime}};
    j["solver"] = {{"damping", solver.damping}, {"max_iter", solver.max_iter},
                   {"tol", solver.tol},         {"residual_tol", solver.residual_tol},
                   {"gap_tol", solver.gap_tol}, {"seeds", solver.random_seeds},
                   {"seed", solver.seed}};
    j["simulator"] = {{"n", sim_n},   {"replicas", replicas}, {"seed", seed},
                      {"rate_scale", rate_scale}, {"sweeps", sweeps}, {"blocks", blocks}};
    j["threads"] = threads;
    j["output_dir"] = output_dir;
    return j.dump(2);
}

KacModel RunConfig::build_model() const {
    const TorusGrid g = grid();
    InteractionKernel kernel;
    if (kernel_kind == "constant")
        kernel = constant_kernel(g);
    else if (kernel_kind == "cosine-bump")
        kernel = cosine_bump_kernel(g);
    else if (kernel_kind == "values")
        kernel = InteractionKernel(g, kernel_values);
    else
        throw std::invalid_argument("unknown kernel kind: " + kernel_kind);

    ExternalField field;
    if (field_kind == "constant")
        field = ExternalField(g, field_constant);
    else if (field_kind == "values")
        field = ExternalField(g, field_values);
    else
        throw std::invalid_argument("unknown field kind: " + field_kind);

    return {std::move(kernel), std::move(field), beta, beta_prime};
}

LatticeModel RunConfig::build_lattice(int n) const {
    return {build_model(), n, rate_scale};
}

std::string sidecar_json(const RunConfig& config, const std::string& command,
                         const std::vector<std::pair<std::string, std::string>>& extras) {
    json j;
    j["command"] = command;
    j["config"] = json::parse(config.to_json());
    for (const auto& [k, v] : extras) j["facts"][k] = v;
    return j.dump(2);
}

} // namespace kacld
