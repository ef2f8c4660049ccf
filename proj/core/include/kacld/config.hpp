#pragma once

#include "kacld/finite.hpp"
#include "kacld/torus.hpp"
#include "kacld/variational.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace kacld {

/// Effective run configuration; serialized into every output sidecar so runs
/// are reproducible byte for byte.
struct RunConfig {
    int d = 1;
    int m = 64;

    std::string kernel_kind = "cosine-bump"; // constant | cosine-bump | values
    std::vector<double> kernel_values;
    std::string field_kind = "constant"; // constant | values
    double field_constant = 0.0;
    std::vector<double> field_values;
    double beta = 1.0;
    double beta_prime = 0.0;

    SolverSettings solver;

    int sim_n = 8;
    std::size_t replicas = 1000;
    std::uint64_t seed = 20240601;
    double rate_scale = 2.0;
    int sweeps = 1000;
    int blocks = 1;

    int threads = 0;
    std::string output_dir = ".";

    static RunConfig from_json(const std::string& text);
    std::string to_json() const;

    TorusGrid grid() const { return {d, m}; }
    KacModel build_model() const;
    LatticeModel build_lattice(int n) const;
};

/// JSON sidecar carrying the command, the effective config and extra
/// key/value facts (seeds, file hashes).
std::string sidecar_json(const RunConfig& config, const std::string& command,
                         const std::vector<std::pair<std::string, std::string>>& extras);

} // namespace kacld
