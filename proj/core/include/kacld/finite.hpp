#pragma once

#include "kacld/kernel.hpp"
#include "kacld/torus.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace kacld {

/// +-1 configuration on the discrete torus of side n.
struct SpinConfig {
    int n = 2;
    int d = 1;
    std::vector<std::int8_t> spins;

    SpinConfig() = default;
    SpinConfig(int n_, int d_, std::vector<std::int8_t> s);
    static SpinConfig all_up(int n, int d);

    std::size_t site_count() const { return spins.size(); }
    double magnetization() const;
};

/// Kac model sampled at the lattice points x/n, plus dynamics settings.
struct LatticeModel {
    TorusGrid lattice;        // d, n
    std::vector<double> j;     // J((x-y)/n) by lag index
    std::vector<double> h;     // h(x/n) per site
    double beta = 0.0;
    double beta_prime = 0.0;
    double rate_scale = 2.0;  // 2 = unit flip rate at beta' = 0; 1 = literal rates

    LatticeModel() = default;
    LatticeModel(const KacModel& model, int n, double rate_scale_ = 2.0);

    int n() const { return lattice.points_per_axis; }
    int d() const { return lattice.dim; }
    std::size_t sites() const { return lattice.node_count(); }
};

/// Signed empirical density with exact rational weights 1/|Lambda|.
struct EmpiricalMeasure {
    TorusGrid lattice;
    std::optional<std::size_t> perforated_site;
    std::vector<double> weights; // sigma(x)/|Lambda|, 0 at the perforated site
    double total_mass = 0.0;

    /// Density of the unperforated measure as a grid function (values +-1).
    GridFunction density() const;
};

double hamiltonian_n(const SpinConfig& sigma, const LatticeModel& model);

/// Single-site heat-bath sweeps from a uniform random start.
SpinConfig equilibrium_sample(const LatticeModel& model, int sweeps, std::uint64_t seed);

/// Conditional probability of spin +1 at site x given the rest.
double heat_bath_up_probability(const SpinConfig& sigma, std::size_t x,
                                const LatticeModel& model);

struct SimSample {
    double time = 0.0;
    std::vector<double> block_means;
};

struct SimRun {
    std::uint64_t seed = 0;
    double horizon = 0.0;
    double rate_scale = 2.0;
    int blocks = 1;
    std::vector<SimSample> samples;
    SpinConfig final_config;
    std::size_t clock_events = 0;
    std::size_t flips = 0;
};

/// Event-driven continuous-time Glauber dynamics via uniformization with
/// dominating rate rate_scale per site and thinning by the Metropolis-type
/// ratio. Reproducible for fixed (seed, settings).
SimRun glauber_simulate(const SpinConfig& start, const LatticeModel& model, double t,
                        std::uint64_t seed, const std::vector<double>& sample_times = {},
                        int blocks = 1);

EmpiricalMeasure empirical_density(const SpinConfig& sigma,
                                   std::optional<std::size_t> perforation = std::nullopt);

/// Block spin sums of sigma with one site removed; blocks are slabs along
/// axis 0.
std::vector<int> perforated_block_sums(const SpinConfig& sigma, std::size_t perforated,
                                       int blocks);

/// Closest realizable perforated block-sum vector to the constant target
/// c' (parity-correct per block).
std::vector<int> realizable_block_sums(const LatticeModel& model, std::size_t perforated,
                                       int blocks, double c_prime);

/// Exact single-spin conditional law at time t by enumeration over ordered
/// configuration pairs; beta' = 0 only, sites <= 12.
KernelValue exact_conditional_gamma(const LatticeModel& model, double t, std::size_t u_site,
                                    const std::vector<int>& block_sums, int blocks = 1);

struct McGammaResult {
    double p_plus = 0.5;
    double std_error = 0.0;
    std::size_t accepted = 0;
    std::size_t attempts = 0;
    double acceptance = 0.0;
};

struct McGammaSettings {
    int sweeps = 1000;
    std::size_t min_accepted = 1000;
    std::size_t max_attempts = 400000;
    int blocks = 1;
};

/// Monte-Carlo estimate of the conditional law: replicas are accepted when
/// every block mean of the final perforated configuration lies within
/// `ball` of the corresponding block mean of alpha_prime.
McGammaResult mc_conditional_gamma(const LatticeModel& model, double t,
                                   const std::vector<double>& alpha_prime_block_means,
                                   double ball, std::size_t u_site, std::uint64_t seed,
                                   const McGammaSettings& settings = {});

struct LdpRow {
    int n = 0;
    double value = 0.0; // -(1/n^d) log P(final class)
    bool exact = true;
    double std_error = 0.0;
};

struct LdpProbeResult {
    std::vector<LdpRow> rows;
    double variational_value = 0.0; // inf_alpha C_{t,c'}
    double static_infimum = 0.0;    // inf I_S (centering of the LDP)
};

/// Decay-rate probe of P(pi_t^n in the class of c') against the variational
/// prediction; exact enumeration for sites <= 12. Constant h only.
LdpProbeResult ldp_probe(const KacModel& model, double t, double c_prime,
                         const std::vector<int>& n_list, double rate_scale = 2.0);

} // namespace kacld
