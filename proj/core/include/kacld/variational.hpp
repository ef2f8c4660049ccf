#pragma once

#include "kacld/torus.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace kacld {

/// Time-sampled path of profiles; velocities come from centered differences
/// (one-sided at the endpoints).
struct TrajectoryGrid {
    TorusGrid grid;
    std::vector<double> times;
    std::vector<Profile> profiles;

    TrajectoryGrid() = default;
    TrajectoryGrid(TorusGrid g, std::vector<double> ts, std::vector<Profile> ps);

    double horizon() const { return times.back(); }
};

/// Per-node optimal path between alpha and alpha_prime sampled on a uniform
/// time grid with `steps` intervals.
TrajectoryGrid make_optimal_trajectory(const Profile& alpha, const Profile& alpha_prime,
                                       double t, int steps);

/// Pointwise Lagrangian density L[p, q] with local field F = (J*p + h)(u);
/// general beta_prime. Zero along q = 2[sinh(b'F) - p cosh(b'F)].
double kac_lagrangian_density(double p, double q, double field, double beta_prime);

/// I_D^t(phi): trapezoid in time, Riemann sum in space. Accepts beta' > 0.
double dynamic_rate(const TrajectoryGrid& traj, const KacModel& model);

/// I^t(phi) = I_S(phi_0) + I_D^t(phi).
double total_rate(const TrajectoryGrid& traj, const KacModel& model);

/// Endpoint-constrained cost C_{t,alpha'}(alpha) = I_S + mean of per-node
/// scalar actions. Requires beta' = 0.
double kac_cost(const Profile& alpha, const Profile& alpha_prime, double t,
                const KacModel& model);

/// Same cost rearranged as interaction quadratic form + local terms; requires
/// <J> = 1 within 1e-9.
double kac_cost_pt(const Profile& alpha, const Profile& alpha_prime, double t,
                   const KacModel& model);

/// Node-wise defect of the critical-profile equation.
GridFunction critical_residual(const Profile& alpha, const Profile& alpha_prime, double t,
                               const KacModel& model);

/// Exact Frechet gradient density of alpha -> kac_cost(alpha, alpha', t).
GridFunction kac_cost_gradient(const Profile& alpha, const Profile& alpha_prime, double t,
                               const KacModel& model);

struct SolverSettings {
    double damping = 1.0;
    int max_iter = 100000;
    double tol = 1e-12;          // sup-norm update threshold
    double residual_tol = 1e-10; // acceptance threshold on the defect
    double gap_tol = 1e-8;
    double dedupe_distance = 1e-4;
    int random_seeds = 8;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    int threads = 0;
};

struct SolveResult {
    Profile profile;
    double residual_sup = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Damped fixed-point iteration on the rearranged critical equation,
/// alpha <- [sinh(2 beta F) + alpha'/sinh 2t] / [cosh(2 beta F) + coth 2t].
SolveResult solve_critical(const Profile& alpha_prime, double t, const KacModel& model,
                           const Profile& seed, const SolverSettings& settings = {});

struct CriticalProfile {
    Profile profile;
    double cost = 0.0;
    double residual = 0.0;
};

struct MinimizerReport {
    Profile alpha_prime;
    double t = 0.0;
    std::vector<CriticalProfile> critical_profiles; // sorted by cost
    std::vector<std::size_t> global_set;
    bool unique = true;
    double gap = 0.0; // second-best cost minus best; +inf when single
    std::size_t seeds_used = 0;
    std::size_t seeds_converged = 0;
};

/// Multi-seed critical-profile search plus cost comparison. Default seeds:
/// constants at the scalar-problem minima, the linear-case guesses, +-0.9
/// constants, and `random_seeds` random profiles.
MinimizerReport kac_global_minimizers(const Profile& alpha_prime, double t,
                                      const KacModel& model,
                                      const SolverSettings& settings = {},
                                      const std::vector<Profile>& extra_seeds = {});

struct UniquenessCertificate {
    bool certified = false;
    double lipschitz_bound = 0.0;
    int enclosure_sweeps = 0;
};

/// Sound short-time uniqueness certificate: interval enclosures of all
/// critical profiles are contracted by iterating the monotone pointwise
/// fixed-point map, then a rigorous Lipschitz bound is evaluated on the
/// enclosure. certified=false means inconclusive, not "non-unique".
UniquenessCertificate short_time_uniqueness(const KacModel& model,
                                            const Profile& alpha_prime, double t);

struct SelectionProbeResult {
    Profile limit_plus;
    Profile limit_minus;
    std::size_t matched_plus = 0;  // index into report.critical_profiles
    std::size_t matched_minus = 0;
    double mismatch_plus = 0.0;  // sup distance to the matched minimizer
    double mismatch_minus = 0.0;
};

/// Perturbs alpha' by +-eps on the set where the two leading minimizers
/// differ by more than half their sup-gap, re-solves for eps in
/// {1e-2, 1e-3, 1e-4} per side, and reports the two one-sided limits.
SelectionProbeResult selection_probe(const MinimizerReport& report, const KacModel& model,
                                     const SolverSettings& settings = {});

} // namespace kacld
