#pragma once

#include "kacld/torus.hpp"
#include "kacld/variational.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace kacld {

struct KernelValue {
    double p_plus = 0.5;
    double p_minus = 0.5;
};

/// Single-spin conditional law of the equilibrium measure,
/// gamma(k | alpha) = exp[k b F(u)] / (2 cosh[b F(u)]), F = J*alpha + h.
KernelValue static_kernel(const Profile& alpha, std::size_t u, const KacModel& model);

/// 2x2 row-stochastic transition matrix; index 0 is spin -1, index 1 is +1.
struct TransitionMatrix {
    std::array<std::array<double, 2>, 2> p{{{1.0, 0.0}, {0.0, 1.0}}};

    static int spin_index(int k) { return k > 0 ? 1 : 0; }
    double operator()(int k, int k_prime) const {
        return p[spin_index(k)][spin_index(k_prime)];
    }
};

/// Independent-flip transition probability at unit flip rate:
/// p_t(k,k') = (1 + k k' e^{-2t}) / 2.
double two_state_closed(double t, int k, int k_prime);

/// Transition matrix of the tagged spin along a given environment
/// trajectory; time-dependent rates rate_scale * exp(-k b' F_s(u)) /
/// (2 cosh b' F_s(u)), integrated by classical RK4 with step <= 1e-3 t.
TransitionMatrix two_state_path(const TrajectoryGrid& traj, std::size_t u,
                                const KacModel& model, double t, double rate_scale = 2.0);

/// Bayes combination of the equilibrium weights at the minimizer's initial
/// profile with the tagged-spin transition matrix.
KernelValue specification_kernel(const Profile& minimizer_start, const TrajectoryGrid& traj,
                                 std::size_t u, const KacModel& model, double t,
                                 double rate_scale = 2.0);

/// Time-evolved kernel at infinite-temperature dynamics:
/// Gamma_t(k', a) = (1 + k' e^{-2t} tanh a) / 2.
double gamma_beta0(int k_prime, double a, double t);

enum class Verdict { Good, Bad, ShortTimeCertified, Inconclusive };

std::string to_string(Verdict v);

struct KernelWitness {
    std::size_t node = 0;
    double limit_plus_side = 0.5;
    double limit_minus_side = 0.5;
};

struct ProfileClassification {
    Profile alpha_prime;
    double t = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    std::size_t minimizer_count = 0;
    UniquenessCertificate certificate;
    std::vector<KernelWitness> witnesses;     // populated for Bad
    std::vector<KernelValue> kernel_values;   // per node, for unique verdicts
    std::size_t seeds_used = 0;
    std::string note;
};

/// Good/Bad classification of a conditioning profile via minimizer
/// multiplicity; Bad verdicts carry witness nodes with the two one-sided
/// kernel limits obtained from the selection probe.
ProfileClassification classify_profile(const Profile& alpha_prime, double t,
                                       const KacModel& model,
                                       const SolverSettings& settings = {});

} // namespace kacld
