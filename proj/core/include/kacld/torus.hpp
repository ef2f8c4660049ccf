#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace kacld {

/// Uniform discretization of the unit torus [0,1)^d with M nodes per axis.
/// Node i has coordinates (i_1/M, ..., i_d/M); indices are row-major.
struct TorusGrid {
    int dim = 1;
    int points_per_axis = 2;

    TorusGrid() = default;
    TorusGrid(int d, int m);

    std::size_t node_count() const { return node_count_; }
    double spacing() const { return 1.0 / points_per_axis; }
    double cell_volume() const { return 1.0 / static_cast<double>(node_count_); }

    bool operator==(const TorusGrid& o) const {
        return dim == o.dim && points_per_axis == o.points_per_axis;
    }

    /// Flat index of the componentwise difference (i - j) mod M.
    std::size_t lag_index(std::size_t i, std::size_t j) const;

    /// Flat index of the reflection -i mod M.
    std::size_t reflect_index(std::size_t i) const;

    /// Torus coordinates of node i.
    std::vector<double> node_coords(std::size_t i) const;

  private:
    std::size_t node_count_ = 4;
};

/// Real-valued samples on a grid, no range restriction. Convolutions and
/// local fields live here.
struct GridFunction {
    TorusGrid grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(TorusGrid g, std::vector<double> v);
    GridFunction(TorusGrid g, double constant);

    double mean() const;
};

/// Magnetization profile: samples in [-1, +1].
struct Profile : GridFunction {
    Profile() = default;
    Profile(TorusGrid g, std::vector<double> v);
    Profile(TorusGrid g, double constant);
};

/// Nonnegative, reflection-symmetric, not identically zero interaction
/// kernel. Small asymmetries (<= 1e-12) are symmetrized at construction.
struct InteractionKernel : GridFunction {
    InteractionKernel() = default;
    InteractionKernel(TorusGrid g, std::vector<double> v);
    InteractionKernel(TorusGrid g, double constant);
};

/// External field: finite samples, no sign restriction.
struct ExternalField : GridFunction {
    ExternalField() = default;
    ExternalField(TorusGrid g, std::vector<double> v);
    ExternalField(TorusGrid g, double constant);
};

struct KacModel {
    InteractionKernel kernel;
    ExternalField field;
    double beta = 0.0;
    double beta_prime = 0.0;

    KacModel() = default;
    KacModel(InteractionKernel j, ExternalField h, double beta_, double beta_prime_);

    const TorusGrid& grid() const { return kernel.grid; }
};

/// Riemann-sum circular convolution: (1/M^d) sum_j J(u_i - u_j) f(u_j).
/// Direct summation for M^d <= 4096, FFT above.
GridFunction convolve(const InteractionKernel& j, const GridFunction& f);

/// Local field beta-free: J*alpha + h.
GridFunction local_field(const KacModel& model, const GridFunction& alpha);

/// Grid mean of the kernel, <J>.
double kernel_mean(const InteractionKernel& j);

/// Relative entropy Phi(m) = (1+m)/2 log(1+m) + (1-m)/2 log(1-m),
/// continuously extended to m = +-1 (value log 2).
double entropy_phi(double m);

/// H(alpha) = <J*alpha/2 + h, alpha>.
double kac_energy(const Profile& alpha, const KacModel& model);

/// I_S(alpha) = -beta <J*alpha/2 + h, alpha> + <Phi(alpha)>.
double static_rate(const Profile& alpha, const KacModel& model);

/// (beta/4) integral J(u-v) [alpha(u)-alpha(v)]^2 du dv.
double interaction_quadratic_form(const Profile& alpha, const KacModel& model);

/// <f, g> as a grid Riemann sum.
double grid_inner(const GridFunction& f, const GridFunction& g);

double sup_norm(std::span<const double> v);
double sup_distance(std::span<const double> a, std::span<const double> b);

/// Built-in kernels covering the theorem hypotheses (J >= 0, symmetric,
/// continuous, <J> = 1).
InteractionKernel constant_kernel(const TorusGrid& g);
InteractionKernel cosine_bump_kernel(const TorusGrid& g);

} // namespace kacld
