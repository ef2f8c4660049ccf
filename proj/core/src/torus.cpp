#include "kacld/torus.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <numeric>

#ifdef KACLD_HAVE_FFTW3
#include <fftw3.h>
#endif

namespace kacld {

namespace {

constexpr std::size_t kDirectConvolutionLimit = 4096;

void check_same_grid(const TorusGrid& a, const TorusGrid& b) {
    if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

std::vector<int> unflatten(const TorusGrid& g, std::size_t i) {
    std::vector<int> idx(g.dim);
    for (int k = g.dim - 1; k >= 0; --k) {
        idx[k] = static_cast<int>(i % g.points_per_axis);
        i /= g.points_per_axis;
    }
    return idx;
}

} // namespace

TorusGrid::TorusGrid(int d, int m) : dim(d), points_per_axis(m) {
    if (d < 1) throw std::invalid_argument("grid dimension must be positive");
    if (m < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
    node_count_ = 1;
    for (int k = 0; k < d; ++k) {
        if (node_count_ > (std::size_t(1) << 40) / static_cast<std::size_t>(m))
            throw std::invalid_argument("grid too large");
        node_count_ *= static_cast<std::size_t>(m);
    }
}

std::size_t TorusGrid::lag_index(std::size_t i, std::size_t j) const {
    const auto m = static_cast<std::size_t>(points_per_axis);
    std::size_t out = 0, place = 1;
    for (int k = 0; k < dim; ++k, place *= m) {
        const std::size_t ik = i % m, jk = j % m;
        i /= m;
        j /= m;
        out += ((ik + m - jk) % m) * place;
    }
    return out;
}

std::size_t TorusGrid::reflect_index(std::size_t i) const {
    return lag_index(0, i);
}

std::vector<double> TorusGrid::node_coords(std::size_t i) const {
    const auto idx = unflatten(*this, i);
    std::vector<double> u(dim);
    for (int k = 0; k < dim; ++k) u[k] = idx[k] * spacing();
    return u;
}

GridFunction::GridFunction(TorusGrid g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
    if (values.size() != grid.node_count())
        throw std::invalid_argument("sample count does not match grid");
}

GridFunction::GridFunction(TorusGrid g, double constant)
    : grid(g), values(g.node_count(), constant) {}

double GridFunction::mean() const {
    return std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
}

Profile::Profile(TorusGrid g, std::vector<double> v) : GridFunction(g, std::move(v)) {
    for (double x : values)
        if (!(std::abs(x) <= 1.0)) throw std::invalid_argument("profile value outside [-1,1]");
}

Profile::Profile(TorusGrid g, double constant) : GridFunction(g, constant) {
    if (!(std::abs(constant) <= 1.0)) throw std::invalid_argument("profile value outside [-1,1]");
}

InteractionKernel::InteractionKernel(TorusGrid g, std::vector<double> v)
    : GridFunction(g, std::move(v)) {
    bool nonzero = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0)
            throw std::invalid_argument("kernel samples must be finite and >= 0");
        if (values[i] != 0.0) nonzero = true;
        const std::size_t r = grid.reflect_index(i);
        if (std::abs(values[i] - values[r]) > 1e-12)
            throw std::invalid_argument("kernel not symmetric under u -> -u");
    }
    if (!nonzero) throw std::invalid_argument("kernel identically zero");
    // symmetrize residual asymmetry within tolerance
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t r = grid.reflect_index(i);
        if (r > i) {
            const double avg = 0.5 * (values[i] + values[r]);
            values[i] = values[r] = avg;
        }
    }
}

InteractionKernel::InteractionKernel(TorusGrid g, double constant) : GridFunction(g, constant) {
    if (!std::isfinite(constant) || constant <= 0.0)
        throw std::invalid_argument("constant kernel must be finite and > 0");
}

ExternalField::ExternalField(TorusGrid g, std::vector<double> v)
    : GridFunction(g, std::move(v)) {
    for (double x : values)
        if (!std::isfinite(x)) throw std::invalid_argument("field samples must be finite");
}

ExternalField::ExternalField(TorusGrid g, double constant) : GridFunction(g, constant) {
    if (!std::isfinite(constant)) throw std::invalid_argument("field samples must be finite");
}

KacModel::KacModel(InteractionKernel j, ExternalField h, double beta_, double beta_prime_)
    : kernel(std::move(j)), field(std::move(h)), beta(beta_), beta_prime(beta_prime_) {
    check_same_grid(kernel.grid, field.grid);
    if (!(beta >= 0.0) || !(beta_prime >= 0.0))
        throw std::invalid_argument("inverse temperatures must be >= 0");
}

namespace {

GridFunction convolve_direct(const InteractionKernel& j, const GridFunction& f) {
    const auto& g = f.grid;
    const std::size_t n = g.node_count();
    std::vector<double> out(n, 0.0);
    if (g.dim == 1) {
        const std::size_t m = n;
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                // lag (i - k) mod m without the generic helper
                const std::size_t l = i >= k ? i - k : i + m - k;
                acc += j.values[l] * f.values[k];
            }
            out[i] = acc;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += j.values[g.lag_index(i, k)] * f.values[k];
            out[i] = acc;
        }
    }
    const double w = g.cell_volume();
    for (double& x : out) x *= w;
    return {g, std::move(out)};
}

#ifdef KACLD_HAVE_FFTW3
std::mutex fftw_mutex;

GridFunction convolve_fft(const InteractionKernel& j, const GridFunction& f) {
    const auto& g = f.grid;
    const std::size_t n = g.node_count();
    std::vector<int> dims(g.dim, g.points_per_axis);
    const std::size_t nc = n / g.points_per_axis * (g.points_per_axis / 2 + 1);

    std::vector<double> in_j(j.values), in_f(f.values), out(n);
    std::vector<std::complex<double>> cj(nc), cf(nc);

    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_plan pj = fftw_plan_dft_r2c(g.dim, dims.data(), in_j.data(),
                                         reinterpret_cast<fftw_complex*>(cj.data()),
                                         FFTW_ESTIMATE);
        fftw_plan pf = fftw_plan_dft_r2c(g.dim, dims.data(), in_f.data(),
                                         reinterpret_cast<fftw_complex*>(cf.data()),
                                         FFTW_ESTIMATE);
        fftw_execute(pj);
        fftw_execute(pf);
        fftw_destroy_plan(pj);
        fftw_destroy_plan(pf);
        for (std::size_t i = 0; i < nc; ++i) cj[i] *= cf[i];
        fftw_plan pb = fftw_plan_dft_c2r(g.dim, dims.data(),
                                         reinterpret_cast<fftw_complex*>(cj.data()),
                                         out.data(), FFTW_ESTIMATE);
        fftw_execute(pb);
        fftw_destroy_plan(pb);
    }
    // c2r(r2c(J) r2c(f)) carries a factor M^d; one more 1/M^d is the Riemann weight
    const double w = g.cell_volume() / double(n);
    for (double& x : out) x *= w;
    return {g, std::move(out)};
}
#endif

} // namespace

GridFunction convolve(const InteractionKernel& j, const GridFunction& f) {
    check_same_grid(j.grid, f.grid);
#ifdef KACLD_HAVE_FFTW3
    if (f.grid.node_count() > kDirectConvolutionLimit) return convolve_fft(j, f);
#endif
    return convolve_direct(j, f);
}

GridFunction local_field(const KacModel& model, const GridFunction& alpha) {
    check_same_grid(model.grid(), alpha.grid);
    GridFunction out = convolve(model.kernel, alpha);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += model.field.values[i];
    return out;
}

double kernel_mean(const InteractionKernel& j) { return j.mean(); }

double entropy_phi(double m) {
    if (!(std::abs(m) <= 1.0)) throw std::domain_error("entropy_phi: |m| > 1");
    const double p = 1.0 + m, q = 1.0 - m;
    const double lp = p > 0.0 ? p * std::log(p) : 0.0;
    const double lq = q > 0.0 ? q * std::log(q) : 0.0;
    return 0.5 * (lp + lq);
}

double grid_inner(const GridFunction& f, const GridFunction& g) {
    check_same_grid(f.grid, g.grid);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.values[i] * g.values[i];
    return acc * f.grid.cell_volume();
}

double kac_energy(const Profile& alpha, const KacModel& model) {
    check_same_grid(alpha.grid, model.grid());
    GridFunction half_field = convolve(model.kernel, alpha);
    for (std::size_t i = 0; i < half_field.values.size(); ++i)
        half_field.values[i] = 0.5 * half_field.values[i] + model.field.values[i];
    return grid_inner(half_field, alpha);
}

double static_rate(const Profile& alpha, const KacModel& model) {
    double ent = 0.0;
    for (double m : alpha.values) ent += entropy_phi(m);
    ent *= alpha.grid.cell_volume();
    return -model.beta * kac_energy(alpha, model) + ent;
}

double interaction_quadratic_form(const Profile& alpha, const KacModel& model) {
    check_same_grid(alpha.grid, model.grid());
    // (beta/4) iint J (a(u)-a(v))^2 = (beta/2)[<J> mean(a^2) - <J*a, a>]
    const GridFunction conv = convolve(model.kernel, alpha);
    double mean_sq = 0.0;
    for (double x : alpha.values) mean_sq += x * x;
    mean_sq /= double(alpha.values.size());
    const double q =
        0.5 * model.beta * (kernel_mean(model.kernel) * mean_sq - grid_inner(conv, alpha));
    return std::max(q, 0.0);
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

InteractionKernel constant_kernel(const TorusGrid& g) { return {g, 1.0}; }

InteractionKernel cosine_bump_kernel(const TorusGrid& g) {
    std::vector<double> v(g.node_count(), 1.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto u = g.node_coords(i);
        double prod = 1.0;
        for (double uk : u) prod *= 1.0 + std::cos(2.0 * std::numbers::pi * uk);
        v[i] = prod;
    }
    return {g, std::move(v)};
}

} // namespace kacld
