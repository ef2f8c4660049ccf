#include "kacld/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kacld {

namespace {

void require_node(const TorusGrid& g, std::size_t u) {
    if (u >= g.node_count()) throw std::invalid_argument("node index out of range");
}

} // namespace

KernelValue static_kernel(const Profile& alpha, std::size_t u, const KacModel& model) {
    require_node(alpha.grid, u);
    const GridFunction field = local_field(model, alpha);
    const double a = model.beta * field.values[u];
    const double z = 2.0 * std::cosh(a);
    return {std::exp(a) / z, std::exp(-a) / z};
}

double two_state_closed(double t, int k, int k_prime) {
    if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
    return 0.5 * (1.0 + k * k_prime * std::exp(-2.0 * t));
}

TransitionMatrix two_state_path(const TrajectoryGrid& traj, std::size_t u,
                                const KacModel& model, double t, double rate_scale) {
    require_node(traj.grid, u);
    if (!(traj.grid == model.grid())) throw std::invalid_argument("grid mismatch");
    if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
    if (t > traj.horizon() + 1e-12)
        throw std::invalid_argument("trajectory does not cover [0,t]");
    TransitionMatrix out;
    if (t == 0.0) return out;

    // local field F_s(u) at the trajectory's sample times, interpolated
    // linearly in between
    const std::size_t nt = traj.times.size();
    std::vector<double> fs(nt);
    if (model.beta_prime != 0.0) {
        for (std::size_t k = 0; k < nt; ++k)
            fs[k] = local_field(model, traj.profiles[k]).values[u];
    }
    const auto field_at = [&](double s) {
        if (model.beta_prime == 0.0) return 0.0;
        const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), s);
        std::size_t hi = std::min<std::size_t>(it - traj.times.begin(), nt - 1);
        if (hi == 0) hi = 1;
        const std::size_t lo = hi - 1;
        const double w = (s - traj.times[lo]) / (traj.times[hi] - traj.times[lo]);
        return fs[lo] + w * (fs[hi] - fs[lo]);
    };
    // flip rate out of state k (index 1 = spin +1)
    const auto rates = [&](double s, double r[2]) {
        const double bf = model.beta_prime * field_at(s);
        const double z = 2.0 * std::cosh(bf);
        r[0] = rate_scale * std::exp(+bf) / z;
        r[1] = rate_scale * std::exp(-bf) / z;
    };
    const auto derivative = [&](double s, const std::array<std::array<double, 2>, 2>& p,
                                std::array<std::array<double, 2>, 2>& dp) {
        double r[2];
        rates(s, r);
        for (int row = 0; row < 2; ++row)
            for (int col = 0; col < 2; ++col)
                dp[row][col] = p[row][1 - col] * r[1 - col] - p[row][col] * r[col];
    };

    const int steps = std::max(1000, static_cast<int>(std::ceil(t / 1e-3)));
    const double h = t / steps;
    auto p = out.p;
    std::array<std::array<double, 2>, 2> k1, k2, k3, k4, tmp;
    for (int step = 0; step < steps; ++step) {
        const double s = step * h;
        derivative(s, p, k1);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) tmp[i][j] = p[i][j] + 0.5 * h * k1[i][j];
        derivative(s + 0.5 * h, tmp, k2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) tmp[i][j] = p[i][j] + 0.5 * h * k2[i][j];
        derivative(s + 0.5 * h, tmp, k3);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) tmp[i][j] = p[i][j] + h * k3[i][j];
        derivative(s + h, tmp, k4);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                p[i][j] += h / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
    }
    for (int i = 0; i < 2; ++i) {
        const double row = p[i][0] + p[i][1];
        if (std::abs(row - 1.0) > 1e-10)
            throw std::runtime_error("two_state_path: step-size failure, row sum " +
                                     std::to_string(row));
    }
    out.p = p;
    return out;
}

KernelValue specification_kernel(const Profile& minimizer_start, const TrajectoryGrid& traj,
                                 std::size_t u, const KacModel& model, double t,
                                 double rate_scale) {
    require_node(minimizer_start.grid, u);
    const GridFunction field = local_field(model, minimizer_start);
    const double a = model.beta * field.values[u];

    TransitionMatrix p;
    if (model.beta_prime == 0.0) {
        for (int k : {-1, +1})
            for (int kp : {-1, +1})
                p.p[TransitionMatrix::spin_index(k)][TransitionMatrix::spin_index(kp)] =
                    two_state_closed(t, k, kp);
    } else {
        p = two_state_path(traj, u, model, t, rate_scale);
    }

    double num_plus = 0.0, num_minus = 0.0, den = 0.0;
    for (int k : {-1, +1}) {
        const double w = std::exp(k * a);
        num_plus += w * p(k, +1);
        num_minus += w * p(k, -1);
        den += w * (p(k, +1) + p(k, -1));
    }
    return {num_plus / den, num_minus / den};
}

double gamma_beta0(int k_prime, double a, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
    return 0.5 * (1.0 + k_prime * std::exp(-2.0 * t) * std::tanh(a));
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Good: return "Good";
        case Verdict::Bad: return "Bad";
        case Verdict::ShortTimeCertified: return "ShortTimeCertified";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

ProfileClassification classify_profile(const Profile& alpha_prime, double t,
                                       const KacModel& model,
                                       const SolverSettings& settings) {
    if (model.beta_prime != 0.0)
        throw std::invalid_argument("classify_profile supports beta_prime = 0 only");
    ProfileClassification out;
    out.alpha_prime = alpha_prime;
    out.t = t;
    out.certificate = short_time_uniqueness(model, alpha_prime, t);

    MinimizerReport report;
    try {
        report = kac_global_minimizers(alpha_prime, t, model, settings);
    } catch (const std::runtime_error& e) {
        out.verdict = Verdict::Inconclusive;
        out.note = e.what();
        return out;
    }
    out.minimizer_count = report.global_set.size();
    out.seeds_used = report.seeds_used;

    if (report.unique) {
        out.verdict = out.certificate.certified ? Verdict::ShortTimeCertified : Verdict::Good;
        const Profile& start = report.critical_profiles[report.global_set.front()].profile;
        const GridFunction field = local_field(model, start);
        out.kernel_values.resize(alpha_prime.values.size());
        for (std::size_t u = 0; u < out.kernel_values.size(); ++u) {
            const double a = model.beta * field.values[u];
            out.kernel_values[u] = {gamma_beta0(+1, a, t), gamma_beta0(-1, a, t)};
        }
        return out;
    }

    out.verdict = Verdict::Bad;
    const SelectionProbeResult probe = selection_probe(report, model, settings);
    const GridFunction fplus = local_field(model, probe.limit_plus);
    const GridFunction fminus = local_field(model, probe.limit_minus);
    double gap = 0.0;
    for (std::size_t u = 0; u < alpha_prime.values.size(); ++u)
        gap = std::max(gap,
                       std::abs(probe.limit_plus.values[u] - probe.limit_minus.values[u]));
    const double delta = 0.5 * gap;
    for (std::size_t u = 0; u < alpha_prime.values.size(); ++u) {
        if (std::abs(probe.limit_plus.values[u] - probe.limit_minus.values[u]) <= delta)
            continue;
        KernelWitness w;
        w.node = u;
        w.limit_plus_side = gamma_beta0(+1, model.beta * fplus.values[u], t);
        w.limit_minus_side = gamma_beta0(+1, model.beta * fminus.values[u], t);
        out.witnesses.push_back(w);
    }
    return out;
}

} // namespace kacld
