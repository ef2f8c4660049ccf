#include "kacld/variational.hpp"

#include "kacld/cw.hpp"
#include "kacld/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace kacld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_beta0(const KacModel& model, const char* op) {
    if (model.beta_prime != 0.0)
        throw std::invalid_argument(std::string(op) + " supports beta_prime = 0 only");
}

void require_positive_time(double t) {
    if (!(t > 0.0)) throw std::invalid_argument("time must be > 0");
    if (t > 300.0) throw std::invalid_argument("time exceeds supported horizon (300)");
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
    if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

double clamp_open(double m) { return std::clamp(m, -(1.0 - 1e-12), 1.0 - 1e-12); }

} // namespace

TrajectoryGrid::TrajectoryGrid(TorusGrid g, std::vector<double> ts, std::vector<Profile> ps)
    : grid(g), times(std::move(ts)), profiles(std::move(ps)) {
    if (times.size() < 2) throw std::invalid_argument("degenerate time grid");
    if (times.front() != 0.0) throw std::invalid_argument("trajectory must start at time 0");
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        if (!(times[k] < times[k + 1]))
            throw std::invalid_argument("trajectory times must increase strictly");
    if (profiles.size() != times.size())
        throw std::invalid_argument("one profile per sample time required");
    for (const auto& p : profiles) require_same_grid(p.grid, grid);
}

TrajectoryGrid make_optimal_trajectory(const Profile& alpha, const Profile& alpha_prime,
                                       double t, int steps) {
    require_same_grid(alpha.grid, alpha_prime.grid);
    require_positive_time(t);
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    const std::size_t n = alpha.grid.node_count();
    std::vector<double> times(steps + 1);
    std::vector<Profile> profiles;
    profiles.reserve(steps + 1);
    for (int k = 0; k <= steps; ++k) {
        times[k] = t * double(k) / double(steps);
        std::vector<double> v(n);
        for (std::size_t u = 0; u < n; ++u)
            v[u] = std::clamp(
                cw_trajectory(alpha.values[u], alpha_prime.values[u], t, times[k]), -1.0, 1.0);
        profiles.emplace_back(alpha.grid, std::move(v));
    }
    return {alpha.grid, std::move(times), std::move(profiles)};
}

double kac_lagrangian_density(double p, double q, double field, double beta_prime) {
    if (!(std::abs(p) <= 1.0)) throw std::domain_error("density argument outside [-1,1]");
    if (beta_prime == 0.0) return cw_lagrangian(p, q);
    if (p == 1.0 && q > 0.0) return kInf;
    if (p == -1.0 && q < 0.0) return kInf;
    const double bf = beta_prime * field;
    const double r = std::sqrt(1.0 - p * p + 0.25 * q * q);
    const double tail = std::cosh(bf) - p * std::sinh(bf) - r;
    if (q == 0.0) return tail;
    // the log argument rewritten to stay finite as p -> +-1
    const double arg = q > 0.0 ? (0.5 * q + r) / (1.0 - p) : (1.0 + p) / (r - 0.5 * q);
    return 0.5 * q * (std::log(arg) - bf) + tail;
}

double dynamic_rate(const TrajectoryGrid& traj, const KacModel& model) {
    require_same_grid(traj.grid, model.grid());
    const std::size_t nt = traj.times.size();
    const std::size_t n = traj.grid.node_count();
    const bool need_field = model.beta_prime != 0.0;

    std::vector<double> lag(nt, 0.0);
    for (std::size_t k = 0; k < nt; ++k) {
        const std::size_t km = k == 0 ? 0 : k - 1;
        const std::size_t kp = k + 1 == nt ? k : k + 1;
        const double dt = traj.times[kp] - traj.times[km];
        GridFunction field;
        if (need_field) field = local_field(model, traj.profiles[k]);
        double acc = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            const double q = (traj.profiles[kp].values[u] - traj.profiles[km].values[u]) / dt;
            acc += kac_lagrangian_density(traj.profiles[k].values[u], q,
                                          need_field ? field.values[u] : 0.0,
                                          model.beta_prime);
        }
        lag[k] = acc / double(n);
    }
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < nt; ++k)
        total += 0.5 * (lag[k] + lag[k + 1]) * (traj.times[k + 1] - traj.times[k]);
    return total;
}

double total_rate(const TrajectoryGrid& traj, const KacModel& model) {
    return static_rate(traj.profiles.front(), model) + dynamic_rate(traj, model);
}

double kac_cost(const Profile& alpha, const Profile& alpha_prime, double t,
                const KacModel& model) {
    require_beta0(model, "kac_cost");
    require_same_grid(alpha.grid, alpha_prime.grid);
    require_same_grid(alpha.grid, model.grid());
    if (t == 0.0) {
        for (std::size_t u = 0; u < alpha.values.size(); ++u)
            if (alpha.values[u] != alpha_prime.values[u]) return kInf;
        return static_rate(alpha, model);
    }
    require_positive_time(t);
    double action = 0.0;
    for (std::size_t u = 0; u < alpha.values.size(); ++u)
        action += cw_action(alpha.values[u], alpha_prime.values[u], t);
    action /= double(alpha.values.size());
    return static_rate(alpha, model) + action;
}

double kac_cost_pt(const Profile& alpha, const Profile& alpha_prime, double t,
                   const KacModel& model) {
    require_beta0(model, "kac_cost_pt");
    require_same_grid(alpha.grid, alpha_prime.grid);
    require_same_grid(alpha.grid, model.grid());
    require_positive_time(t);
    const double jmean = kernel_mean(model.kernel);
    if (std::abs(jmean - 1.0) > 1e-9)
        throw std::invalid_argument("kac_cost_pt requires a kernel with mean 1");
    const double quad = interaction_quadratic_form(alpha, model);
    double local = 0.0;
    for (std::size_t u = 0; u < alpha.values.size(); ++u) {
        const double a = alpha.values[u];
        local += -0.5 * model.beta * jmean * a * a - model.beta * model.field.values[u] * a +
                 entropy_phi(a) + cw_action(a, alpha_prime.values[u], t);
    }
    local /= double(alpha.values.size());
    return quad + local;
}

GridFunction critical_residual(const Profile& alpha, const Profile& alpha_prime, double t,
                               const KacModel& model) {
    require_beta0(model, "critical_residual");
    require_same_grid(alpha.grid, alpha_prime.grid);
    require_same_grid(alpha.grid, model.grid());
    require_positive_time(t);
    const GridFunction field = local_field(model, alpha);
    const double coth = 1.0 / std::tanh(2.0 * t);
    const double csch = 1.0 / std::sinh(2.0 * t);
    std::vector<double> r(alpha.values.size());
    for (std::size_t u = 0; u < r.size(); ++u) {
        const double x = 2.0 * model.beta * field.values[u];
        r[u] = std::sinh(x) - alpha.values[u] * std::cosh(x) - alpha.values[u] * coth +
               alpha_prime.values[u] * csch;
    }
    return {alpha.grid, std::move(r)};
}

GridFunction kac_cost_gradient(const Profile& alpha, const Profile& alpha_prime, double t,
                               const KacModel& model) {
    require_beta0(model, "kac_cost_gradient");
    require_same_grid(alpha.grid, alpha_prime.grid);
    require_same_grid(alpha.grid, model.grid());
    require_positive_time(t);
    const GridFunction field = local_field(model, alpha);
    std::vector<double> g(alpha.values.size());
    for (std::size_t u = 0; u < g.size(); ++u)
        g[u] = cw_cost_slope(clamp_open(alpha.values[u]), alpha_prime.values[u], t,
                             model.beta * field.values[u]);
    return {alpha.grid, std::move(g)};
}

SolveResult solve_critical(const Profile& alpha_prime, double t, const KacModel& model,
                           const Profile& seed, const SolverSettings& settings) {
    require_beta0(model, "solve_critical");
    require_same_grid(alpha_prime.grid, model.grid());
    require_same_grid(seed.grid, model.grid());
    require_positive_time(t);

    const std::size_t n = alpha_prime.values.size();
    const double csch = 1.0 / std::sinh(2.0 * t);
    const double coth = 1.0 / std::tanh(2.0 * t);
    std::vector<double> cur(seed.values);
    std::vector<double> prev_step(n, 0.0);
    double theta = settings.damping;

    double defect_sup = kInf;
    int it = 0;
    for (; it < settings.max_iter; ++it) {
        const GridFunction field = local_field(model, {alpha_prime.grid, cur});
        defect_sup = 0.0;
        std::vector<double> step(n);
        double dot = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            const double x = 2.0 * model.beta * field.values[u];
            const double g =
                (std::sinh(x) + alpha_prime.values[u] * csch) / (std::cosh(x) + coth);
            const double d = g - cur[u];
            defect_sup = std::max(defect_sup, std::abs(d));
            step[u] = d;
            dot += d * prev_step[u];
        }
        if (defect_sup < settings.tol) break;
        if (dot < 0.0) theta = std::max(0.5 * theta, 1.0 / 1024.0);
        for (std::size_t u = 0; u < n; ++u) {
            cur[u] += theta * step[u];
            prev_step[u] = step[u];
        }
    }

    SolveResult out;
    out.profile = Profile(alpha_prime.grid, std::move(cur));
    out.iterations = it;
    out.residual_sup =
        sup_norm(critical_residual(out.profile, alpha_prime, t, model).values);
    out.converged = defect_sup < settings.tol && out.residual_sup <= settings.residual_tol;
    return out;
}

namespace {

std::vector<Profile> default_seeds(const Profile& alpha_prime, double t, const KacModel& model,
                                   const SolverSettings& settings) {
    const TorusGrid& g = alpha_prime.grid;
    const std::size_t n = g.node_count();
    std::vector<Profile> seeds;

    // constants at the scalar-problem minima for the averaged final value
    const double jcw = model.beta * kernel_mean(model.kernel);
    if (jcw > 0.0) {
        double hbar = 0.0;
        for (double h : model.field.values) hbar += h;
        hbar /= double(n);
        const CWModel cw(jcw, model.beta * hbar);
        const CWCostCurve curve = cw_global_minima(t, alpha_prime.mean(), cw);
        for (const auto& mn : curve.minima) seeds.emplace_back(g, std::clamp(mn.m, -1.0, 1.0));
    }
    // linear-case guesses
    {
        std::vector<double> v(n), w(n);
        const double ch = std::cosh(2.0 * t);
        const double decay = std::exp(-2.0 * t);
        for (std::size_t u = 0; u < n; ++u) {
            v[u] = alpha_prime.values[u] / ch;
            w[u] = alpha_prime.values[u] * decay;
        }
        seeds.emplace_back(g, std::move(v));
        seeds.emplace_back(g, std::move(w));
    }
    seeds.emplace_back(g, 0.9);
    seeds.emplace_back(g, -0.9);
    seeds.emplace_back(g, 0.0);

    std::mt19937_64 rng(settings.seed);
    std::uniform_real_distribution<double> dist(-0.95, 0.95);
    for (int k = 0; k < settings.random_seeds; ++k) {
        std::vector<double> v(n);
        for (double& x : v) x = dist(rng);
        seeds.emplace_back(g, std::move(v));
    }
    return seeds;
}

} // namespace

MinimizerReport kac_global_minimizers(const Profile& alpha_prime, double t,
                                      const KacModel& model, const SolverSettings& settings,
                                      const std::vector<Profile>& extra_seeds) {
    require_beta0(model, "kac_global_minimizers");
    require_same_grid(alpha_prime.grid, model.grid());
    require_positive_time(t);

    std::vector<Profile> seeds = default_seeds(alpha_prime, t, model, settings);
    seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());

    std::vector<SolveResult> results(seeds.size());
    parallel_for(seeds.size(), settings.threads, [&](std::size_t k) {
        results[k] = solve_critical(alpha_prime, t, model, seeds[k], settings);
    });

    MinimizerReport report;
    report.alpha_prime = alpha_prime;
    report.t = t;
    report.seeds_used = seeds.size();

    std::vector<SolveResult> good;
    for (auto& r : results) {
        if (!r.converged) continue;
        ++report.seeds_converged;
        bool dup = false;
        for (auto& kept : good) {
            if (sup_distance(kept.profile.values, r.profile.values) <
                settings.dedupe_distance) {
                if (r.residual_sup < kept.residual_sup) kept = r;
                dup = true;
                break;
            }
        }
        if (!dup) good.push_back(std::move(r));
    }
    if (good.empty()) throw std::runtime_error("no critical-profile seed converged");

    for (auto& r : good) {
        CriticalProfile cp;
        cp.cost = kac_cost(r.profile, alpha_prime, t, model);
        cp.residual = r.residual_sup;
        cp.profile = std::move(r.profile);
        report.critical_profiles.push_back(std::move(cp));
    }
    std::sort(report.critical_profiles.begin(), report.critical_profiles.end(),
              [](const CriticalProfile& a, const CriticalProfile& b) {
                  if (a.cost != b.cost) return a.cost < b.cost;
                  return a.profile.values < b.profile.values;
              });
    const double best = report.critical_profiles.front().cost;
    for (std::size_t i = 0; i < report.critical_profiles.size(); ++i)
        if (report.critical_profiles[i].cost <= best + settings.gap_tol)
            report.global_set.push_back(i);
    report.unique = report.global_set.size() == 1;
    report.gap = report.critical_profiles.size() > 1
                     ? report.critical_profiles[1].cost - best
                     : kInf;
    return report;
}

UniquenessCertificate short_time_uniqueness(const KacModel& model, const Profile& alpha_prime,
                                            double t) {
    require_beta0(model, "short_time_uniqueness");
    require_same_grid(alpha_prime.grid, model.grid());
    UniquenessCertificate cert;
    if (model.beta == 0.0 || t == 0.0) {
        cert.certified = true;
        return cert;
    }
    require_positive_time(t);

    const TorusGrid& g = model.grid();
    const std::size_t n = g.node_count();
    const double csch = 1.0 / std::sinh(2.0 * t);
    const double coth = 1.0 / std::tanh(2.0 * t);
    const double jmean = kernel_mean(model.kernel);

    std::vector<double> lo(n, -1.0), hi(n, 1.0);
    std::vector<double> xlo(n), xhi(n);
    const auto gmap = [&](double x, double rp) {
        return (std::sinh(x) + rp) / (std::cosh(x) + coth);
    };

    // every critical profile is a fixed point of the monotone pointwise map,
    // so iterating it on per-node intervals encloses all of them
    for (int sweep = 0; sweep < 200; ++sweep) {
        const GridFunction clo = convolve(model.kernel, {g, lo});
        const GridFunction chi = convolve(model.kernel, {g, hi});
        double improve = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            xlo[u] = 2.0 * model.beta * (clo.values[u] + model.field.values[u]);
            xhi[u] = 2.0 * model.beta * (chi.values[u] + model.field.values[u]);
            if (std::abs(xlo[u]) > 700.0 || std::abs(xhi[u]) > 700.0) {
                cert.certified = false;
                cert.lipschitz_bound = kInf;
                return cert;
            }
            const double rp = alpha_prime.values[u] * csch;
            const double nlo = std::max(lo[u], gmap(xlo[u], rp));
            const double nhi = std::min(hi[u], gmap(xhi[u], rp));
            improve = std::max(improve, std::max(lo[u] == nlo ? 0.0 : nlo - lo[u],
                                                 hi[u] == nhi ? 0.0 : hi[u] - nhi));
            lo[u] = nlo;
            hi[u] = std::max(nhi, nlo);
        }
        cert.enclosure_sweeps = sweep + 1;
        if (improve < 1e-9) break;
    }

    // rigorous Lipschitz bound of the map on the enclosure: the numerator of
    // dG/dx is convex in x, the denominator is minimized nearest 0
    double worst = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
        const double rp = alpha_prime.values[u] * csch;
        const auto num = [&](double x) { return 1.0 + coth * std::cosh(x) - rp * std::sinh(x); };
        const double nmax = std::max(num(xlo[u]), num(xhi[u]));
        const double xnear = (xlo[u] <= 0.0 && xhi[u] >= 0.0)
                                 ? 0.0
                                 : std::min(std::abs(xlo[u]), std::abs(xhi[u]));
        const double den = std::cosh(xnear) + coth;
        worst = std::max(worst, 2.0 * model.beta * nmax / (den * den));
    }
    cert.lipschitz_bound = jmean * worst;
    cert.certified = cert.lipschitz_bound < 1.0;
    return cert;
}

SelectionProbeResult selection_probe(const MinimizerReport& report, const KacModel& model,
                                     const SolverSettings& settings) {
    require_beta0(model, "selection_probe");
    if (report.global_set.size() < 2)
        throw std::invalid_argument("selection probe requires >= 2 global minimizers");

    const Profile* a = &report.critical_profiles[report.global_set[0]].profile;
    const Profile* b = &report.critical_profiles[report.global_set[1]].profile;
    std::size_t ia = report.global_set[0], ib = report.global_set[1];
    double up = 0.0, down = 0.0;
    for (std::size_t u = 0; u < a->values.size(); ++u) {
        up = std::max(up, a->values[u] - b->values[u]);
        down = std::max(down, b->values[u] - a->values[u]);
    }
    if (down > up) {
        std::swap(a, b);
        std::swap(ia, ib);
        std::swap(up, down);
    }
    const double delta = 0.5 * up;
    std::vector<bool> mask(a->values.size(), false);
    for (std::size_t u = 0; u < mask.size(); ++u)
        mask[u] = a->values[u] - b->values[u] > delta;

    const auto solve_side = [&](double sign) {
        Profile best;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            std::vector<double> v(report.alpha_prime.values);
            for (std::size_t u = 0; u < v.size(); ++u)
                if (mask[u]) v[u] = std::clamp(v[u] + sign * eps, -1.0, 1.0);
            const MinimizerReport r = kac_global_minimizers(
                Profile(report.alpha_prime.grid, std::move(v)), report.t, model, settings,
                {*a, *b});
            best = r.critical_profiles[r.global_set.front()].profile;
        }
        return best;
    };

    SelectionProbeResult out;
    out.limit_plus = solve_side(+1.0);
    out.limit_minus = solve_side(-1.0);

    const double dp_a = sup_distance(out.limit_plus.values, a->values);
    const double dp_b = sup_distance(out.limit_plus.values, b->values);
    const double dm_a = sup_distance(out.limit_minus.values, a->values);
    const double dm_b = sup_distance(out.limit_minus.values, b->values);
    out.matched_plus = dp_a <= dp_b ? ia : ib;
    out.mismatch_plus = std::min(dp_a, dp_b);
    out.matched_minus = dm_a <= dm_b ? ia : ib;
    out.mismatch_minus = std::min(dm_a, dm_b);
    if (out.matched_plus == out.matched_minus)
        throw std::runtime_error("selection anomaly: one-sided limits coincide");
    return out;
}

} // namespace kacld
