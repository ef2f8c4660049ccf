#include "kacld/finite.hpp"

#include "kacld/cw.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace kacld {

namespace {

constexpr std::size_t kEnumerationLimit = 12; // sites, pairs are 2^(2*sites)

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

int block_of(const TorusGrid& lattice, std::size_t site, int blocks) {
    // slabs along axis 0; axis 0 is the most significant in row-major order
    std::size_t stride = 1;
    for (int k = 1; k < lattice.dim; ++k) stride *= lattice.points_per_axis;
    const std::size_t coord0 = site / stride;
    return static_cast<int>(coord0 * static_cast<std::size_t>(blocks) /
                            static_cast<std::size_t>(lattice.points_per_axis));
}

void check_blocks(const LatticeModel& model, int blocks) {
    if (blocks < 1 || blocks > model.n())
        throw std::invalid_argument("block count must be in [1, n]");
}

// local field (1/n^d) sum_{z != x} J((x-z)/n) sigma(z) + h(x/n)
double local_field_excl(const SpinConfig& sigma, std::size_t x, const LatticeModel& model) {
    const std::size_t s = model.sites();
    double acc = 0.0;
    for (std::size_t z = 0; z < s; ++z) {
        if (z == x) continue;
        acc += model.j[model.lattice.lag_index(x, z)] * sigma.spins[z];
    }
    return acc / double(s) + model.h[x];
}

} // namespace

SpinConfig::SpinConfig(int n_, int d_, std::vector<std::int8_t> s)
    : n(n_), d(d_), spins(std::move(s)) {
    const TorusGrid g(d, n);
    if (spins.size() != g.node_count())
        throw std::invalid_argument("spin count does not match lattice");
    for (auto v : spins)
        if (v != 1 && v != -1) throw std::invalid_argument("spins must be +-1");
}

SpinConfig SpinConfig::all_up(int n, int d) {
    const TorusGrid g(d, n);
    return {n, d, std::vector<std::int8_t>(g.node_count(), 1)};
}

double SpinConfig::magnetization() const {
    double acc = 0.0;
    for (auto v : spins) acc += v;
    return acc / double(spins.size());
}

LatticeModel::LatticeModel(const KacModel& model, int n, double rate_scale_)
    : lattice(model.grid().dim, n), beta(model.beta), beta_prime(model.beta_prime),
      rate_scale(rate_scale_) {
    if (!(rate_scale > 0.0)) throw std::invalid_argument("rate scale must be > 0");
    const int m = model.grid().points_per_axis;
    if (m % n != 0)
        throw std::invalid_argument("lattice side must divide the model grid resolution");
    const int stride = m / n;
    const std::size_t s = lattice.node_count();
    j.resize(s);
    h.resize(s);
    for (std::size_t i = 0; i < s; ++i) {
        // map lattice node to the coarse subset of the model grid
        std::size_t coarse = i, fine = 0, place = 1;
        for (int k = 0; k < lattice.dim; ++k) {
            fine += (coarse % n) * static_cast<std::size_t>(stride) * place;
            coarse /= n;
            place *= m;
        }
        j[i] = model.kernel.values[fine];
        h[i] = model.field.values[fine];
    }
}

GridFunction EmpiricalMeasure::density() const {
    std::vector<double> v(weights.size());
    const double scale = perforated_site ? double(weights.size()) - 1.0
                                         : double(weights.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = weights[i] * scale;
    return {lattice, std::move(v)};
}

double hamiltonian_n(const SpinConfig& sigma, const LatticeModel& model) {
    if (sigma.site_count() != model.sites()) throw std::invalid_argument("lattice mismatch");
    const std::size_t s = model.sites();
    double pair = 0.0, field = 0.0;
    for (std::size_t x = 0; x < s; ++x) {
        for (std::size_t y = 0; y < s; ++y)
            pair += model.j[model.lattice.lag_index(x, y)] * sigma.spins[x] * sigma.spins[y];
        field += model.h[x] * sigma.spins[x];
    }
    return -0.5 * pair / double(s) - field;
}

double heat_bath_up_probability(const SpinConfig& sigma, std::size_t x,
                                const LatticeModel& model) {
    const double f = local_field_excl(sigma, x, model);
    return 1.0 / (1.0 + std::exp(-2.0 * model.beta * f));
}

SpinConfig equilibrium_sample(const LatticeModel& model, int sweeps, std::uint64_t seed) {
    if (sweeps < 0) throw std::invalid_argument("sweeps must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t s = model.sites();
    std::vector<std::int8_t> spins(s);
    for (auto& v : spins) v = unif(rng) < 0.5 ? 1 : -1;
    SpinConfig cfg(model.n(), model.d(), std::move(spins));
    for (int sweep = 0; sweep < sweeps; ++sweep)
        for (std::size_t x = 0; x < s; ++x)
            cfg.spins[x] = unif(rng) < heat_bath_up_probability(cfg, x, model) ? 1 : -1;
    return cfg;
}

SimRun glauber_simulate(const SpinConfig& start, const LatticeModel& model, double t,
                        std::uint64_t seed, const std::vector<double>& sample_times,
                        int blocks) {
    if (start.site_count() != model.sites()) throw std::invalid_argument("lattice mismatch");
    if (!(t >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
    check_blocks(model, blocks);

    SimRun run;
    run.seed = seed;
    run.horizon = t;
    run.rate_scale = model.rate_scale;
    run.blocks = blocks;
    run.final_config = start;

    std::vector<double> times(sample_times);
    std::sort(times.begin(), times.end());
    for (double s : times)
        if (!(s >= 0.0 && s <= t)) throw std::invalid_argument("sample time outside [0,t]");

    const std::size_t s = model.sites();
    std::vector<int> block_index(s);
    std::vector<int> block_count(blocks, 0);
    for (std::size_t x = 0; x < s; ++x) {
        block_index[x] = block_of(model.lattice, x, blocks);
        ++block_count[block_index[x]];
    }
    std::vector<double> block_sum(blocks, 0.0);
    for (std::size_t x = 0; x < s; ++x) block_sum[block_index[x]] += start.spins[x];

    const auto record = [&](double at) {
        SimSample sample;
        sample.time = at;
        sample.block_means.resize(blocks);
        for (int b = 0; b < blocks; ++b) sample.block_means[b] = block_sum[b] / block_count[b];
        run.samples.push_back(std::move(sample));
    };

    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> expo(model.rate_scale * double(s));
    std::uniform_int_distribution<std::size_t> pick(0, s - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    double clock = 0.0;
    std::size_t next_sample = 0;
    SpinConfig& cfg = run.final_config;
    for (;;) {
        const double wait = expo(rng);
        const double next_clock = clock + wait;
        while (next_sample < times.size() && times[next_sample] <= next_clock &&
               times[next_sample] <= t)
            record(times[next_sample++]);
        if (next_clock > t) break;
        clock = next_clock;
        ++run.clock_events;
        const std::size_t x = pick(rng);
        double accept = 0.5;
        if (model.beta_prime != 0.0) {
            const double z = model.beta_prime * cfg.spins[x] * local_field_excl(cfg, x, model);
            accept = std::exp(-z) / (2.0 * std::cosh(z));
        }
        if (unif(rng) < accept) {
            block_sum[block_index[x]] -= 2.0 * cfg.spins[x];
            cfg.spins[x] = -cfg.spins[x];
            ++run.flips;
        }
    }
    while (next_sample < times.size()) record(times[next_sample++]);
    return run;
}

EmpiricalMeasure empirical_density(const SpinConfig& sigma,
                                   std::optional<std::size_t> perforation) {
    EmpiricalMeasure out;
    out.lattice = TorusGrid(sigma.d, sigma.n);
    out.perforated_site = perforation;
    const std::size_t s = sigma.site_count();
    if (perforation && *perforation >= s)
        throw std::invalid_argument("perforation site out of range");
    const double w = perforation ? 1.0 / (double(s) - 1.0) : 1.0 / double(s);
    out.weights.resize(s, 0.0);
    double mass = 0.0;
    for (std::size_t x = 0; x < s; ++x) {
        if (perforation && x == *perforation) continue;
        out.weights[x] = sigma.spins[x] * w;
        mass += out.weights[x];
    }
    out.total_mass = mass;
    return out;
}

std::vector<int> perforated_block_sums(const SpinConfig& sigma, std::size_t perforated,
                                       int blocks) {
    const TorusGrid lattice(sigma.d, sigma.n);
    if (perforated >= sigma.site_count())
        throw std::invalid_argument("perforation site out of range");
    std::vector<int> sums(blocks, 0);
    for (std::size_t x = 0; x < sigma.site_count(); ++x) {
        if (x == perforated) continue;
        sums[block_of(lattice, x, blocks)] += sigma.spins[x];
    }
    return sums;
}

std::vector<int> realizable_block_sums(const LatticeModel& model, std::size_t perforated,
                                       int blocks, double c_prime) {
    check_blocks(model, blocks);
    if (!(std::abs(c_prime) <= 1.0)) throw std::invalid_argument("target outside [-1,1]");
    std::vector<int> count(blocks, 0);
    for (std::size_t x = 0; x < model.sites(); ++x)
        if (x != perforated) ++count[block_of(model.lattice, x, blocks)];
    std::vector<int> sums(blocks, 0);
    for (int b = 0; b < blocks; ++b) {
        const int c = count[b];
        int k = static_cast<int>(std::lround(c_prime * c));
        if (((k % 2) + 2) % 2 != c % 2) {
            const double target = c_prime * c;
            k = target >= k ? k + 1 : k - 1;
        }
        sums[b] = std::clamp(k, -c, c);
    }
    return sums;
}

namespace {

struct Enumeration {
    std::size_t sites;
    std::vector<double> boltzmann; // exp(-beta H) per configuration mask
    double z = 0.0;

    Enumeration(const LatticeModel& model) : sites(model.sites()) {
        if (sites > kEnumerationLimit)
            throw std::invalid_argument("enumeration limited to " +
                                        std::to_string(kEnumerationLimit) + " sites");
        const std::size_t states = std::size_t(1) << sites;
        boltzmann.resize(states);
        std::vector<std::int8_t> spins(sites);
        for (std::size_t mask = 0; mask < states; ++mask) {
            for (std::size_t x = 0; x < sites; ++x)
                spins[x] = (mask >> x) & 1 ? 1 : -1;
            const SpinConfig cfg(model.n(), model.d(), spins);
            boltzmann[mask] = std::exp(-model.beta * hamiltonian_n(cfg, model));
            z += boltzmann[mask];
        }
    }
};

// pw[k]: probability that exactly k given sites disagree between sigma_0 and
// sigma_t under independent flips, relaxation factor e = exp(-rate_scale t)
std::vector<double> disagreement_weights(std::size_t sites, double e) {
    std::vector<double> pw(sites + 1);
    const double agree = 0.5 * (1.0 + e), differ = 0.5 * (1.0 - e);
    for (std::size_t k = 0; k <= sites; ++k)
        pw[k] = std::pow(agree, double(sites - k)) * std::pow(differ, double(k));
    return pw;
}

} // namespace

KernelValue exact_conditional_gamma(const LatticeModel& model, double t, std::size_t u_site,
                                    const std::vector<int>& block_sums, int blocks) {
    if (model.beta_prime != 0.0)
        throw std::invalid_argument("exact oracle requires beta_prime = 0");
    if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
    check_blocks(model, blocks);
    if (static_cast<int>(block_sums.size()) != blocks)
        throw std::invalid_argument("one target sum per block required");
    const std::size_t s = model.sites();
    if (u_site >= s) throw std::invalid_argument("site index out of range");

    const Enumeration en(model);
    const std::size_t states = std::size_t(1) << s;
    const std::vector<double> pw = disagreement_weights(s, std::exp(-model.rate_scale * t));

    std::vector<int> block_index(s);
    for (std::size_t x = 0; x < s; ++x)
        block_index[x] = block_of(model.lattice, x, blocks);

    double num_plus = 0.0, den = 0.0;
    std::vector<int> sums(blocks);
    for (std::size_t tau = 0; tau < states; ++tau) {
        std::fill(sums.begin(), sums.end(), 0);
        for (std::size_t x = 0; x < s; ++x) {
            if (x == u_site) continue;
            sums[block_index[x]] += (tau >> x) & 1 ? 1 : -1;
        }
        if (!std::equal(sums.begin(), sums.end(), block_sums.begin())) continue;
        double p = 0.0;
        for (std::size_t sig = 0; sig < states; ++sig)
            p += en.boltzmann[sig] * pw[std::size_t(std::popcount(sig ^ tau))];
        den += p;
        if ((tau >> u_site) & 1) num_plus += p;
    }
    if (den == 0.0) throw std::invalid_argument("empty conditioning class");
    return {num_plus / den, 1.0 - num_plus / den};
}

McGammaResult mc_conditional_gamma(const LatticeModel& model, double t,
                                   const std::vector<double>& alpha_prime_block_means,
                                   double ball, std::size_t u_site, std::uint64_t seed,
                                   const McGammaSettings& settings) {
    if (model.beta_prime != 0.0 && model.beta_prime < 0.0)
        throw std::invalid_argument("invalid beta_prime");
    check_blocks(model, settings.blocks);
    if (static_cast<int>(alpha_prime_block_means.size()) != settings.blocks)
        throw std::invalid_argument("one target mean per block required");
    if (!(ball > 0.0)) throw std::invalid_argument("tolerance ball must be > 0");
    const std::size_t s = model.sites();
    if (u_site >= s) throw std::invalid_argument("site index out of range");

    std::vector<int> block_index(s);
    std::vector<int> count(settings.blocks, 0);
    for (std::size_t x = 0; x < s; ++x) {
        block_index[x] = block_of(model.lattice, x, settings.blocks);
        if (x != u_site) ++count[block_index[x]];
    }

    McGammaResult out;
    std::size_t plus = 0;
    while (out.accepted < settings.min_accepted) {
        if (out.attempts >= settings.max_attempts)
            throw std::runtime_error("acceptance starvation: ball too small");
        const std::uint64_t rep_seed = splitmix64(seed ^ (out.attempts * 0x51ed2701ull));
        ++out.attempts;
        const SpinConfig init = equilibrium_sample(model, settings.sweeps, rep_seed);
        const SimRun run = glauber_simulate(init, model, t, splitmix64(rep_seed), {}, 1);
        const SpinConfig& fin = run.final_config;

        bool ok = true;
        std::vector<double> sums(settings.blocks, 0.0);
        for (std::size_t x = 0; x < s; ++x) {
            if (x == u_site) continue;
            sums[block_index[x]] += fin.spins[x];
        }
        for (int b = 0; b < settings.blocks && ok; ++b)
            ok = std::abs(sums[b] / count[b] - alpha_prime_block_means[b]) <= ball;
        if (!ok) continue;
        ++out.accepted;
        if (fin.spins[u_site] > 0) ++plus;
    }
    out.p_plus = double(plus) / double(out.accepted);
    out.std_error = std::sqrt(std::max(out.p_plus * (1.0 - out.p_plus), 1e-12) /
                              double(out.accepted));
    out.acceptance = double(out.accepted) / double(out.attempts);
    return out;
}

namespace {

// scalar endpoint cost with the mean-field parameters; handles j = 0
double scalar_cost(double m, double c_prime, double t, double jcw, double hcw) {
    return -0.5 * jcw * m * m - hcw * m + entropy_phi(m) + cw_action(m, c_prime, t);
}

double scalar_infimum(double c_prime, double t, double jcw, double hcw, bool with_action) {
    double best = std::numeric_limits<double>::infinity();
    double best_m = 0.0;
    for (int k = 0; k <= 400; ++k) {
        const double m = -1.0 + k / 200.0;
        const double v = with_action ? scalar_cost(m, c_prime, t, jcw, hcw)
                                     : -0.5 * jcw * m * m - hcw * m + entropy_phi(m);
        if (v < best) {
            best = v;
            best_m = m;
        }
    }
    const double lo = std::max(-1.0, best_m - 1.0 / 200.0);
    const double hi = std::min(1.0, best_m + 1.0 / 200.0);
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    const auto f = [&](double m) {
        return with_action ? scalar_cost(m, c_prime, t, jcw, hcw)
                           : -0.5 * jcw * m * m - hcw * m + entropy_phi(m);
    };
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return f(0.5 * (a + b));
}

} // namespace

LdpProbeResult ldp_probe(const KacModel& model, double t, double c_prime,
                         const std::vector<int>& n_list, double rate_scale) {
    if (model.beta_prime != 0.0)
        throw std::invalid_argument("ldp_probe requires beta_prime = 0");
    if (!(std::abs(c_prime) <= 1.0)) throw std::invalid_argument("target outside [-1,1]");
    double hbar = model.field.values.front();
    for (double h : model.field.values)
        if (std::abs(h - hbar) > 1e-12)
            throw std::invalid_argument("ldp_probe supports constant fields only");

    LdpProbeResult out;
    const double jcw = model.beta * kernel_mean(model.kernel);
    out.variational_value = scalar_infimum(c_prime, t, jcw, model.beta * hbar, true);
    out.static_infimum = scalar_infimum(c_prime, t, jcw, model.beta * hbar, false);

    for (int n : n_list) {
        const LatticeModel lattice(model, n, rate_scale);
        const std::size_t s = lattice.sites();
        LdpRow row;
        row.n = n;
        // nearest realizable total spin with the parity of the site count
        int target = static_cast<int>(std::lround(c_prime * double(s)));
        if (((target % 2) + 2) % 2 != static_cast<int>(s % 2)) {
            target = c_prime * double(s) >= target ? target + 1 : target - 1;
        }
        target = std::clamp<int>(target, -int(s), int(s));

        if (s <= kEnumerationLimit) {
            const Enumeration en(lattice);
            const std::size_t states = std::size_t(1) << s;
            const std::vector<double> pw =
                disagreement_weights(s, std::exp(-rate_scale * t));
            double pclass = 0.0;
            for (std::size_t tau = 0; tau < states; ++tau) {
                const int total = 2 * std::popcount(tau) - int(s);
                if (total != target) continue;
                for (std::size_t sig = 0; sig < states; ++sig)
                    pclass += en.boltzmann[sig] * pw[std::size_t(std::popcount(sig ^ tau))];
            }
            pclass /= en.z;
            row.value = -std::log(pclass) / double(s);
            row.exact = true;
        } else {
            constexpr std::size_t replicas = 20000;
            std::size_t hits = 0;
            for (std::size_t r = 0; r < replicas; ++r) {
                const std::uint64_t rs = splitmix64(0xabcdef12u ^ (r * 7919u) ^ n);
                const SpinConfig init = equilibrium_sample(lattice, 1000, rs);
                const SimRun run = glauber_simulate(init, lattice, t, splitmix64(rs), {}, 1);
                int total = 0;
                for (auto v : run.final_config.spins) total += v;
                if (total == target) ++hits;
            }
            const double p = std::max(double(hits) / double(replicas), 1e-12);
            row.value = -std::log(p) / double(s);
            row.exact = false;
            row.std_error = std::sqrt(p * (1.0 - p) / double(replicas)) / (p * double(s));
        }
        out.rows.push_back(row);
    }
    return out;
}

} // namespace kacld
