#include "kacld/cw.hpp"

#include "kacld/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <doctest.h>

using namespace kacld;

namespace {

// discrete-path oracle: dynamic programming over piecewise-linear paths on
// a magnetization lattice, independent of the quadrature route
double dp_action(double m0, double m1, double t, int tsteps, int mnodes, double qmax) {
    const double dt = t / tsteps;
    const double dm = 2.0 / (mnodes - 1);
    const int window = std::max(1, int(std::ceil(qmax * dt / dm)));
    const double big = 1e100;
    const auto node_m = [&](int i) { return -1.0 + i * dm; };
    const int start = int(std::lround((m0 + 1.0) / dm));
    const int goal = int(std::lround((m1 + 1.0) / dm));
    std::vector<double> cost(mnodes, big), next(mnodes, big);
    cost[start] = 0.0;
    for (int k = 0; k < tsteps; ++k) {
        std::fill(next.begin(), next.end(), big);
        for (int i = 0; i < mnodes; ++i) {
            if (cost[i] >= big) continue;
            for (int j = std::max(0, i - window); j <= std::min(mnodes - 1, i + window);
                 ++j) {
                const double q = (node_m(j) - node_m(i)) / dt;
                const double mid = 0.5 * (node_m(i) + node_m(j));
                const double c = cost[i] + dt * cw_lagrangian(mid, q);
                if (c < next[j]) next[j] = c;
            }
        }
        cost.swap(next);
    }
    return cost[goal];
}

// endpoint rate by Sanov on the pair law of (sigma_0, sigma_t): minimal
// relative entropy over couplings with the prescribed marginals
double coupling_kl_action(double m, double mp, double t) {
    const double e = std::exp(-2.0 * t);
    const double r = std::pow((1.0 + e) / (1.0 - e), 2);
    const double pm = 0.5 * (1.0 + m), pmp = 0.5 * (1.0 + mp);
    const double a = 1.0 - r;
    const double b = (1.0 - pm - pmp) + r * (pm + pmp);
    const double c = -r * pm * pmp;
    double x;
    if (std::abs(a) < 1e-14) {
        x = -c / b;
    } else {
        const double disc = std::sqrt(b * b - 4.0 * a * c);
        const double x1 = (-b + disc) / (2.0 * a), x2 = (-b - disc) / (2.0 * a);
        const auto ok = [&](double v) { return v > 0.0 && v < std::min(pm, pmp) + 1e-15; };
        x = ok(x1) ? x1 : x2;
    }
    const double q[4] = {x, pm - x, pmp - x, 1.0 - pm - pmp + x};
    const double pt[4] = {0.5 * (1 + e), 0.5 * (1 - e), 0.5 * (1 - e), 0.5 * (1 + e)};
    const double rho[4] = {pm, pm, 1.0 - pm, 1.0 - pm};
    double kl = 0.0;
    for (int k = 0; k < 4; ++k)
        if (q[k] > 0.0) kl += q[k] * std::log(q[k] / (rho[k] * pt[k]));
    return kl;
}

} // namespace

TEST_CASE("lagrangian examples and zero-cost flow") {
    CHECK(cw_lagrangian(0.0, 0.0) == 0.0);
    for (double m : {-0.9, -0.5, 0.0, 0.5, 0.9})
        CHECK(std::abs(cw_lagrangian(m, -2.0 * m)) <= 1e-12);
    CHECK(cw_lagrangian(0.5, 0.0) == doctest::Approx(0.1339745962155614).epsilon(1e-12));
    CHECK_THROWS_AS(cw_lagrangian(1.1, 0.0), std::domain_error);

    // positive away from the flow, symmetric under global spin flip
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> md(-0.98, 0.98), qd(-4.0, 4.0);
    for (int rep = 0; rep < 300; ++rep) {
        const double m = md(rng), q = qd(rng);
        if (std::abs(q + 2.0 * m) > 1e-6) CHECK(cw_lagrangian(m, q) > 0.0);
        CHECK(cw_lagrangian(m, q) == doctest::Approx(cw_lagrangian(-m, -q)).epsilon(1e-12));
    }
    // closed-interval limits
    CHECK(std::abs(cw_lagrangian(1.0, -2.0)) <= 1e-12);
    CHECK(std::abs(cw_lagrangian(-1.0, 2.0)) <= 1e-12);
    CHECK(cw_lagrangian(1.0, 0.5) == std::numeric_limits<double>::infinity());
    CHECK(cw_lagrangian(-1.0, -0.5) == std::numeric_limits<double>::infinity());
    CHECK(cw_lagrangian(1.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("trajectory endpoints, interpolation and ODE") {
    CHECK(cw_trajectory(0.3, -0.8, 2.0, 0.0) == 0.3);
    CHECK(cw_trajectory(0.3, -0.8, 2.0, 2.0) == -0.8);
    CHECK(cw_trajectory(0.0, 1.0, 1.0, 0.5) ==
          doctest::Approx(0.3240271368319427).epsilon(1e-12));
    CHECK_THROWS_AS(cw_trajectory(0.2, 0.3, 0.0, 0.0), std::invalid_argument);
    CHECK(cw_trajectory(0.4, 0.4, 0.0, 0.0) == 0.4);

    // phi'' = 4 phi by centered differences
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> md(-1.0, 1.0), td(0.05, 4.0);
    for (int rep = 0; rep < 100; ++rep) {
        const double m = md(rng), mp = md(rng), t = td(rng);
        std::uniform_real_distribution<double> sd(0.05 * t, 0.95 * t);
        const double s = sd(rng), d = 1e-4;
        const double acc = (cw_trajectory(m, mp, t, s + d) - 2.0 * cw_trajectory(m, mp, t, s) +
                            cw_trajectory(m, mp, t, s - d)) /
                           (d * d);
        CHECK(std::abs(acc - 4.0 * cw_trajectory(m, mp, t, s)) <= 1e-6);
    }
}

TEST_CASE("trajectory velocity") {
    CHECK(cw_trajectory_velocity(0.0, 0.0, 1.0, 0.3) == 0.0);
    CHECK(cw_trajectory_velocity(0.0, 1.0, 1.0, 0.0) ==
          doctest::Approx(0.5514411295435664).epsilon(1e-12));
    CHECK_THROWS_AS(cw_trajectory_velocity(0.0, 0.0, 0.0, 0.0), std::invalid_argument);

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> md(-1.0, 1.0), td(0.05, 4.0);
    SUBCASE("matches centered differences") {
        for (int rep = 0; rep < 100; ++rep) {
            const double m = md(rng), mp = md(rng), t = td(rng);
            std::uniform_real_distribution<double> sd(0.05 * t, 0.95 * t);
            const double s = sd(rng), d = 1e-5;
            const double fd =
                (cw_trajectory(m, mp, t, s + d) - cw_trajectory(m, mp, t, s - d)) / (2.0 * d);
            CHECK(cw_trajectory_velocity(m, mp, t, s) == doctest::Approx(fd).epsilon(1e-7));
        }
    }
    SUBCASE("pure relaxation has velocity -2 phi") {
        for (double t : {0.3, 1.0, 2.5}) {
            const double m = 0.7, mp = m * std::exp(-2.0 * t);
            for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                const double s = frac * t;
                CHECK(cw_trajectory_velocity(m, mp, t, s) ==
                      doctest::Approx(-2.0 * cw_trajectory(m, mp, t, s)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("action: sentinels, zero-cost flow, oracles") {
    CHECK(cw_action(0.4, 0.4, 0.0) == 0.0);
    CHECK(cw_action(0.4, 0.3, 0.0) == std::numeric_limits<double>::infinity());
    CHECK(cw_action(0.0, 0.0, 2.7) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(cw_action(0.7, 0.7 * std::exp(-1.0), 0.5)) <= 1e-8);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> md(-0.9, 0.9), td(0.05, 3.0);
    SUBCASE("zero-cost relaxation across random endpoints") {
        for (int rep = 0; rep < 25; ++rep) {
            const double m = md(rng), t = td(rng);
            CHECK(std::abs(cw_action(m, m * std::exp(-2.0 * t), t)) <= 1e-8);
        }
    }
    SUBCASE("discrete-path dynamic programming oracle") {
        const double v = cw_action(0.0, 0.5, 1.0);
        CHECK(v == doctest::Approx(0.1331387337913).epsilon(1e-9));
        CHECK(std::abs(v - dp_action(0.0, 0.5, 1.0, 200, 2001, 8.0)) <= 1e-3);
    }
    SUBCASE("coupling relative-entropy oracle") {
        for (int rep = 0; rep < 200; ++rep) {
            const double m = md(rng), mp = md(rng), t = td(rng);
            CHECK(std::abs(cw_action(m, mp, t) - coupling_kl_action(m, mp, t)) <= 1e-7);
        }
    }
    SUBCASE("closed form tracks quadrature") {
        std::uniform_real_distribution<double> wide(-0.999, 0.999);
        for (int rep = 0; rep < 400; ++rep) {
            const double m = wide(rng), mp = wide(rng), t = td(rng);
            CHECK(std::abs(cw_action(m, mp, t) - cw_action_closed(m, mp, t)) <= 1e-7);
        }
    }
    SUBCASE("edge clamp is reported") {
        bool clamped = false;
        cw_action(1.0, 0.2, 1.0, &clamped);
        CHECK(clamped);
        clamped = false;
        cw_action(0.5, 0.2, 1.0, &clamped);
        CHECK_FALSE(clamped);
    }
}

TEST_CASE("trajectory optimality under admissible perturbations") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> md(-0.8, 0.8), td(0.2, 2.0), ad(-1.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const double m = md(rng), mp = md(rng), t = td(rng);
        const double base = cw_action(m, mp, t);
        // random sine perturbation vanishing at both endpoints
        const int modes = 3;
        double amp[modes];
        for (double& a : amp) a = ad(rng);
        double sup = 0.0;
        for (int k = 0; k <= 100; ++k) {
            double v = 0.0;
            const double s = std::min(t, t * k / 100.0);
            for (int mm = 0; mm < modes; ++mm)
                v += amp[mm] * std::sin((mm + 1) * M_PI * s / t);
            sup = std::max(sup, std::abs(v));
        }
        const double scale = 0.1 / std::max(sup, 1e-9);
        const auto eta = [&](double s) {
            double v = 0.0;
            for (int mm = 0; mm < modes; ++mm)
                v += amp[mm] * std::sin((mm + 1) * M_PI * s / t);
            return scale * v;
        };
        const auto eta_dot = [&](double s) {
            double v = 0.0;
            for (int mm = 0; mm < modes; ++mm)
                v += amp[mm] * (mm + 1) * M_PI / t * std::cos((mm + 1) * M_PI * s / t);
            return scale * v;
        };
        // keep the perturbed path strictly inside (-1, 1)
        bool admissible = true;
        for (int k = 0; k <= 200 && admissible; ++k) {
            const double s = std::min(t, t * k / 200.0);
            admissible = std::abs(cw_trajectory(m, mp, t, s) + eta(s)) < 0.995;
        }
        if (!admissible) continue;
        const auto integrand = [&](double s) {
            s = std::clamp(s, 0.0, t);
            return cw_lagrangian(cw_trajectory(m, mp, t, s) + eta(s),
                                 cw_trajectory_velocity(m, mp, t, s) + eta_dot(s));
        };
        const double perturbed = integrate(integrand, 0.0, t, 1e-11);
        CHECK(perturbed >= base - 1e-10);
    }
}

TEST_CASE("static rate and total cost") {
    const CWModel cw(1.0, 0.0);
    CHECK(cw_static_rate(0.0, cw) == 0.0);
    CHECK(cw_static_rate(1.0, cw) == doctest::Approx(0.19314718055994531).epsilon(1e-14));
    for (double m : {0.2, 0.7})
        CHECK(cw_static_rate(m, cw) == doctest::Approx(cw_static_rate(-m, cw)));

    CHECK(cw_cost(0.4, 0.3, 0.0, cw) == std::numeric_limits<double>::infinity());
    CHECK(std::abs(cw_cost(0.0, 0.0, 8.0, cw)) <= 1e-10);
    CHECK(cw_cost(0.5, 0.5 * std::exp(-2.0), 1.0, cw) ==
          doctest::Approx(0.005812035941136967).epsilon(1e-7));

    // h = 0 symmetry of the full cost
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> md(-0.95, 0.95), td(0.1, 3.0);
    for (int rep = 0; rep < 50; ++rep) {
        const double m = md(rng), mp = md(rng), t = td(rng);
        CHECK(std::abs(cw_cost(m, mp, t, cw) - cw_cost(-m, -mp, t, cw)) <= 1e-12);
    }
}

TEST_CASE("cost slope matches finite differences") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> md(-0.9, 0.9), td(0.1, 3.0);
    const CWModel cw(1.4, 0.2);
    for (int rep = 0; rep < 60; ++rep) {
        const double m = md(rng), mp = md(rng), t = td(rng);
        const double d = 1e-6;
        const double fd =
            (cw_cost(m + d, mp, t, cw) - cw_cost(m - d, mp, t, cw)) / (2.0 * d);
        const double slope = cw_cost_slope(m, mp, t, cw.j_cw * m + cw.h_cw);
        CHECK(slope == doctest::Approx(fd).epsilon(5e-5));
    }
}

TEST_CASE("global minima scenarios from the phase table") {
    SUBCASE("subcritical coupling: always one minimum") {
        const CWModel cw(0.5, 0.0);
        for (double t : {0.2, 1.0, 4.0})
            for (double mp : {-0.8, -0.3, 0.0, 0.4, 0.9}) {
                const auto curve = cw_global_minima(t, mp, cw);
                CHECK(curve.minima.size() == 1);
                CHECK(curve.global_set.size() == 1);
            }
    }
    SUBCASE("monotone structure for j <= 1") {
        const CWModel cw(1.0, 0.0);
        for (double t : {0.3, 1.5})
            for (double mp : {-0.6, 0.0, 0.7})
                CHECK(cw_global_minima(t, mp, cw).minima.size() == 1);
    }
    SUBCASE("supercritical symmetric pair at m' = 0, large t") {
        const CWModel cw(2.0, 0.0);
        const auto curve = cw_global_minima(4.0, 0.0, cw);
        REQUIRE(curve.global_set.size() == 2);
        // the pair solves artanh(m) = 2m
        double lo = 0.5, hi = 0.99;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (std::atanh(mid) - 2.0 * mid < 0.0 ? lo : hi) = mid;
        }
        const double mstar = 0.5 * (lo + hi);
        CHECK(curve.minima[curve.global_set[0]].m == doctest::Approx(-mstar).epsilon(1e-6));
        CHECK(curve.minima[curve.global_set[1]].m == doctest::Approx(mstar).epsilon(1e-6));
        for (const auto& mn : curve.minima) CHECK(std::abs(mn.m) < 1.0);
    }
    SUBCASE("supercritical but short time: unique") {
        const CWModel cw(2.0, 0.0);
        CHECK(cw_global_minima(0.05, 0.0, cw).global_set.size() == 1);
    }
}

TEST_CASE("bad sets follow the bifurcation table") {
    SUBCASE("j <= 1: empty for all t") {
        for (double j : {0.5, 1.0})
            for (double t : {0.2, 0.8, 2.0})
                CHECK(cw_bad_set(t, CWModel(j, 0.0)).bad_points.empty());
    }
    SUBCASE("j = 1.2: empty before the transition, {0} after") {
        const CWModel cw(1.2, 0.0);
        CHECK(cw_bad_set(0.3, cw).bad_points.empty());
        const auto bs = cw_bad_set(0.6, cw);
        REQUIRE(bs.bad_points.size() == 1);
        CHECK(std::abs(bs.bad_points[0].m_prime) <= 1e-3);
        CHECK(bad_set_signature(bs) == "{0}");
    }
    SUBCASE("j = 2: symmetric pair phase then {0}") {
        const CWModel cw(2.0, 0.0);
        CHECK(cw_bad_set(0.1, cw).bad_points.empty());
        const auto pair = cw_bad_set(0.14, cw);
        REQUIRE(pair.bad_points.size() == 2);
        CHECK(std::abs(pair.bad_points[0].m_prime + pair.bad_points[1].m_prime) <= 1e-6);
        CHECK(pair.bad_points[1].m_prime > 1e-3);
        CHECK(bad_set_signature(pair) == "{+-c}");
        const auto late = cw_bad_set(0.5, cw);
        REQUIRE(late.bad_points.size() == 1);
        CHECK(std::abs(late.bad_points[0].m_prime) <= 1e-3);
    }
    SUBCASE("bad sets are symmetric when h = 0") {
        const auto bs = cw_bad_set(0.145, CWModel(2.0, 0.0));
        REQUIRE(bs.bad_points.size() == 2);
        CHECK(std::abs(bs.bad_points[0].m_prime + bs.bad_points[1].m_prime) <= 1e-6);
        CHECK(std::abs(bs.bad_points[0].minimizer_low + bs.bad_points[1].minimizer_high) <=
              1e-4);
    }
}

TEST_CASE("transition features") {
    SUBCASE("j = 0.9: nothing in the window") {
        CHECK(detect_transition_times(CWModel(0.9, 0.0), 1.0, 0.1).empty());
    }
    SUBCASE("j = 1.2: one feature, empty to {0}") {
        const auto f = detect_transition_times(CWModel(1.2, 0.0), 0.8, 0.1);
        REQUIRE(f.size() == 1);
        CHECK(f[0].label == "Psi_c");
        CHECK(f[0].t == doctest::Approx(0.4479).epsilon(2e-3));
        CHECK(f[0].bad_set_before == "empty");
    }
    SUBCASE("j = 2: empty to pairs to {0}") {
        const auto f = detect_transition_times(CWModel(2.0, 0.0), 0.3, 0.01);
        REQUIRE(f.size() == 2);
        CHECK(f[0].label == "Psi_U");
        CHECK(f[1].label == "Psi_c");
        CHECK(f[0].t < f[1].t);
        CHECK(f[0].t == doctest::Approx(0.1293).epsilon(2e-2));
        CHECK(f[1].t == doctest::Approx(0.1530).epsilon(2e-2));
    }
}
