#include "kacld/torus.hpp"

#include "test_util.hpp"

#include <cmath>
#include <random>

#include <doctest.h>

using namespace kacld;

TEST_CASE("grid geometry and index arithmetic") {
    TorusGrid g(2, 4);
    CHECK(g.node_count() == 16);
    CHECK(g.spacing() == doctest::Approx(0.25));
    // lag of a node with itself is zero
    for (std::size_t i = 0; i < 16; ++i) CHECK(g.lag_index(i, i) == 0);
    // reflection is an involution
    for (std::size_t i = 0; i < 16; ++i) CHECK(g.reflect_index(g.reflect_index(i)) == i);
    CHECK_THROWS_AS(TorusGrid(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(TorusGrid(1, 1), std::invalid_argument);
}

TEST_CASE("type invariants are enforced") {
    TorusGrid g(1, 4);
    CHECK_THROWS_AS(Profile(g, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(Profile(g, std::vector<double>{0.0, 0.0, 2.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(InteractionKernel(g, std::vector<double>{1.0, -0.5, 1.0, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(InteractionKernel(g, std::vector<double>{0.0, 0.0, 0.0, 0.0}),
                    std::invalid_argument);
    // asymmetric beyond 1e-12 rejected
    CHECK_THROWS_AS(InteractionKernel(g, std::vector<double>{1.0, 0.5, 1.0, 0.6}),
                    std::invalid_argument);
    // tiny asymmetry symmetrized
    InteractionKernel k(g, std::vector<double>{1.0, 0.5, 1.0, 0.5 + 5e-13});
    CHECK(k.values[1] == k.values[3]);
    CHECK_THROWS_AS(ExternalField(g, std::vector<double>{0.0, 1.0 / 0.0, 0.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("convolution examples") {
    TorusGrid g(1, 4);
    SUBCASE("constant kernel averages") {
        InteractionKernel j(g, 1.0);
        Profile a(g, std::vector<double>{0.2, -0.4, 0.8, 0.6});
        const auto out = convolve(j, a);
        for (double v : out.values) CHECK(v == doctest::Approx(a.mean()).epsilon(1e-14));
    }
    SUBCASE("zero profile maps to zero") {
        InteractionKernel j(g, 1.0);
        const auto out = convolve(j, Profile(g, 0.0));
        for (double v : out.values) CHECK(v == 0.0);
    }
    SUBCASE("unit Riemann mass at lag 0 is the identity") {
        InteractionKernel j(g, std::vector<double>{4.0, 0.0, 0.0, 0.0});
        Profile a(g, std::vector<double>{1.0, -1.0, 1.0, -1.0});
        const auto out = convolve(j, a);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(out.values[i] == doctest::Approx(a.values[i]).epsilon(1e-14));
    }
    SUBCASE("grid mismatch is an error") {
        InteractionKernel j(g, 1.0);
        CHECK_THROWS_AS(convolve(j, Profile(TorusGrid(1, 8), 0.0)), std::invalid_argument);
    }
}

TEST_CASE("convolution symmetry <J*a,g> = <a,J*g>") {
    std::mt19937_64 rng(7);
    for (int d : {1, 2}) {
        TorusGrid g(d, d == 1 ? 32 : 6);
        const auto j = testutil::random_kernel(g, rng);
        for (int rep = 0; rep < 10; ++rep) {
            const auto a = testutil::random_profile(g, rng);
            const auto b = testutil::random_profile(g, rng);
            CHECK(std::abs(grid_inner(convolve(j, a), b) - grid_inner(a, convolve(j, b))) <=
                  1e-12);
        }
    }
}

TEST_CASE("fft path agrees with the direct Riemann sum") {
    TorusGrid g(1, 8192); // above the direct-summation threshold
    std::mt19937_64 rng(11);
    const auto j = testutil::random_kernel(g, rng);
    const auto a = testutil::random_profile(g, rng);
    const auto out = convolve(j, a);
    std::uniform_int_distribution<std::size_t> pick(0, g.node_count() - 1);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t i = pick(rng);
        double acc = 0.0;
        for (std::size_t k = 0; k < g.node_count(); ++k)
            acc += j.values[g.lag_index(i, k)] * a.values[k];
        acc /= double(g.node_count());
        CHECK(out.values[i] == doctest::Approx(acc).epsilon(1e-11));
    }
}

TEST_CASE("kernel mean") {
    TorusGrid g(1, 4);
    CHECK(kernel_mean(InteractionKernel(g, 1.0)) == doctest::Approx(1.0));
    CHECK(kernel_mean(InteractionKernel(g, 0.5)) == doctest::Approx(0.5));
    CHECK(kernel_mean(InteractionKernel(g, std::vector<double>{4.0, 0.0, 0.0, 0.0})) ==
          doctest::Approx(1.0));
}

TEST_CASE("relative entropy") {
    CHECK(entropy_phi(0.0) == 0.0);
    CHECK(entropy_phi(1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(entropy_phi(-1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(entropy_phi(0.5) == doctest::Approx(0.13081203594113697).epsilon(1e-14));
    CHECK_THROWS_AS(entropy_phi(1.0 + 1e-9), std::domain_error);

    // even and convex on a sampled grid
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const double a = dist(rng), b = dist(rng);
        const double lam = 0.5 * (dist(rng) + 1.0);
        CHECK(entropy_phi(a) == doctest::Approx(entropy_phi(-a)).epsilon(1e-13));
        CHECK(entropy_phi(lam * a + (1 - lam) * b) <=
              lam * entropy_phi(a) + (1 - lam) * entropy_phi(b) + 1e-12);
    }
}

TEST_CASE("kac energy examples") {
    TorusGrid g(1, 8);
    KacModel m10(InteractionKernel(g, 1.0), ExternalField(g, 0.0), 1.0, 0.0);
    CHECK(kac_energy(Profile(g, 0.0), m10) == 0.0);
    CHECK(kac_energy(Profile(g, 1.0), m10) == doctest::Approx(0.5).epsilon(1e-14));
    KacModel m11(InteractionKernel(g, 1.0), ExternalField(g, 1.0), 1.0, 0.0);
    CHECK(kac_energy(Profile(g, 1.0), m11) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("static rate examples") {
    TorusGrid g(1, 8);
    KacModel beta0(InteractionKernel(g, 1.0), ExternalField(g, 0.0), 0.0, 0.0);
    CHECK(static_rate(Profile(g, 0.0), beta0) == 0.0);
    CHECK(static_rate(Profile(g, 0.3), beta0) == doctest::Approx(entropy_phi(0.3)));
    KacModel beta1(InteractionKernel(g, 1.0), ExternalField(g, 0.0), 1.0, 0.0);
    for (double m : {-0.7, 0.2, 0.9})
        CHECK(static_rate(Profile(g, m), beta1) ==
              doctest::Approx(-0.5 * m * m + entropy_phi(m)).epsilon(1e-14));
}

TEST_CASE("interaction quadratic form") {
    SUBCASE("constant profiles cost nothing") {
        TorusGrid g(1, 16);
        KacModel m(InteractionKernel(g, 1.0), ExternalField(g, 0.0), 1.0, 0.0);
        CHECK(interaction_quadratic_form(Profile(g, 0.4), m) == doctest::Approx(0.0));
    }
    SUBCASE("two-point alternating pattern") {
        TorusGrid g(1, 2);
        KacModel m(InteractionKernel(g, 1.0), ExternalField(g, 0.0), 1.0, 0.0);
        CHECK(interaction_quadratic_form(Profile(g, std::vector<double>{1.0, -1.0}), m) ==
              doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("beta = 0 kills the form") {
        TorusGrid g(1, 8);
        KacModel m(InteractionKernel(g, 1.0), ExternalField(g, 0.0), 0.0, 0.0);
        std::mt19937_64 rng(1);
        CHECK(interaction_quadratic_form(testutil::random_profile(g, rng), m) == 0.0);
    }
}

TEST_CASE("static rate identity against the quadratic-form rearrangement") {
    std::mt19937_64 rng(17);
    for (int d : {1, 2}) {
        TorusGrid g(d, d == 1 ? 32 : 6);
        for (int rep = 0; rep < 20; ++rep) {
            const auto j = testutil::random_kernel(g, rng);
            const auto h = testutil::random_field(g, rng);
            std::uniform_real_distribution<double> bdist(0.0, 2.0);
            KacModel model(j, h, bdist(rng), 0.0);
            const auto a = testutil::random_profile(g, rng);

            double mean_sq = 0.0, mean_ha = 0.0, mean_phi = 0.0;
            for (std::size_t i = 0; i < a.values.size(); ++i) {
                mean_sq += a.values[i] * a.values[i];
                mean_ha += h.values[i] * a.values[i];
                mean_phi += entropy_phi(a.values[i]);
            }
            mean_sq /= double(a.values.size());
            mean_ha /= double(a.values.size());
            mean_phi /= double(a.values.size());

            const double lhs = static_rate(a, model);
            const double rhs = interaction_quadratic_form(a, model) -
                               0.5 * model.beta * kernel_mean(j) * mean_sq -
                               model.beta * mean_ha + mean_phi;
            CHECK(std::abs(lhs - rhs) <= 1e-12);
        }
    }
}

TEST_CASE("static rate lower bound") {
    std::mt19937_64 rng(23);
    TorusGrid g(1, 32);
    const auto j = testutil::random_kernel(g, rng);
    const auto h = testutil::random_field(g, rng);
    const double beta = 1.7;
    KacModel model(j, h, beta, 0.0);
    const double bound = -beta * (0.5 * kernel_mean(j) + sup_norm(h.values));
    for (int rep = 0; rep < 100; ++rep)
        CHECK(static_rate(testutil::random_profile(g, rng), model) >= bound - 1e-12);
}

TEST_CASE("built-in kernels") {
    for (int d : {1, 2}) {
        TorusGrid g(d, d == 1 ? 64 : 8);
        const auto c = constant_kernel(g);
        CHECK(kernel_mean(c) == doctest::Approx(1.0).epsilon(1e-14));
        const auto bump = cosine_bump_kernel(g);
        CHECK(kernel_mean(bump) == doctest::Approx(1.0).epsilon(1e-13));
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            CHECK(bump.values[i] >= 0.0);
            CHECK(bump.values[i] ==
                  doctest::Approx(bump.values[g.reflect_index(i)]).epsilon(1e-12));
        }
    }
}
