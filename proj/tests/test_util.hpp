#pragma once

#include "kacld/torus.hpp"

#include <random>
#include <vector>

namespace kacld::testutil {

inline Profile random_profile(const TorusGrid& g, std::mt19937_64& rng, double bound = 1.0) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    std::vector<double> v(g.node_count());
    for (double& x : v) x = dist(rng);
    return {g, std::move(v)};
}

inline InteractionKernel random_kernel(const TorusGrid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    std::vector<double> v(g.node_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::size_t r = g.reflect_index(i);
        if (r < i) {
            v[i] = v[r];
        } else {
            v[i] = dist(rng);
        }
    }
    v[0] += 0.1; // not identically zero
    return {g, std::move(v)};
}

inline ExternalField random_field(const TorusGrid& g, std::mt19937_64& rng, double bound = 1.0) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    std::vector<double> v(g.node_count());
    for (double& x : v) x = dist(rng);
    return {g, std::move(v)};
}

} // namespace kacld::testutil
