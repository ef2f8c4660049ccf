#pragma once

#include <functional>
#include <stdexcept>

namespace kacld {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive Gauss-Kronrod (7,15) to an absolute tolerance. Throws
/// QuadratureError instead of returning a silently inaccurate value.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth = 48);

} // namespace kacld
