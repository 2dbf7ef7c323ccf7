#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace copasbias {

struct BrentResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Brent's parabolic-interpolation minimiser on [lo, hi].
BrentResult brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                           double tol = 1e-10, int max_iter = 200);

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Standard Nelder-Mead simplex with adaptive restarts left to the caller.
// step sets the initial simplex edge per coordinate.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, std::vector<double> step,
                             double ftol = 1e-12, int max_iter = 4000);

}  // namespace copasbias
