#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qfi/errors.hpp"

namespace qfi {

struct QuadTol {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
};

// Adaptive Gauss-Kronrod over one smooth interval.
inline double integrate_segment(const std::function<double(double)>& f, double a, double b,
                                const QuadTol& tol = {}) {
    if (!(b > a)) return 0.0;
    double error = 0, l1 = 0;
    double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 15, tol.rel_tol, &error, &l1);
    if (error > std::max(tol.abs_tol, tol.rel_tol * std::max(std::abs(value), l1)) * 10.0)
        throw QuadratureNotConverged("gauss-kronrod refinement budget exhausted");
    return value;
}

// Integrates over [a, b] split at the given interior breakpoints.
inline double integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                  const std::vector<double>& breaks, const QuadTol& tol = {}) {
    double total = 0;
    double lo = a;
    for (double c : breaks) {
        if (c <= lo || c >= b) continue;
        total += integrate_segment(f, lo, c, tol);
        lo = c;
    }
    total += integrate_segment(f, lo, b, tol);
    return total;
}

} // namespace qfi
