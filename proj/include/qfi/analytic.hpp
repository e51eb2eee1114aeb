#pragma once

#include <utility>

#include "qfi/engine.hpp"
#include "qfi/pulse.hpp"

namespace qfi {

// Closed-form memory kernels for the standard families, exactly as defined:
// p(t) = sqrt(gamma) int_0^t exp(gamma(tau-t)/2) f(tau) dtau (dimensionless)
// and q(t) = d/dgamma (p/sqrt(gamma)) (units time^{3/2}). Shifted families are
// evaluated with the pulse's own t0 so time axes agree with the evaluator.
struct PqValue {
    double p = 0;
    double q = 0;
};

PqValue pq_closed(const PulseSpec& pulse, double gamma, double t);

// Table rows: gamma^2 F / alpha^2 in the long (low photon density) limit.
double qfi_long_table(Family family, double gamma_T);

// Table rows: gamma^2 F / alpha^2 in the short pulse width limit, including
// the sin^2 emission term which depends on alpha^2.
double qfi_short_table(Family family, double gamma_T, double alpha_sq);

// gamma^2 [F_p(T) + sin^2(sqrt(gamma) A)] for an arbitrary real pulse, by
// nested quadrature of the memory kernel (independent of the ODE engine).
double qfi_short_general(const PulseSpec& pulse, double gamma);

// Second-order (long pulse width) QFI, gamma^2 16 int |dQ/dt|^2, by direct
// integration of the linear P/Q system. Valid for any complex pulse and
// detuning; meaningful when alpha/sqrt(gamma T) << 1.
double qfi_perturbative(const PulseSpec& pulse, const PhysicsParams& params);

// Single-photon QFI for the pulse shape (alpha^2 forced to 1):
// 16 int |dQ/dt|^2 - (4/gamma^2) |int (dP/dt) P* dt|^2, reported as gamma^2 F.
double qfi_single_photon(const PulseSpec& pulse, const PhysicsParams& params);

// Quasi-steady-state approximations for the rectangular pulse, gamma = 1
// units: (F_z, F_x) as functions of T_sigma and alpha^2.
std::pair<double, double> quasi_steady_rect(double t_sigma, double alpha_sq);

// exp(x^2) erfc(x), overflow-safe for large x.
double erfcx(double x);

} // namespace qfi
