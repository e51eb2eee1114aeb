#pragma once

#include <array>

#include "qfi/engine.hpp"
#include "qfi/pulse.hpp"

namespace qfi {

// Pauli components of the generalized density operator mu = (1/2) sum c_j
// sigma_j with c_j = d[j] + i d[j+4]. gamma1 acts from the left, gamma2 from
// the right.
struct GeneralizedState {
    std::array<double, 8> d{};
    double gamma1 = 0, gamma2 = 0;
};

struct FdEstimate {
    double qfi = 0;            // gamma^2 F, Richardson-extrapolated
    double step = 0;           // h used
    double richardson_err = 0; // extrapolation error estimate
};

struct OracleOptions {
    // Second differences of near-unit fidelities need headroom below double
    // precision; the d_j system is integrated in long double at these
    // tolerances.
    double rel_tol = 1e-13;
    double abs_tol = 1e-16;
    int jobs = 0;
};

// Integrates the eight real d_j equations of the double-sided master equation
// from the ground state up to t_end.
GeneralizedState evolve_mu(double gamma1, double gamma2, const PulseSpec& pulse, double delta,
                           double t_end, const OracleOptions& opts = {});

// Global QFI by the second central difference of I_G = |Tr mu| over the decay
// rate, with one Richardson step (h and h/2). Requires 1e-6 <= h/gamma <= 1e-2.
FdEstimate qfi_fd_global(const PulseSpec& pulse, const PhysicsParams& params, double h,
                         const OracleOptions& opts = {});

// Emitted-field fidelity I_E = Tr sqrt(mu mu^dagger) at time t.
double fidelity_emitted(double gamma1, double gamma2, const PulseSpec& pulse, double delta,
                        double t, const OracleOptions& opts = {});

// |Tr mu| for a given generalized state.
double global_fidelity(const GeneralizedState& s);

} // namespace qfi
