#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qfi/pulse.hpp"

namespace qfi {

struct PhysicsParams {
    double gamma = 1.0;           // decay rate (inverse time)
    double delta = 0.0;           // detuning (inverse time)
    double horizon_factor = 60.0; // t_end = pulse end + horizon_factor / gamma
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;

    void validate() const {
        if (!(gamma > 0)) throw Error("params: gamma must be positive");
        if (!(horizon_factor >= 20)) throw Error("params: horizon_factor must be >= 20");
    }
};

struct SolverInfo {
    double rel_tol = 0, abs_tol = 0;
    std::size_t steps = 0;
    std::size_t rhs_evals = 0;
    double horizon_factor_used = 0;
    double xi_residual = 0;  // |xi - (b/4 + a/2)| at t_end, real case
};

// One sampled point of the integrated system. Time is physical; state
// components are the dimensionless (gamma-scaled) solver variables.
struct StateSample {
    double t;
    std::vector<double> y;
};

// All QFI values are reported as gamma^2 F (dimensionless, the quantity the
// per-photon bound 4 applies to). Divide by gamma^2 for F in time^2 units.
struct QfiBreakdown {
    double total = 0.0;
    std::optional<double> f_p, f_z, f_x;          // real-pulse split
    std::optional<double> z1_term, work_term;     // complex-pulse split
    double t_end = 0.0;                           // physical time
    SolverInfo solver;
    std::optional<std::vector<StateSample>> trajectory;
};

struct SolveOptions {
    int trajectory_samples = 0;  // > 0 samples the solution uniformly in time
};

// End of the integration window: pulse support end plus the decay horizon.
double horizon(const PulseSpec& pulse, const PhysicsParams& params);

// Real pulse, zero detuning: the four coupled ODEs plus the memory integrals
// feeding the F_p / F_z / F_x split.
QfiBreakdown solve_real(const PulseSpec& pulse, const PhysicsParams& params,
                        const SolveOptions& opts = {});

// Complex pulse, any detuning: the nine coupled ODEs.
QfiBreakdown solve_complex(const PulseSpec& pulse, const PhysicsParams& params,
                           const SolveOptions& opts = {});

} // namespace qfi
