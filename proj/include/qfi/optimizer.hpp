#pragma once

#include <cstdint>
#include <vector>

#include "qfi/engine.hpp"
#include "qfi/pulse.hpp"

namespace qfi {

enum class GradMode { FiniteDifference, Adjoint };

struct OptConfig {
    BasisSpec basis;
    double alpha_sq = 1.0;
    PhysicsParams params;
    int n_seeds = 10;
    std::uint64_t rng_seed = 0;
    int max_iters = 200;
    GradMode grad_mode = GradMode::FiniteDifference;
    double fd_step = 1e-5;          // per-coordinate step, scaled by alpha
    double convergence_tol = 1e-9;  // relative objective change
    bool complex_coeffs = false;    // complex mode doubles the search dimension
    int jobs = 0;

    void validate() const {
        basis.validate();
        params.validate();
        if (n_seeds < 1) throw Error("optimize: n_seeds must be >= 1");
        if (!(fd_step >= 1e-8 && fd_step <= 1e-3))
            throw Error("optimize: fd_step outside [1e-8, 1e-3]");
        if (!(alpha_sq > 0)) throw Error("optimize: alpha_sq must be positive");
        if (complex_coeffs && grad_mode == GradMode::Adjoint)
            throw Error("optimize: adjoint gradients support real coefficients only");
    }

    // search dimension: one real parameter per coefficient component
    int dim() const { return basis.mode_count() * (complex_coeffs ? 2 : 1); }
};

struct SeedRecord {
    double final_qfi = 0;
    int iterations = 0;
    bool converged = false;
};

struct OptResult {
    std::vector<cplx> best_coeffs;      // sum |c|^2 = alpha_sq
    double best_qfi = 0;                // gamma^2 F
    std::vector<SeedRecord> per_seed;
    std::vector<double> populations;    // |c_n|^2 / alpha^2
    int best_seed = 0;
};

// Objective g(u) = gamma^2 F(synthesize(basis, alpha u / |u|)); invariant
// under scaling of u.
double objective(const OptConfig& config, const std::vector<double>& u);

// Gradient of the objective, by central differences or the adjoint of the
// real 4-ODE system (real coefficients only). Both differentiate through the
// normalization map.
std::vector<double> gradient(const OptConfig& config, const std::vector<double>& u);

// Multi-seed quasi-Newton ascent. Seed 0 is the deterministic single-mode
// guess at omega = gamma/2 (shifted by delta for the periodic basis); the
// rest are uniform on the sphere from rng_seed.
OptResult optimize(const OptConfig& config);

// Coefficients for a given parameter vector (after normalization).
std::vector<cplx> pack_coeffs(const OptConfig& config, const std::vector<double>& u);

} // namespace qfi
