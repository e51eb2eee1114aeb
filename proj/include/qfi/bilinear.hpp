#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qfi/engine.hpp"
#include "qfi/pulse.hpp"

namespace qfi {

enum class KProvenance { ClosedFormHarmonic, ClosedFormPlaneWave, Numeric };

// Bilinear form over basis coefficients: gamma^2 F_long = c^dag K c for
// coefficient vectors normalized to sum |c_n|^2 = alpha^2. Entries are
// gamma^2-scaled so the eigenvalues of the Hermitian part land in [0, 4].
struct KMatrix {
    Eigen::MatrixXcd entries;
    BasisSpec basis;
    double gamma = 1.0;
    double delta = 0.0;
    double r = 0.0;  // gamma T / pi
    KProvenance provenance = KProvenance::Numeric;
};

// The three closed-form harmonic-basis matrices (K1 as printed, K2, and the
// symmetric part of K3); their sum's symmetric part is the full kernel.
struct HarmonicKTriple {
    Eigen::MatrixXd k1, k2, k3_sym;
    double r = 0.0;
};

// Hermitian-part matrices for the plane-wave (periodic) basis, modes
// n_min..n_max. delta_over_gamma shifts the effective mode frequencies; the
// printed entries are exact at delta = 0 (shift is exact only when delta is a
// multiple of the mode spacing).
struct PlaneWaveKTriple {
    Eigen::MatrixXcd k1, k2, k3;
    double r = 0.0;
};

HarmonicKTriple k_harmonic_closed(double r, int n_max);
PlaneWaveKTriple k_planewave_closed(double r, int n_min, int n_max, double delta_over_gamma = 0.0);

// Kernel by direct integration of the per-mode P/Q equations; Hermitian
// positive semidefinite by construction. Mode solves run in parallel.
KMatrix k_numeric(const BasisSpec& basis, const PhysicsParams& params, int jobs = 0);

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& k);
Eigen::MatrixXd symmetric_part(const Eigen::MatrixXd& k);

struct EigenResult {
    double lambda_max = 0.0;
    Eigen::VectorXcd vector;               // unit norm, deterministic phase
    std::vector<double> mode_populations;  // |v_n|^2
};

// Top eigenpair of a Hermitian matrix. Near-degenerate top eigenvalues are
// resolved deterministically: with a frequency hint (one entry per row), the
// candidate whose dominant row has the highest hint wins; otherwise the
// lowest eigensolver column.
EigenResult max_eig(const Eigen::MatrixXcd& k, const std::vector<double>& freq_hint = {});

enum class Bc { Closed, Periodic };

// Large-r diagonal eigenvalue profiles: 64 n~^2/(4 n~^2+1)^2 (closed) and
// 256 n~^2/(16 n~^2+1)^2 (periodic).
double asymptotic_lambda(double n_tilde, Bc bc);

} // namespace qfi
