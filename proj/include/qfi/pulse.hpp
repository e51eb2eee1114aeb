#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qfi/errors.hpp"

namespace qfi {

using cplx = std::complex<double>;

// Duration beyond which an exponential-tail intensity |f|^2 has dropped below
// 1e-14 of its peak; used to assign finite supports to unbounded envelopes.
inline constexpr double kTailLog = 32.236191301916641;  // ln(1e14)

enum class Family {
    Rectangular,
    Gaussian,
    DecreasingExp,
    RisingExp,
    SymmetricExp,
    Sine,       // N sin(omega t) on [0, T]; expresses the optimal waveform at
                // frequencies incommensurate with the harmonic grid
    Expansion,
};

enum class BasisKind { Harmonic, HermiteGaussian, PlaneWave };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Catalog of orthonormal mode functions on a finite window.
//   Harmonic        xi_n(t) = sqrt(2/T) sin(n pi t / T),  n = 1..n_max
//   HermiteGaussian Psi_n(t - t0),                        n = 0..n_max
//   PlaneWave       xi_n(t) = exp(2 pi i n t / T)/sqrt(T), n = n_min..n_max
struct BasisSpec {
    BasisKind kind = BasisKind::Harmonic;
    double T = 1.0;
    double t0 = 0.0;  // HermiteGaussian center
    int n_min = 1;
    int n_max = 1;

    static BasisSpec harmonic(double T, int n_max);
    static BasisSpec hermite_gaussian(double T, double t0, int n_max);
    static BasisSpec plane_wave(double T, int n_min, int n_max);

    int mode_count() const;
    int mode_index(int k) const;  // k in [0, mode_count()) -> mode number n
    double omega(int n) const;    // mode angular frequency (0 for HermiteGaussian)
    double support_begin() const;
    double support_end() const;
    void validate() const;
};

// Evaluates one basis function; zero outside the basis window.
cplx basis_eval(const BasisSpec& basis, int n, double t);

// A driving envelope f(t) carrying its mean photon number alpha^2 and an
// optional carrier phase exp(-i carrier_detuning t).
struct PulseSpec {
    Family family = Family::Rectangular;
    double T = 1.0;
    double t0 = 0.0;     // Gaussian/RisingExp/SymmetricExp shift
    double omega = 0.0;  // Sine frequency
    BasisSpec basis;     // Expansion only
    std::vector<cplx> coeffs;
    double alpha_sq = 1.0;
    double carrier_detuning = 0.0;

    static PulseSpec rectangular(double T, double alpha_sq, double carrier_detuning = 0.0);
    static PulseSpec gaussian(double T, double alpha_sq, double t0 = -1.0,
                              double carrier_detuning = 0.0);  // t0 < 0 -> 8T
    static PulseSpec decreasing_exp(double T, double alpha_sq, double carrier_detuning = 0.0);
    static PulseSpec rising_exp(double T, double alpha_sq, double t0 = -1.0,
                                double carrier_detuning = 0.0);  // t0 < 0 -> 20T
    static PulseSpec symmetric_exp(double T, double alpha_sq, double t0 = -1.0,
                                   double carrier_detuning = 0.0);  // t0 < 0 -> 15T
    static PulseSpec sine(double T, double omega, double alpha_sq,
                          double carrier_detuning = 0.0);
    static PulseSpec zero();

    // Same shape rescaled to a new photon number.
    PulseSpec with_alpha_sq(double new_alpha_sq) const;

    double support_begin() const;
    double support_end() const;
    // Points where f or f' jumps, including the support edges; integrators
    // restart here so no step straddles a discontinuity.
    std::vector<double> breakpoints() const;
    bool is_real() const;
    void validate() const;
};

// Precomputed evaluator; the hot path for expansion pulses uses angle
// recurrences instead of per-mode trig calls.
class PulseEvaluator {
public:
    explicit PulseEvaluator(const PulseSpec& spec);

    cplx operator()(double t) const;
    double real_at(double t) const;  // valid only when the spec is real
    bool is_real() const { return real_; }

private:
    double envelope(double t) const;         // family amplitude, no carrier
    cplx expansion_value(double t) const;

    PulseSpec spec_;
    bool real_ = false;
    double amp_ = 0.0;  // family amplitude prefactor
    double sbegin_ = 0.0, send_ = 0.0;
};

// --- pulsekit operations ---

// f(t) with carrier phase applied; total function, zero outside support.
cplx eval(const PulseSpec& spec, double t);

// Adaptive quadrature of the pulse intensity; equals alpha_sq to 1e-8 relative.
double norm_sq(const PulseSpec& spec);

// Standard deviation T_sigma of the normalized intensity in time.
double variance(const PulseSpec& spec);

// Pulse area A = int f(t) dt.
cplx area(const PulseSpec& spec);

// Rescales coeffs so sum |c_n|^2 = alpha_sq and wraps them in an Expansion.
PulseSpec synthesize(const BasisSpec& basis, const std::vector<cplx>& coeffs, double alpha_sq,
                     double carrier_detuning = 0.0);

} // namespace qfi
