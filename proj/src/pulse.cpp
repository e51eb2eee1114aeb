#include "qfi/pulse.hpp"

#include <algorithm>
#include <cmath>

#include "qfi/quadrature.hpp"

namespace qfi {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sq(double x) { return x * x; }

// psi_n((t - t0)/T)/sqrt(T) via the stable three-term recurrence.
double hermite_gaussian(int n, double s) {
    double h0 = std::pow(kPi, -0.25) * std::exp(-0.5 * s * s);
    if (n == 0) return h0;
    double h1 = std::sqrt(2.0) * s * h0;
    for (int k = 2; k <= n; ++k) {
        double h2 = std::sqrt(2.0 / k) * s * h1 - std::sqrt((k - 1.0) / k) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double hg_window(int n_max) { return std::sqrt(2.0 * n_max + 1.0) + 8.0; }

} // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Rectangular: return "rectangular";
        case Family::Gaussian: return "gaussian";
        case Family::DecreasingExp: return "decreasing_exp";
        case Family::RisingExp: return "rising_exp";
        case Family::SymmetricExp: return "symmetric_exp";
        case Family::Sine: return "sine";
        case Family::Expansion: return "expansion";
    }
    return "unknown";
}

Family family_from_name(const std::string& name) {
    if (name == "rectangular" || name == "rect") return Family::Rectangular;
    if (name == "gaussian" || name == "gauss") return Family::Gaussian;
    if (name == "decreasing_exp" || name == "decexp") return Family::DecreasingExp;
    if (name == "rising_exp" || name == "risexp") return Family::RisingExp;
    if (name == "symmetric_exp" || name == "symexp") return Family::SymmetricExp;
    if (name == "sine") return Family::Sine;
    if (name == "expansion") return Family::Expansion;
    throw UnsupportedFamily("unknown pulse family: " + name);
}

// --- BasisSpec ---

BasisSpec BasisSpec::harmonic(double T, int n_max) {
    BasisSpec b;
    b.kind = BasisKind::Harmonic;
    b.T = T;
    b.n_min = 1;
    b.n_max = n_max;
    b.validate();
    return b;
}

BasisSpec BasisSpec::hermite_gaussian(double T, double t0, int n_max) {
    BasisSpec b;
    b.kind = BasisKind::HermiteGaussian;
    b.T = T;
    b.t0 = t0 < 0 ? hg_window(n_max) * T : t0;
    b.n_min = 0;
    b.n_max = n_max;
    b.validate();
    return b;
}

BasisSpec BasisSpec::plane_wave(double T, int n_min, int n_max) {
    BasisSpec b;
    b.kind = BasisKind::PlaneWave;
    b.T = T;
    b.n_min = n_min;
    b.n_max = n_max;
    b.validate();
    return b;
}

void BasisSpec::validate() const {
    if (!(T > 0)) throw Error("basis: T must be positive");
    if (n_max < n_min) throw Error("basis: empty mode range");
    if (kind == BasisKind::Harmonic && n_min < 1)
        throw Error("basis: harmonic modes start at n = 1");
    if (kind == BasisKind::HermiteGaussian && n_min < 0)
        throw Error("basis: hermite-gaussian modes start at n = 0");
}

int BasisSpec::mode_count() const { return n_max - n_min + 1; }

int BasisSpec::mode_index(int k) const {
    if (k < 0 || k >= mode_count()) throw IndexOutOfRange("basis mode index");
    return n_min + k;
}

double BasisSpec::omega(int n) const {
    switch (kind) {
        case BasisKind::Harmonic: return n * kPi / T;
        case BasisKind::PlaneWave: return 2.0 * n * kPi / T;
        case BasisKind::HermiteGaussian: return 0.0;
    }
    return 0.0;
}

double BasisSpec::support_begin() const {
    if (kind == BasisKind::HermiteGaussian) return std::max(0.0, t0 - hg_window(n_max) * T);
    return 0.0;
}

double BasisSpec::support_end() const {
    if (kind == BasisKind::HermiteGaussian) return t0 + hg_window(n_max) * T;
    return T;
}

cplx basis_eval(const BasisSpec& basis, int n, double t) {
    if (n < basis.n_min || n > basis.n_max) throw IndexOutOfRange("basis mode number");
    if (t < basis.support_begin() || t > basis.support_end()) return 0.0;
    switch (basis.kind) {
        case BasisKind::Harmonic:
            return std::sqrt(2.0 / basis.T) * std::sin(n * kPi * t / basis.T);
        case BasisKind::PlaneWave: {
            double phi = 2.0 * n * kPi * t / basis.T;
            return cplx(std::cos(phi), std::sin(phi)) / std::sqrt(basis.T);
        }
        case BasisKind::HermiteGaussian:
            return hermite_gaussian(n, (t - basis.t0) / basis.T) / std::sqrt(basis.T);
    }
    return 0.0;
}

// --- PulseSpec constructors ---

PulseSpec PulseSpec::rectangular(double T, double alpha_sq, double carrier_detuning) {
    PulseSpec p;
    p.family = Family::Rectangular;
    p.T = T;
    p.alpha_sq = alpha_sq;
    p.carrier_detuning = carrier_detuning;
    p.validate();
    return p;
}

PulseSpec PulseSpec::gaussian(double T, double alpha_sq, double t0, double carrier_detuning) {
    PulseSpec p;
    p.family = Family::Gaussian;
    p.T = T;
    p.t0 = t0 < 0 ? 8.0 * T : t0;
    p.alpha_sq = alpha_sq;
    p.carrier_detuning = carrier_detuning;
    p.validate();
    return p;
}

PulseSpec PulseSpec::decreasing_exp(double T, double alpha_sq, double carrier_detuning) {
    PulseSpec p;
    p.family = Family::DecreasingExp;
    p.T = T;
    p.alpha_sq = alpha_sq;
    p.carrier_detuning = carrier_detuning;
    p.validate();
    return p;
}

PulseSpec PulseSpec::rising_exp(double T, double alpha_sq, double t0, double carrier_detuning) {
    PulseSpec p;
    p.family = Family::RisingExp;
    p.T = T;
    p.t0 = t0 < 0 ? 20.0 * T : t0;
    p.alpha_sq = alpha_sq;
    p.carrier_detuning = carrier_detuning;
    p.validate();
    return p;
}

PulseSpec PulseSpec::symmetric_exp(double T, double alpha_sq, double t0, double carrier_detuning) {
    PulseSpec p;
    p.family = Family::SymmetricExp;
    p.T = T;
    // 15T keeps |f(0)|^2 below 1e-12 of the peak intensity
    p.t0 = t0 < 0 ? 15.0 * T : t0;
    p.alpha_sq = alpha_sq;
    p.carrier_detuning = carrier_detuning;
    p.validate();
    return p;
}

PulseSpec PulseSpec::sine(double T, double omega, double alpha_sq, double carrier_detuning) {
    PulseSpec p;
    p.family = Family::Sine;
    p.T = T;
    p.omega = omega;
    p.alpha_sq = alpha_sq;
    p.carrier_detuning = carrier_detuning;
    p.validate();
    return p;
}

PulseSpec PulseSpec::zero() {
    PulseSpec p;
    p.family = Family::Rectangular;
    p.T = 1.0;
    p.alpha_sq = 0.0;
    return p;
}

PulseSpec PulseSpec::with_alpha_sq(double new_alpha_sq) const {
    PulseSpec p = *this;
    if (family == Family::Expansion && alpha_sq > 0) {
        double scale = std::sqrt(new_alpha_sq / alpha_sq);
        for (auto& c : p.coeffs) c *= scale;
    }
    p.alpha_sq = new_alpha_sq;
    return p;
}

void PulseSpec::validate() const {
    if (!(T > 0)) throw Error("pulse: T must be positive");
    if (!(alpha_sq >= 0)) throw Error("pulse: alpha_sq must be nonnegative");
    if (family == Family::Sine && !(omega > 0)) throw Error("pulse: sine needs omega > 0");
    if (family == Family::Expansion) {
        basis.validate();
        if (static_cast<int>(coeffs.size()) != basis.mode_count())
            throw Error("pulse: coefficient count does not match basis");
    }
}

double PulseSpec::support_begin() const {
    switch (family) {
        case Family::Gaussian: return std::max(0.0, t0 - 8.0 * T);
        case Family::RisingExp: return std::max(0.0, t0 - kTailLog * T);
        case Family::SymmetricExp: return std::max(0.0, t0 - 0.5 * kTailLog * T);
        case Family::Expansion: return basis.support_begin();
        default: return 0.0;
    }
}

double PulseSpec::support_end() const {
    switch (family) {
        case Family::Rectangular:
        case Family::Sine: return T;
        case Family::Gaussian: return t0 + 8.0 * T;
        case Family::DecreasingExp: return kTailLog * T;
        case Family::RisingExp: return t0;
        case Family::SymmetricExp: return t0 + 0.5 * kTailLog * T;
        case Family::Expansion: return basis.support_end();
    }
    return T;
}

std::vector<double> PulseSpec::breakpoints() const {
    std::vector<double> pts{support_begin(), support_end()};
    if (family == Family::RisingExp || family == Family::SymmetricExp) pts.push_back(t0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

bool PulseSpec::is_real() const {
    if (carrier_detuning != 0.0) return false;
    if (family == Family::Expansion) {
        if (basis.kind == BasisKind::PlaneWave) return false;
        for (const auto& c : coeffs)
            if (c.imag() != 0.0) return false;
    }
    return true;
}

// --- PulseEvaluator ---

PulseEvaluator::PulseEvaluator(const PulseSpec& spec) : spec_(spec) {
    spec_.validate();
    real_ = spec_.is_real();
    sbegin_ = spec_.support_begin();
    send_ = spec_.support_end();
    double alpha = std::sqrt(spec_.alpha_sq);
    switch (spec_.family) {
        case Family::Rectangular:
        case Family::DecreasingExp:
        case Family::RisingExp:
        case Family::SymmetricExp:
            amp_ = alpha / std::sqrt(spec_.T);
            break;
        case Family::Gaussian:
            amp_ = alpha / (std::pow(kPi, 0.25) * std::sqrt(spec_.T));
            break;
        case Family::Sine: {
            double w = spec_.omega;
            double nrm = 0.5 * spec_.T - std::sin(2.0 * w * spec_.T) / (4.0 * w);
            amp_ = alpha / std::sqrt(nrm);
            break;
        }
        case Family::Expansion:
            amp_ = 1.0;
            break;
    }
}

double PulseEvaluator::envelope(double t) const {
    if (t < sbegin_ || t > send_) return 0.0;
    switch (spec_.family) {
        case Family::Rectangular: return amp_;
        case Family::Gaussian: return amp_ * std::exp(-0.5 * sq((t - spec_.t0) / spec_.T));
        case Family::DecreasingExp: return amp_ * std::exp(-0.5 * t / spec_.T);
        case Family::RisingExp: return amp_ * std::exp(0.5 * (t - spec_.t0) / spec_.T);
        case Family::SymmetricExp: return amp_ * std::exp(-std::abs(t - spec_.t0) / spec_.T);
        case Family::Sine: return amp_ * std::sin(spec_.omega * t);
        case Family::Expansion: return 0.0;  // handled separately
    }
    return 0.0;
}

cplx PulseEvaluator::expansion_value(double t) const {
    if (t < sbegin_ || t > send_) return 0.0;
    const BasisSpec& b = spec_.basis;
    const auto& c = spec_.coeffs;
    switch (b.kind) {
        case BasisKind::Harmonic: {
            // sin(n theta) by the Chebyshev angle recurrence
            double theta = kPi * t / b.T;
            double two_cos = 2.0 * std::cos(theta);
            double s_prev = 0.0, s_cur = std::sin(theta);
            cplx acc = 0.0;
            for (int n = 1; n <= b.n_max; ++n) {
                acc += c[n - 1] * s_cur;
                double s_next = two_cos * s_cur - s_prev;
                s_prev = s_cur;
                s_cur = s_next;
            }
            return acc * std::sqrt(2.0 / b.T);
        }
        case BasisKind::PlaneWave: {
            double phi = 2.0 * kPi * t / b.T;
            cplx rot(std::cos(phi), std::sin(phi));
            cplx e(std::cos(b.n_min * phi), std::sin(b.n_min * phi));
            cplx acc = 0.0;
            for (int k = 0; k < b.mode_count(); ++k) {
                acc += c[k] * e;
                e *= rot;
            }
            return acc / std::sqrt(b.T);
        }
        case BasisKind::HermiteGaussian: {
            double s = (t - b.t0) / b.T;
            double h0 = std::pow(kPi, -0.25) * std::exp(-0.5 * s * s);
            cplx acc = c[0] * h0;
            if (b.n_max >= 1) {
                double h1 = std::sqrt(2.0) * s * h0;
                acc += c[1] * h1;
                for (int n = 2; n <= b.n_max; ++n) {
                    double h2 = std::sqrt(2.0 / n) * s * h1 - std::sqrt((n - 1.0) / n) * h0;
                    acc += c[n] * h2;
                    h0 = h1;
                    h1 = h2;
                }
            }
            return acc / std::sqrt(b.T);
        }
    }
    return 0.0;
}

cplx PulseEvaluator::operator()(double t) const {
    cplx v = spec_.family == Family::Expansion ? expansion_value(t) : cplx(envelope(t), 0.0);
    if (spec_.carrier_detuning != 0.0 && v != cplx(0.0, 0.0)) {
        double ph = -spec_.carrier_detuning * t;
        v *= cplx(std::cos(ph), std::sin(ph));
    }
    return v;
}

double PulseEvaluator::real_at(double t) const {
    if (spec_.family == Family::Expansion) return expansion_value(t).real();
    return envelope(t);
}

// --- operations ---

cplx eval(const PulseSpec& spec, double t) {
    PulseEvaluator ev(spec);
    return ev(t);
}

double norm_sq(const PulseSpec& spec) {
    if (spec.alpha_sq == 0.0) return 0.0;
    PulseEvaluator ev(spec);
    QuadTol tol{1e-12 * std::max(spec.alpha_sq, 1e-300), 1e-10};
    auto f2 = [&](double t) { return std::norm(ev(t)); };
    return integrate_piecewise(f2, spec.support_begin(), spec.support_end(), spec.breakpoints(),
                               tol);
}

double variance(const PulseSpec& spec) {
    PulseEvaluator ev(spec);
    QuadTol tol{1e-12 * std::max(spec.alpha_sq, 1e-300), 1e-10};
    double a = spec.support_begin(), b = spec.support_end();
    auto breaks = spec.breakpoints();
    double n0 = integrate_piecewise([&](double t) { return std::norm(ev(t)); }, a, b, breaks, tol);
    if (n0 <= 0) throw Error("variance: zero pulse");
    double m1 = integrate_piecewise([&](double t) { return t * std::norm(ev(t)); }, a, b, breaks, tol) / n0;
    double m2 = integrate_piecewise([&](double t) { return sq(t - m1) * std::norm(ev(t)); }, a, b,
                                    breaks, tol) / n0;
    return std::sqrt(std::max(m2, 0.0));
}

cplx area(const PulseSpec& spec) {
    if (spec.alpha_sq == 0.0) return 0.0;
    PulseEvaluator ev(spec);
    QuadTol tol{1e-12 * std::max(std::sqrt(spec.alpha_sq), 1e-300), 1e-10};
    double a = spec.support_begin(), b = spec.support_end();
    auto breaks = spec.breakpoints();
    double re = integrate_piecewise([&](double t) { return ev(t).real(); }, a, b, breaks, tol);
    double im = integrate_piecewise([&](double t) { return ev(t).imag(); }, a, b, breaks, tol);
    return {re, im};
}

PulseSpec synthesize(const BasisSpec& basis, const std::vector<cplx>& coeffs, double alpha_sq,
                     double carrier_detuning) {
    basis.validate();
    if (static_cast<int>(coeffs.size()) != basis.mode_count())
        throw Error("synthesize: coefficient count does not match basis");
    double nrm = 0;
    for (const auto& c : coeffs) nrm += std::norm(c);
    if (nrm <= 0) throw ZeroVector("synthesize: all coefficients vanish");
    double scale = std::sqrt(alpha_sq / nrm);
    PulseSpec p;
    p.family = Family::Expansion;
    p.T = basis.T;
    p.basis = basis;
    p.coeffs = coeffs;
    for (auto& c : p.coeffs) c *= scale;
    p.alpha_sq = alpha_sq;
    p.carrier_detuning = carrier_detuning;
    return p;
}

} // namespace qfi
