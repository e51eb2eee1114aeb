#include "qfi/analytic.hpp"

#include <cmath>

#include "qfi/ode.hpp"
#include "qfi/quadrature.hpp"

namespace qfi {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSeriesWindow = 1e-4;  // removable-singularity switch

double sq(double x) { return x * x; }

PqValue pq_rectangular(double alpha, double T, double gamma, double t) {
    double U = gamma * T, u = gamma * t;
    PqValue v;
    if (t <= T) {
        v.p = 2.0 * alpha / std::sqrt(U) * (1.0 - std::exp(-0.5 * u));
        v.q = alpha / (gamma * gamma * std::sqrt(T)) *
              (2.0 * std::exp(-0.5 * u) + u * std::exp(-0.5 * u) - 2.0);
    } else {
        v.p = 2.0 * alpha * (std::exp(0.5 * U) - 1.0) / std::sqrt(U) * std::exp(-0.5 * u);
        v.q = alpha / (gamma * gamma * std::sqrt(T)) * std::exp(-0.5 * u) *
              (u + 2.0 + std::exp(0.5 * U) * (U - u - 2.0));
    }
    return v;
}

PqValue pq_decreasing_exp(double alpha, double T, double gamma, double t) {
    double U = gamma * T;
    double x = U - 1.0;
    double damp = std::exp(-0.5 * gamma * t);
    PqValue v;
    if (std::abs(x) < kSeriesWindow) {
        double s = 0.5 * t / T;
        v.p = 2.0 * alpha * std::sqrt(U) * damp * s *
              (1.0 + s * x / 2.0 + sq(s * x) / 6.0 + s * x * sq(s * x) / 24.0);
        v.q = -2.0 * alpha * T * std::sqrt(T) * damp *
              (s * s / 2.0 + s * s * s * x / 6.0 + sq(s * s) * sq(x) / 24.0 +
               s * sq(s * s) * x * sq(x) / 120.0);
    } else {
        double g = std::expm1(0.5 * x * t / T);
        v.p = 2.0 * alpha * std::sqrt(U) / x * g * damp;
        v.q = alpha * std::sqrt(T) / (x * x) * (-2.0 * T * g + t * x) * damp;
    }
    return v;
}

PqValue pq_rising_exp(double alpha, double T, double gamma, double t, double t0) {
    double U = gamma * T;
    double tau = t - t0;
    PqValue v;
    if (tau <= 0) {
        double e = std::exp(0.5 * tau / T);
        v.p = 2.0 * alpha * std::sqrt(U) / (1.0 + U) * e;
        v.q = -2.0 * alpha * T * std::sqrt(T) / sq(1.0 + U) * e;
    } else {
        double e = std::exp(-0.5 * gamma * tau);
        v.p = 2.0 * alpha * std::sqrt(U) / (1.0 + U) * e;
        v.q = -alpha * std::sqrt(T) / sq(1.0 + U) * (tau + U * tau + 2.0 * T) * e;
    }
    return v;
}

PqValue pq_symmetric_exp(double alpha, double T, double gamma, double t, double t0) {
    double W = gamma * T;
    double tau = t - t0;
    PqValue v;
    if (tau <= 0) {
        double e = std::exp(tau / T);
        v.p = 2.0 * alpha * std::sqrt(W) / (W + 2.0) * e;
        v.q = -2.0 * alpha * T * std::sqrt(T) / sq(W + 2.0) * e;
        return v;
    }
    double u = W - 2.0;
    if (std::abs(u) < kSeriesWindow) {
        double r1 = tau / T;
        v.p = 2.0 * alpha * std::sqrt(W) / (u + 4.0) * std::exp(-r1) *
              (1.0 + 2.0 * r1 - u * r1 * r1 / 2.0 + u * u * r1 * r1 * r1 / 12.0);
        double G = 4.0 * T / sq(W + 2.0) + (tau * tau / (2.0 * T) + 0.5 * tau) +
                   u * (tau * tau * tau / (12.0 * T * T) - tau / 8.0) +
                   u * u * (sq(tau * tau) / (96.0 * T * T * T) + tau / 32.0);
        v.q = -0.5 * alpha * std::sqrt(T) * std::exp(-0.5 * gamma * tau) * G;
    } else {
        v.p = 2.0 * alpha * std::sqrt(W) / (W * W - 4.0) *
              ((W + 2.0) * std::exp(-tau / T) - 4.0 * std::exp(-0.5 * gamma * tau));
        double G = 4.0 * T / sq(W + 2.0) + 4.0 * T * std::expm1(0.5 * u * tau / T) / (u * u) -
                   8.0 * tau / (W * W - 4.0);
        v.q = -0.5 * alpha * std::sqrt(T) * std::exp(-0.5 * gamma * tau) * G;
    }
    return v;
}

// Scaled view used by the perturbative solvers: time in 1/gamma units,
// amplitude in sqrt(gamma) units.
struct Scaled {
    PulseEvaluator ev;
    double gamma;
    cplx at(double tau) const { return ev(tau / gamma) / std::sqrt(gamma); }
};

std::vector<double> scaled_segments(const PulseSpec& pulse, double gamma, double tau_end) {
    std::vector<double> seg{0.0};
    for (double b : pulse.breakpoints()) {
        double tb = b * gamma;
        if (tb > 0 && tb < tau_end) seg.push_back(tb);
    }
    seg.push_back(tau_end);
    std::sort(seg.begin(), seg.end());
    seg.erase(std::unique(seg.begin(), seg.end()), seg.end());
    return seg;
}

} // namespace

double erfcx(double x) {
    if (x < 8.0) return std::exp(x * x) * std::erfc(x);
    // asymptotic series, |error| < 1e-16 for x >= 8
    double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 14; ++k) {
        term *= -(2.0 * k - 1.0) * inv2x2;
        sum += term;
    }
    return sum / (x * std::sqrt(kPi));
}

PqValue pq_closed(const PulseSpec& pulse, double gamma, double t) {
    pulse.validate();
    if (!(gamma > 0)) throw Error("pq_closed: gamma must be positive");
    double alpha = std::sqrt(pulse.alpha_sq);
    switch (pulse.family) {
        case Family::Rectangular: return pq_rectangular(alpha, pulse.T, gamma, t);
        case Family::DecreasingExp: return pq_decreasing_exp(alpha, pulse.T, gamma, t);
        case Family::RisingExp: return pq_rising_exp(alpha, pulse.T, gamma, t, pulse.t0);
        case Family::SymmetricExp: return pq_symmetric_exp(alpha, pulse.T, gamma, t, pulse.t0);
        default:
            throw UnsupportedFamily("pq_closed: no closed form for " + family_name(pulse.family));
    }
}

double qfi_long_table(Family family, double gamma_T) {
    if (!(gamma_T > 0)) throw Error("qfi_long_table: gamma_T must be positive");
    double u = gamma_T;
    switch (family) {
        case Family::Rectangular:
            return 8.0 / u * (2.0 * (-std::expm1(-0.5 * u)) - u * std::exp(-0.5 * u));
        case Family::Gaussian: {
            double x = 0.5 * u;
            if (x > 50.0) {
                // large-width expansion of 2u (sqrt(pi)(u^2+2) erfcx(x) - 2u)
                double x2 = x * x;
                return 8.0 / x2 - 24.0 / (x2 * x2) + 90.0 / (x2 * x2 * x2);
            }
            return 2.0 * u * (std::sqrt(kPi) * (u * u + 2.0) * erfcx(x) - 2.0 * u);
        }
        case Family::DecreasingExp:
        case Family::RisingExp:
            return 8.0 * u / sq(1.0 + u);
        case Family::SymmetricExp:
            return 64.0 * u / (sq(2.0 + u) * (2.0 + u));
        default:
            throw UnsupportedFamily("qfi_long_table: " + family_name(family));
    }
}

double qfi_short_table(Family family, double gamma_T, double alpha_sq) {
    if (!(gamma_T > 0) || !(alpha_sq > 0))
        throw Error("qfi_short_table: gamma_T and alpha_sq must be positive");
    double u = gamma_T;
    double root = std::sqrt(alpha_sq * gamma_T);
    switch (family) {
        case Family::Rectangular:
            return 4.0 * (1.0 - 2.0 / u * (-std::expm1(-0.5 * u))) + sq(std::sin(root)) / alpha_sq;
        case Family::Gaussian:
            return 2.0 * std::sqrt(kPi) * u * erfcx(0.5 * u) +
                   sq(std::sin(std::pow(kPi, 0.25) * std::sqrt(2.0) * root)) / alpha_sq;
        case Family::DecreasingExp:
        case Family::RisingExp:
            return 4.0 * u / (u + 1.0) + sq(std::sin(2.0 * root)) / alpha_sq;
        case Family::SymmetricExp:
            return 4.0 * u * (u + 4.0) / sq(u + 2.0) + sq(std::sin(2.0 * root)) / alpha_sq;
        default:
            throw UnsupportedFamily("qfi_short_table: " + family_name(family));
    }
}

double qfi_short_general(const PulseSpec& pulse, double gamma) {
    pulse.validate();
    if (!pulse.is_real()) throw Error("qfi_short_general: pulse must be real");
    if (pulse.alpha_sq == 0.0) return 0.0;
    PulseEvaluator ev(pulse);
    double s0 = pulse.support_begin(), s1 = pulse.support_end();
    auto breaks = pulse.breakpoints();
    double scale = pulse.alpha_sq;
    QuadTol inner_tol{1e-13 * std::max(std::sqrt(scale), 1e-300), 1e-9};
    QuadTol outer_tol{1e-12 * std::max(scale / gamma, 1e-300), 1e-9};

    auto memory = [&](double tau) {
        double lo = std::max(s0, tau - 80.0 / gamma);
        if (tau <= lo) return 0.0;
        return integrate_piecewise(
            [&](double s) { return std::exp(-0.5 * gamma * (tau - s)) * ev.real_at(s); }, lo, tau,
            breaks, inner_tol);
    };
    double fp = 2.0 * gamma *
                integrate_piecewise([&](double tau) { return ev.real_at(tau) * memory(tau); }, s0,
                                    s1, breaks, outer_tol);
    double A = area(pulse).real();
    return fp + sq(std::sin(std::sqrt(gamma) * A));
}

double qfi_perturbative(const PulseSpec& pulse, const PhysicsParams& params) {
    params.validate();
    pulse.validate();
    if (pulse.alpha_sq == 0.0) return 0.0;
    Scaled f{PulseEvaluator(pulse), params.gamma};
    double delta = params.delta / params.gamma;
    // state: Pr, Pi, Qr, Qi, F
    auto rhs = [&](double tau, const std::vector<double>& y, std::vector<double>& dy) {
        cplx drive = std::conj(f.at(tau)) * std::polar(1.0, -delta * tau);
        cplx P(y[0], y[1]), Q(y[2], y[3]);
        cplx Pd = -0.5 * P + drive;
        cplx Qd = -0.5 * Q - 0.5 * P;
        dy[0] = Pd.real();
        dy[1] = Pd.imag();
        dy[2] = Qd.real();
        dy[3] = Qd.imag();
        dy[4] = 16.0 * std::norm(Qd);
    };
    double tau_end = horizon(pulse, params) * params.gamma;
    auto segments = scaled_segments(pulse, params.gamma, tau_end);
    std::vector<double> y(5, 0.0);
    Dopri5<double> stepper(rhs);
    OdeOptions<double> opts;
    opts.rel_tol = params.rel_tol;
    opts.abs_tol = params.abs_tol;
    for (std::size_t i = 0; i + 1 < segments.size(); ++i)
        stepper.integrate(segments[i], segments[i + 1], y, opts);
    return y[4];
}

double qfi_single_photon(const PulseSpec& pulse, const PhysicsParams& params) {
    params.validate();
    pulse.validate();
    if (pulse.alpha_sq == 0.0) return 0.0;
    PulseSpec unit = pulse.with_alpha_sq(1.0);
    Scaled f{PulseEvaluator(unit), params.gamma};
    double delta = params.delta / params.gamma;
    // state: Pr, Pi, Qr, Qi, Rr, Ri, 16 int |Q'|^2
    auto rhs = [&](double tau, const std::vector<double>& y, std::vector<double>& dy) {
        cplx drive = std::conj(f.at(tau)) * std::polar(1.0, -delta * tau);
        cplx P(y[0], y[1]), Q(y[2], y[3]);
        cplx Pd = -0.5 * P + drive;
        cplx Qd = -0.5 * Q - 0.5 * P;
        cplx Rd = std::conj(P) * Pd;
        dy[0] = Pd.real();
        dy[1] = Pd.imag();
        dy[2] = Qd.real();
        dy[3] = Qd.imag();
        dy[4] = Rd.real();
        dy[5] = Rd.imag();
        dy[6] = 16.0 * std::norm(Qd);
    };
    double tau_end = horizon(unit, params) * params.gamma;
    auto segments = scaled_segments(unit, params.gamma, tau_end);
    std::vector<double> y(7, 0.0);
    Dopri5<double> stepper(rhs);
    OdeOptions<double> opts;
    opts.rel_tol = params.rel_tol;
    opts.abs_tol = params.abs_tol;
    for (std::size_t i = 0; i + 1 < segments.size(); ++i)
        stepper.integrate(segments[i], segments[i + 1], y, opts);
    return y[6] - 4.0 * (y[4] * y[4] + y[5] * y[5]);
}

std::pair<double, double> quasi_steady_rect(double t_sigma, double alpha_sq) {
    double fz = 4.0 * alpha_sq * (t_sigma + 1.0) / (t_sigma + 8.0 * alpha_sq);
    double fx = -8.0 * alpha_sq * (t_sigma + 2.0 * std::expm1(-0.5 * t_sigma)) /
                (t_sigma + 8.0 * alpha_sq);
    return {fz, fx};
}

} // namespace qfi
