#include "qfi/engine.hpp"

#include <algorithm>
#include <cmath>

#include "qfi/ode.hpp"

namespace qfi {

namespace {

// Dimensionless view of a pulse: time in units of 1/gamma, amplitude in units
// of sqrt(gamma). The ODE systems below are written for gamma = 1.
struct ScaledPulse {
    PulseEvaluator ev;
    double gamma;

    ScaledPulse(const PulseSpec& spec, double gamma_) : ev(spec), gamma(gamma_) {}

    double real_at(double tau) const { return ev.real_at(tau / gamma) / std::sqrt(gamma); }
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

struct IntegrationResult {
    std::vector<double> y;
    OdeStats stats;
    HermiteTrajectory<double> traj;
};

template <class Rhs>
IntegrationResult integrate_segments(const Rhs& rhs, const std::vector<double>& segments,
                                     std::vector<double> y0, double rel_tol, double abs_tol,
                                     bool keep_trajectory) {
    IntegrationResult out;
    out.y = std::move(y0);
    Dopri5<double> stepper(rhs);
    OdeOptions<double> opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = abs_tol;
    Dopri5<double>::StepSink sink = nullptr;
    if (keep_trajectory)
        sink = [&](const OdeStep<double>& s) { out.traj.push(s); };
    for (std::size_t i = 0; i + 1 < segments.size(); ++i)
        stepper.integrate(segments[i], segments[i + 1], out.y, opts, &out.stats, sink);
    return out;
}

std::vector<StateSample> sample_trajectory(const HermiteTrajectory<double>& traj, double gamma,
                                           double tau_end, int n_samples) {
    std::vector<StateSample> samples;
    samples.reserve(n_samples);
    std::vector<double> y;
    for (int i = 0; i < n_samples; ++i) {
        double tau = tau_end * i / (n_samples - 1.0);
        traj.eval(std::clamp(tau, traj.t_begin(), traj.t_end()), y);
        samples.push_back({tau / gamma, y});
    }
    return samples;
}

} // namespace

double horizon(const PulseSpec& pulse, const PhysicsParams& params) {
    params.validate();
    pulse.validate();
    return pulse.support_end() + params.horizon_factor / params.gamma;
}

QfiBreakdown solve_real(const PulseSpec& pulse, const PhysicsParams& params,
                        const SolveOptions& opts) {
    params.validate();
    pulse.validate();
    if (!pulse.is_real())
        throw std::invalid_argument("solve_real: pulse must be real-valued");
    if (params.delta != 0.0)
        throw std::invalid_argument("solve_real: detuning must be zero");

    ScaledPulse f(pulse, params.gamma);
    // state: x, z, xi, F, a, b, Fp, Fz, Fx (dimensionless)
    auto rhs = [&](double tau, const std::vector<double>& y, std::vector<double>& dy) {
        double ft = f.real_at(tau);
        double x = y[0], z = y[1], xi = y[2], a = y[4], b = y[5];
        dy[0] = -0.5 * x + 2.0 * ft * z;
        dy[1] = -z - 2.0 * ft * x - 1.0;
        dy[2] = -0.5 * xi + 0.25 * x + 0.5 * ft;
        dy[3] = 0.5 * (1.0 + z) + 4.0 * ft * xi;
        dy[4] = -0.5 * a + ft;
        dy[5] = -0.5 * b + x;
        dy[6] = 2.0 * ft * a;
        dy[7] = 0.5 * (1.0 + z);
        dy[8] = ft * b;
    };

    double factor = params.horizon_factor;
    for (int attempt = 0;; ++attempt) {
        double tau_end = (pulse.support_end() + factor / params.gamma) * params.gamma;
        auto segments = scaled_segments(pulse, params.gamma, tau_end);
        std::vector<double> y0(9, 0.0);
        y0[1] = -1.0;  // z(0) = -1
        auto res = integrate_segments(rhs, segments, y0, params.rel_tol, params.abs_tol,
                                      opts.trajectory_samples > 0);

        double fdot = 0.5 * (1.0 + res.y[1]);
        if (std::abs(fdot) > params.abs_tol) {
            if (attempt < 2) {
                factor *= 2.0;
                continue;
            }
            throw HorizonNotConverged("solve_real: dF/dt above abs_tol at t_end");
        }

        QfiBreakdown out;
        out.total = res.y[3];
        out.f_p = res.y[6];
        out.f_z = res.y[7];
        out.f_x = res.y[8];
        out.t_end = tau_end / params.gamma;
        out.solver = {params.rel_tol, params.abs_tol, res.stats.steps, res.stats.rhs_evals,
                      factor, std::abs(res.y[2] - (0.25 * res.y[5] + 0.5 * res.y[4]))};
        if (opts.trajectory_samples > 0)
            out.trajectory = sample_trajectory(res.traj, params.gamma, tau_end,
                                               opts.trajectory_samples);
        return out;
    }
}

QfiBreakdown solve_complex(const PulseSpec& pulse, const PhysicsParams& params,
                           const SolveOptions& opts) {
    params.validate();
    pulse.validate();

    ScaledPulse f(pulse, params.gamma);
    double delta = params.delta / params.gamma;
    // state: x1, y1, z1, w1, x2, y2, z2, w2, int (1+z1)/2
    auto rhs = [&](double tau, const std::vector<double>& y, std::vector<double>& dy) {
        cplx ft = f.at(tau);
        double fr = ft.real(), fi = ft.imag();
        double x1 = y[0], y1 = y[1], z1 = y[2];
        double x2 = y[4], y2 = y[5], z2 = y[6];
        dy[0] = -0.5 * x1 + 2.0 * fr * z1 - delta * y1;
        dy[1] = -0.5 * y1 - 2.0 * fi * z1 + delta * x1;
        dy[2] = -z1 - 2.0 * fr * x1 + 2.0 * fi * y1 - 1.0;
        dy[3] = 0.5 * (fi * x1 + fr * y1);
        dy[4] = -0.5 * x2 + 2.0 * fr * z2 - delta * y2 - 0.25 * y1 + 0.5 * fi;
        dy[5] = -0.5 * y2 - 2.0 * fi * z2 + delta * x2 + 0.25 * x1 + 0.5 * fr;
        dy[6] = -z2 - 2.0 * fr * x2 + 2.0 * fi * y2 - y[3];
        dy[7] = 0.5 * (fi * x2 + fr * y2);
        dy[8] = 0.5 * (1.0 + z1);
    };

    double factor = params.horizon_factor;
    for (int attempt = 0;; ++attempt) {
        double tau_end = (pulse.support_end() + factor / params.gamma) * params.gamma;
        auto segments = scaled_segments(pulse, params.gamma, tau_end);
        std::vector<double> y0(9, 0.0);
        y0[2] = -1.0;  // z1(0) = -1
        auto res = integrate_segments(rhs, segments, y0, params.rel_tol, params.abs_tol,
                                      opts.trajectory_samples > 0);

        double fdot = 0.5 * (1.0 + res.y[2]);
        if (std::abs(fdot) > params.abs_tol) {
            if (attempt < 2) {
                factor *= 2.0;
                continue;
            }
            throw HorizonNotConverged("solve_complex: dF/dt above abs_tol at t_end");
        }

        QfiBreakdown out;
        double w1 = res.y[3], w2 = res.y[7];
        out.z1_term = res.y[8];
        out.work_term = 4.0 * (2.0 * w2 - w1 * w1);
        out.total = *out.z1_term + *out.work_term;
        out.t_end = tau_end / params.gamma;
        out.solver = {params.rel_tol, params.abs_tol, res.stats.steps, res.stats.rhs_evals,
                      factor, 0.0};
        if (opts.trajectory_samples > 0)
            out.trajectory = sample_trajectory(res.traj, params.gamma, tau_end,
                                               opts.trajectory_samples);
        return out;
    }
}

} // namespace qfi
