#include "qfi/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "qfi/ode.hpp"
#include "qfi/parallel.hpp"

namespace qfi {

namespace {

using ld = long double;

// Integrates the d_j system nondimensionalized by gamma1 up to tau_end.
std::array<ld, 8> evolve_d(ld g1_rel, ld g2_rel, const PulseEvaluator& ev, double gamma_unit,
                           double delta, const std::vector<double>& segments,
                           const OracleOptions& opts) {
    const ld sg1 = std::sqrt(g1_rel), sg2 = std::sqrt(g2_rel);
    const ld gm = sg1 - sg2, gp = sg1 + sg2;
    const ld gm2 = ld(0.25) * gm * gm, gp2 = ld(0.25) * gp * gp;
    const ld sum4 = ld(0.25) * (g1_rel + g2_rel), dif4 = ld(0.25) * (g1_rel - g2_rel);
    const ld del = ld(delta) / ld(gamma_unit);
    const ld amp = ld(1) / std::sqrt(ld(gamma_unit));

    auto rhs = [&](ld tau, const std::vector<ld>& d, std::vector<ld>& dd) {
        cplx fval = ev(static_cast<double>(tau) / gamma_unit);
        ld fr = ld(fval.real()) * amp, fi = ld(fval.imag()) * amp;
        dd[0] = -gm2 * (d[0] + d[3]) + gm * (d[5] * fi + d[6] * fr);
        dd[1] = -sum4 * d[1] - del * d[2] - dif4 * d[6] + gm * fi * d[4] + gp * fr * d[3];
        dd[2] = del * d[1] - sum4 * d[2] + dif4 * d[5] - gp * fi * d[3] + gm * fr * d[4];
        dd[3] = -gp2 * (d[0] + d[3]) + gp * (fi * d[2] - fr * d[1]);
        dd[4] = -gm2 * (d[4] + d[7]) - gm * (fi * d[1] + fr * d[2]);
        dd[5] = dif4 * d[2] - sum4 * d[5] - del * d[6] - gm * fi * d[0] + gp * fr * d[7];
        dd[6] = -dif4 * d[1] + del * d[5] - sum4 * d[6] - gp * fi * d[7] - gm * fr * d[0];
        dd[7] = -gp2 * (d[4] + d[7]) + gp * (fi * d[6] - fr * d[5]);
    };

    std::vector<ld> y{1, 0, 0, -1, 0, 0, 0, 0};
    Dopri5<ld> stepper(rhs);
    OdeOptions<ld> oo;
    oo.rel_tol = opts.rel_tol;
    oo.abs_tol = opts.abs_tol;
    for (std::size_t i = 0; i + 1 < segments.size(); ++i)
        stepper.integrate(ld(segments[i]), ld(segments[i + 1]), y, oo);

    std::array<ld, 8> out;
    std::copy(y.begin(), y.end(), out.begin());
    return out;
}

std::vector<double> segment_list(const PulseSpec& pulse, double gamma_unit, double t_end) {
    std::vector<double> seg{0.0};
    double tau_end = t_end * gamma_unit;
    for (double b : pulse.breakpoints()) {
        double tb = b * gamma_unit;
        if (tb > 0 && tb < tau_end) seg.push_back(tb);
    }
    seg.push_back(tau_end);
    std::sort(seg.begin(), seg.end());
    seg.erase(std::unique(seg.begin(), seg.end()), seg.end());
    return seg;
}

} // namespace

GeneralizedState evolve_mu(double gamma1, double gamma2, const PulseSpec& pulse, double delta,
                           double t_end, const OracleOptions& opts) {
    if (!(gamma1 > 0) || !(gamma2 > 0)) throw Error("evolve_mu: rates must be positive");
    pulse.validate();
    PulseEvaluator ev(pulse);
    double gu = gamma1;
    auto segments = segment_list(pulse, gu, t_end);
    auto d = evolve_d(gamma1 / gu, gamma2 / gu, ev, gu, delta, segments, opts);
    GeneralizedState s;
    for (int i = 0; i < 8; ++i) s.d[i] = static_cast<double>(d[i]);
    s.gamma1 = gamma1;
    s.gamma2 = gamma2;
    return s;
}

double global_fidelity(const GeneralizedState& s) { return std::hypot(s.d[0], s.d[4]); }

FdEstimate qfi_fd_global(const PulseSpec& pulse, const PhysicsParams& params, double h,
                         const OracleOptions& opts) {
    params.validate();
    double rel = h / params.gamma;
    if (!(rel >= 1e-6 && rel <= 1e-2))
        throw Error("qfi_fd_global: h/gamma outside [1e-6, 1e-2]");
    double t_end = horizon(pulse, params);
    PulseEvaluator ev(pulse);
    auto segments = segment_list(pulse, params.gamma, t_end);

    // Fidelities at gamma2 = gamma (1 +- h~), (1 +- h~/2), in gamma units.
    const double steps[4] = {rel, -rel, 0.5 * rel, -0.5 * rel};
    ld fav[4];
    parallel_for(
        4,
        [&](std::size_t i) {
            auto d = evolve_d(1.0L, 1.0L + ld(steps[i]), ev, params.gamma, params.delta, segments,
                              opts);
            fav[i] = std::sqrt(d[0] * d[0] + d[4] * d[4]);
        },
        opts.jobs);

    ld dev = std::max({std::abs(fav[0] - ld(1)), std::abs(fav[1] - ld(1)),
                       std::abs(fav[2] - ld(1)), std::abs(fav[3] - ld(1))});
    if (dev < ld(100) * ld(opts.abs_tol))
        throw StepTooSmall("qfi_fd_global: fidelity drop below solver noise");

    ld hh = ld(rel);
    ld d_h = ld(-4) * (fav[0] + fav[1] - ld(2)) / (hh * hh);
    ld d_h2 = ld(-4) * (fav[2] + fav[3] - ld(2)) / (hh * hh / ld(4));
    ld rich = (ld(4) * d_h2 - d_h) / ld(3);

    FdEstimate est;
    est.qfi = static_cast<double>(rich);
    est.step = h;
    est.richardson_err = static_cast<double>(std::abs(rich - d_h2));
    return est;
}

double fidelity_emitted(double gamma1, double gamma2, const PulseSpec& pulse, double delta,
                        double t, const OracleOptions& opts) {
    GeneralizedState s = evolve_mu(gamma1, gamma2, pulse, delta, t, opts);
    const cplx i(0, 1);
    cplx c0(s.d[0], s.d[4]), c1(s.d[1], s.d[5]), c2(s.d[2], s.d[6]), c3(s.d[3], s.d[7]);
    Eigen::Matrix2cd mu;
    mu(0, 0) = 0.5 * (c0 + c3);
    mu(0, 1) = 0.5 * (c1 - i * c2);
    mu(1, 0) = 0.5 * (c1 + i * c2);
    mu(1, 1) = 0.5 * (c0 - c3);
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(mu);
    return svd.singularValues().sum();
}

} // namespace qfi
