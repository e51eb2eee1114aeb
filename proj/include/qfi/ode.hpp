#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "qfi/errors.hpp"

namespace qfi {

template <class Real>
struct OdeOptions {
    Real rel_tol = Real(1e-9);
    Real abs_tol = Real(1e-12);
    std::size_t max_steps = 50'000'000;
};

struct OdeStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
};

// One accepted step, enough to rebuild the solution by cubic Hermite
// interpolation between t0 and t1.
template <class Real>
struct OdeStep {
    Real t0, t1;
    std::vector<Real> y0, f0, y1, f1;
};

// Dormand-Prince 5(4) embedded pair, FSAL. The right-hand side is
// rhs(t, y, dydt) with dydt pre-sized.
template <class Real>
class Dopri5 {
public:
    using Rhs = std::function<void(Real, const std::vector<Real>&, std::vector<Real>&)>;
    using StepSink = std::function<void(const OdeStep<Real>&)>;

    explicit Dopri5(Rhs rhs) : rhs_(std::move(rhs)) {}

    // Advances y from t0 to t1 in place. sink, when set, receives every
    // accepted step.
    void integrate(Real t0, Real t1, std::vector<Real>& y, const OdeOptions<Real>& opts,
                   OdeStats* stats = nullptr, const StepSink& sink = nullptr) {
        if (t1 <= t0) return;
        const std::size_t n = y.size();
        std::vector<Real> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
        std::vector<Real> ytmp(n), ynew(n), yerr(n);

        Real t = t0;
        rhs_(t, y, k1);
        if (stats) ++stats->rhs_evals;
        Real h = initial_step(t, y, k1, t1 - t0, opts);

        std::size_t steps = 0;
        while (t < t1) {
            if (steps++ > opts.max_steps)
                throw SolverFailure("dopri5: step budget exhausted");
            if (h < Real(16) * std::numeric_limits<Real>::epsilon() * std::max(std::abs(t), Real(1)))
                throw SolverFailure("dopri5: step size underflow");
            bool last = false;
            if (t + h >= t1) {
                h = t1 - t;
                last = true;
            }

            // stages
            for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a21 * k1[i]);
            rhs_(t + c2 * h, ytmp, k2);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            rhs_(t + c3 * h, ytmp, k3);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            rhs_(t + c4 * h, ytmp, k4);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            rhs_(t + c5 * h, ytmp, k5);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            rhs_(t + h, ytmp, k6);
            for (std::size_t i = 0; i < n; ++i)
                ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            rhs_(t + h, ynew, k7);
            if (stats) stats->rhs_evals += 6;

            // scaled error norm
            Real err = 0;
            for (std::size_t i = 0; i < n; ++i) {
                yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                Real sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                Real r = yerr[i] / sc;
                err += r * r;
            }
            err = std::sqrt(err / Real(n));

            if (err <= Real(1)) {
                if (sink) {
                    OdeStep<Real> step;
                    step.t0 = t;
                    step.t1 = t + h;
                    step.y0 = y;
                    step.f0 = k1;
                    step.y1 = ynew;
                    step.f1 = k7;
                    sink(step);
                }
                t += h;
                y = ynew;
                k1 = k7;  // FSAL
                if (stats) ++stats->steps;
                Real fac = err > Real(0) ? Real(0.9) * std::pow(err, Real(-0.2)) : Real(5);
                h *= std::clamp<Real>(fac, Real(0.2), Real(5));
                if (last && t >= t1) break;
            } else {
                if (stats) ++stats->rejected;
                Real fac = Real(0.9) * std::pow(err, Real(-0.2));
                h *= std::clamp<Real>(fac, Real(0.1), Real(1));
            }
        }
    }

private:
    Real initial_step(Real t, const std::vector<Real>& y, const std::vector<Real>& f,
                      Real span, const OdeOptions<Real>& opts) const {
        // Hairer's heuristic, clipped to the integration span.
        Real d0 = 0, d1 = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            Real sc = opts.abs_tol + opts.rel_tol * std::abs(y[i]);
            Real a = y[i] / sc, b = f[i] / sc;
            d0 += a * a;
            d1 += b * b;
        }
        d0 = std::sqrt(d0 / Real(y.size()));
        d1 = std::sqrt(d1 / Real(y.size()));
        Real h0 = (d0 < Real(1e-5) || d1 < Real(1e-5)) ? Real(1e-6) * span : Real(0.01) * d0 / d1;
        (void)t;
        return std::min(h0, span);
    }

    Rhs rhs_;

    // Butcher tableau
    static constexpr Real c2 = Real(1) / 5, c3 = Real(3) / 10, c4 = Real(4) / 5, c5 = Real(8) / 9;
    static constexpr Real a21 = Real(1) / 5;
    static constexpr Real a31 = Real(3) / 40, a32 = Real(9) / 40;
    static constexpr Real a41 = Real(44) / 45, a42 = Real(-56) / 15, a43 = Real(32) / 9;
    static constexpr Real a51 = Real(19372) / 6561, a52 = Real(-25360) / 2187,
                          a53 = Real(64448) / 6561, a54 = Real(-212) / 729;
    static constexpr Real a61 = Real(9017) / 3168, a62 = Real(-355) / 33,
                          a63 = Real(46732) / 5247, a64 = Real(49) / 176,
                          a65 = Real(-5103) / 18656;
    static constexpr Real a71 = Real(35) / 384, a73 = Real(500) / 1113, a74 = Real(125) / 192,
                          a75 = Real(-2187) / 6784, a76 = Real(11) / 84;
    static constexpr Real e1 = Real(71) / 57600, e3 = Real(-71) / 16695, e4 = Real(71) / 1920,
                          e5 = Real(-17253) / 339200, e6 = Real(22) / 525, e7 = Real(-1) / 40;
};

// Accepted-step record supporting value and derivative queries at arbitrary
// times inside the integrated span.
template <class Real>
class HermiteTrajectory {
public:
    void push(const OdeStep<Real>& s) { steps_.push_back(s); }
    bool empty() const { return steps_.empty(); }
    Real t_begin() const { return steps_.front().t0; }
    Real t_end() const { return steps_.back().t1; }
    std::size_t size() const { return steps_.size(); }

    void eval(Real t, std::vector<Real>& out) const {
        const OdeStep<Real>& s = locate(t);
        Real h = s.t1 - s.t0;
        Real th = (t - s.t0) / h;
        Real th2 = th * th, th3 = th2 * th;
        Real h00 = 2 * th3 - 3 * th2 + 1;
        Real h10 = th3 - 2 * th2 + th;
        Real h01 = -2 * th3 + 3 * th2;
        Real h11 = th3 - th2;
        out.resize(s.y0.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = h00 * s.y0[i] + h * h10 * s.f0[i] + h01 * s.y1[i] + h * h11 * s.f1[i];
    }

    void eval_derivative(Real t, std::vector<Real>& out) const {
        const OdeStep<Real>& s = locate(t);
        Real h = s.t1 - s.t0;
        Real th = (t - s.t0) / h;
        Real th2 = th * th;
        Real d00 = (6 * th2 - 6 * th) / h;
        Real d10 = 3 * th2 - 4 * th + 1;
        Real d01 = (-6 * th2 + 6 * th) / h;
        Real d11 = 3 * th2 - 2 * th;
        out.resize(s.y0.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = d00 * s.y0[i] + d10 * s.f0[i] + d01 * s.y1[i] + d11 * s.f1[i];
    }

private:
    const OdeStep<Real>& locate(Real t) const {
        if (steps_.empty()) throw SolverFailure("trajectory: empty");
        // binary search for the step containing t
        std::size_t lo = 0, hi = steps_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (t <= steps_[mid].t1)
                hi = mid;
            else
                lo = mid + 1;
        }
        return steps_[lo];
    }

    std::vector<OdeStep<Real>> steps_;
};

} // namespace qfi
