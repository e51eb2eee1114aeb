#include "qfi/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "qfi/ode.hpp"
#include "qfi/parallel.hpp"
#include "qfi/rng.hpp"

namespace qfi {

namespace {

constexpr double kPi = 3.14159265358979323846;

double norm2(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Fills values[k] = xi_n(t) for every mode of a real basis (harmonic or
// hermite-gaussian), using the same recurrences as the pulse evaluator.
void real_basis_row(const BasisSpec& b, double t, std::vector<double>& values) {
    values.assign(b.mode_count(), 0.0);
    if (t < b.support_begin() || t > b.support_end()) return;
    if (b.kind == BasisKind::Harmonic) {
        double theta = kPi * t / b.T;
        double two_cos = 2.0 * std::cos(theta);
        double s_prev = 0.0, s_cur = std::sin(theta);
        double scale = std::sqrt(2.0 / b.T);
        for (int n = 1; n <= b.n_max; ++n) {
            values[n - 1] = scale * s_cur;
            double s_next = two_cos * s_cur - s_prev;
            s_prev = s_cur;
            s_cur = s_next;
        }
    } else if (b.kind == BasisKind::HermiteGaussian) {
        double s = (t - b.t0) / b.T;
        double scale = 1.0 / std::sqrt(b.T);
        double h0 = std::pow(kPi, -0.25) * std::exp(-0.5 * s * s);
        values[0] = scale * h0;
        if (b.n_max >= 1) {
            double h1 = std::sqrt(2.0) * s * h0;
            values[1] = scale * h1;
            for (int n = 2; n <= b.n_max; ++n) {
                double h2 = std::sqrt(2.0 / n) * s * h1 - std::sqrt((n - 1.0) / n) * h0;
                values[n] = scale * h2;
                h0 = h1;
                h1 = h2;
            }
        }
    } else {
        throw Error("adjoint gradient: basis must be real (harmonic or hermite-gaussian)");
    }
}

// Adjoint-state gradient of gamma^2 F with respect to the (already
// normalized) real coefficients c. Forward pass stores the trajectory; the
// backward pass integrates the costate and one accumulator per mode.
std::vector<double> adjoint_gradient_coeffs(const OptConfig& cfg, const std::vector<cplx>& c) {
    const BasisSpec& b = cfg.basis;
    std::vector<cplx> cc = c;
    PulseSpec pulse = synthesize(b, cc, cfg.alpha_sq);
    if (!pulse.is_real()) throw Error("adjoint gradient: pulse must be real");
    const double g = cfg.params.gamma;
    PulseEvaluator ev(pulse);
    auto f_at = [&](double tau) { return ev.real_at(tau / g) / std::sqrt(g); };

    const double tau_pulse = pulse.support_end() * g;
    const double tau_end = tau_pulse + cfg.params.horizon_factor;

    // forward: x, z, xi
    auto fwd_rhs = [&](double tau, const std::vector<double>& y, std::vector<double>& dy) {
        double ft = f_at(tau);
        dy[0] = -0.5 * y[0] + 2.0 * ft * y[1];
        dy[1] = -y[1] - 2.0 * ft * y[0] - 1.0;
        dy[2] = -0.5 * y[2] + 0.25 * y[0] + 0.5 * ft;
    };
    HermiteTrajectory<double> traj;
    {
        Dopri5<double> stepper(fwd_rhs);
        OdeOptions<double> opts{cfg.params.rel_tol, cfg.params.abs_tol};
        std::vector<double> y{0.0, -1.0, 0.0};
        auto sink = [&](const OdeStep<double>& s) { traj.push(s); };
        std::vector<double> seg{0.0};
        for (double bp : pulse.breakpoints()) {
            double tb = bp * g;
            if (tb > 0 && tb < tau_end) seg.push_back(tb);
        }
        seg.push_back(tau_end);
        std::sort(seg.begin(), seg.end());
        seg.erase(std::unique(seg.begin(), seg.end()), seg.end());
        for (std::size_t i = 0; i + 1 < seg.size(); ++i)
            stepper.integrate(seg[i], seg[i + 1], y, opts, nullptr, sink);
    }

    // backward in sigma = tau_end - tau: costate (lx, lz, lxi), lF == 1,
    // then one integral per mode of mu(tau) xi_n(tau).
    const int m = b.mode_count();
    std::vector<double> xi_row, state;
    auto bwd_rhs = [&](double sigma, const std::vector<double>& y, std::vector<double>& dy) {
        double tau = tau_end - sigma;
        double ft = f_at(tau);
        double lx = y[0], lz = y[1], lxi = y[2];
        dy[0] = -0.5 * lx - 2.0 * ft * lz + 0.25 * lxi;
        dy[1] = 2.0 * ft * lx - lz + 0.5;
        dy[2] = -0.5 * lxi + 4.0 * ft;
        traj.eval(std::clamp(tau, traj.t_begin(), traj.t_end()), state);
        double mu = 2.0 * state[1] * lx - 2.0 * state[0] * lz + 0.5 * lxi + 4.0 * state[2];
        real_basis_row(b, tau / g, xi_row);
        for (int i = 0; i < m; ++i) dy[3 + i] = mu * xi_row[i] / std::sqrt(g);
    };
    std::vector<double> yb(3 + m, 0.0);
    Dopri5<double> stepper(bwd_rhs);
    OdeOptions<double> opts{cfg.params.rel_tol, cfg.params.abs_tol};
    // costate only over the silent tail, accumulators join once inside the pulse
    stepper.integrate(0.0, tau_end - tau_pulse, yb, opts);
    stepper.integrate(tau_end - tau_pulse, tau_end, yb, opts);

    std::vector<double> grad(m);
    for (int i = 0; i < m; ++i) grad[i] = yb[3 + i];
    return grad;
}

} // namespace

std::vector<cplx> pack_coeffs(const OptConfig& cfg, const std::vector<double>& u) {
    const int m = cfg.basis.mode_count();
    double nrm = norm2(u);
    if (nrm <= 0) throw ZeroVector("optimize: zero parameter vector");
    double scale = std::sqrt(cfg.alpha_sq) / nrm;
    std::vector<cplx> c(m);
    for (int i = 0; i < m; ++i) {
        double re = u[i] * scale;
        double im = cfg.complex_coeffs ? u[m + i] * scale : 0.0;
        c[i] = cplx(re, im);
    }
    return c;
}

double objective(const OptConfig& cfg, const std::vector<double>& u) {
    PulseSpec pulse = synthesize(cfg.basis, pack_coeffs(cfg, u), cfg.alpha_sq);
    if (pulse.is_real() && cfg.params.delta == 0.0)
        return solve_real(pulse, cfg.params).total;
    return solve_complex(pulse, cfg.params).total;
}

std::vector<double> gradient(const OptConfig& cfg, const std::vector<double>& u) {
    cfg.validate();
    const int dim = cfg.dim();
    if (static_cast<int>(u.size()) != dim) throw Error("gradient: wrong dimension");

    if (cfg.grad_mode == GradMode::Adjoint) {
        auto gc = adjoint_gradient_coeffs(cfg, pack_coeffs(cfg, u));
        // chain rule through u -> alpha u/|u|
        double nrm = norm2(u);
        double alpha = std::sqrt(cfg.alpha_sq);
        std::vector<double> uhat(u);
        for (double& x : uhat) x /= nrm;
        double proj = dot(gc, uhat);
        std::vector<double> grad(dim);
        for (int i = 0; i < dim; ++i) grad[i] = alpha / nrm * (gc[i] - proj * uhat[i]);
        return grad;
    }

    double h = cfg.fd_step * std::sqrt(cfg.alpha_sq);
    std::vector<double> grad(dim);
    parallel_for(
        static_cast<std::size_t>(dim),
        [&](std::size_t i) {
            std::vector<double> up(u), um(u);
            up[i] += h;
            um[i] -= h;
            grad[i] = (objective(cfg, up) - objective(cfg, um)) / (2.0 * h);
        },
        cfg.jobs);
    return grad;
}

OptResult optimize(const OptConfig& cfg) {
    cfg.validate();
    const int dim = cfg.dim();
    const int m = cfg.basis.mode_count();
    const double alpha = std::sqrt(cfg.alpha_sq);

    // deterministic seed: the single mode nearest omega = gamma/2 (plus the
    // detuning shift for the periodic basis)
    auto deterministic_seed = [&]() {
        std::vector<double> u(dim, 0.0);
        int n_star;
        if (cfg.basis.kind == BasisKind::PlaneWave) {
            double target = cfg.params.delta + 0.5 * cfg.params.gamma;
            n_star = static_cast<int>(std::lround(target * cfg.basis.T / (2.0 * kPi)));
        } else if (cfg.basis.kind == BasisKind::Harmonic) {
            n_star = static_cast<int>(std::lround(cfg.params.gamma * cfg.basis.T / (2.0 * kPi)));
        } else {
            n_star = cfg.basis.n_min;
        }
        n_star = std::clamp(n_star, cfg.basis.n_min, cfg.basis.n_max);
        u[n_star - cfg.basis.n_min] = alpha;
        return u;
    };

    OptResult result;
    result.per_seed.resize(cfg.n_seeds);
    std::vector<std::vector<double>> best_u(cfg.n_seeds);
    int first_iter_failures = 0;

    for (int seed = 0; seed < cfg.n_seeds; ++seed) {
        std::vector<double> u;
        if (seed == 0) {
            u = deterministic_seed();
        } else {
            Rng rng(substream(cfg.rng_seed, static_cast<std::uint64_t>(seed)));
            u.resize(dim);
            for (double& x : u) x = rng.normal();
            double nrm = norm2(u);
            for (double& x : u) x *= alpha / nrm;
        }

        double fval = objective(cfg, u);
        std::vector<double> grad = gradient(cfg, u);

        // L-BFGS two-loop on phi = -f with Armijo backtracking
        std::deque<std::pair<std::vector<double>, std::vector<double>>> mem;  // (s, y) of phi
        SeedRecord rec;
        rec.final_qfi = fval;
        bool failed_first = false;

        for (int iter = 0; iter < cfg.max_iters; ++iter) {
            double gnorm = 0;
            for (double x : grad) gnorm = std::max(gnorm, std::abs(x));
            if (gnorm <= 1e-8 * alpha) {
                rec.converged = true;
                break;
            }

            // direction = -H * grad(phi) = H * grad(f)
            std::vector<double> q(grad);
            for (double& x : q) x = -x;  // grad of phi
            std::vector<double> alphas(mem.size());
            for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
                const auto& [s, y] = mem[i];
                double rho = 1.0 / dot(y, s);
                alphas[i] = rho * dot(s, q);
                for (std::size_t k = 0; k < q.size(); ++k) q[k] -= alphas[i] * y[k];
            }
            if (!mem.empty()) {
                const auto& [s, y] = mem.back();
                double scale = dot(s, y) / dot(y, y);
                for (double& x : q) x *= scale;
            } else {
                // first step: scale so the move is a modest fraction of alpha
                double qn = norm2(q);
                if (qn > 0)
                    for (double& x : q) x *= 0.1 * alpha / qn;
            }
            std::vector<double> dir(q);
            for (double& x : dir) x = -x;  // descent for phi == ascent for f

            double slope = dot(grad, dir);  // d f / d step
            if (slope <= 0) {
                // bad curvature; restart from steepest ascent
                mem.clear();
                dir = grad;
                double dn = norm2(dir);
                for (double& x : dir) x *= 0.1 * alpha / std::max(dn, 1e-300);
                slope = dot(grad, dir);
            }

            double step = 1.0;
            double fnew = 0;
            std::vector<double> unew;
            bool accepted = false;
            for (int ls = 0; ls < 30; ++ls) {
                unew = u;
                for (int k = 0; k < dim; ++k) unew[k] += step * dir[k];
                double nrm = norm2(unew);
                if (nrm > 0)
                    for (double& x : unew) x *= alpha / nrm;
                fnew = objective(cfg, unew);
                if (fnew >= fval + 1e-4 * step * slope) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                if (iter == 0) failed_first = true;
                break;
            }

            std::vector<double> gnew = gradient(cfg, unew);
            std::vector<double> s(dim), yv(dim);
            for (int k = 0; k < dim; ++k) {
                s[k] = unew[k] - u[k];
                yv[k] = -(gnew[k] - grad[k]);  // y of phi
            }
            if (dot(s, yv) > 1e-12 * norm2(s) * norm2(yv)) {
                mem.emplace_back(std::move(s), std::move(yv));
                if (mem.size() > 10) mem.pop_front();
            }

            bool small_change = std::abs(fnew - fval) <= cfg.convergence_tol * std::max(1.0, std::abs(fnew));
            u = std::move(unew);
            fval = fnew;
            grad = std::move(gnew);
            rec.iterations = iter + 1;
            if (small_change) {
                rec.converged = true;
                break;
            }
        }

        rec.final_qfi = fval;
        result.per_seed[seed] = rec;
        best_u[seed] = u;
        if (failed_first) ++first_iter_failures;
    }

    if (first_iter_failures == cfg.n_seeds)
        throw NoImprovement("optimize: line search failed at iteration 0 for every seed");

    int best = 0;
    for (int s = 1; s < cfg.n_seeds; ++s)
        if (result.per_seed[s].final_qfi > result.per_seed[best].final_qfi) best = s;

    result.best_seed = best;
    result.best_qfi = result.per_seed[best].final_qfi;
    result.best_coeffs = pack_coeffs(cfg, best_u[best]);
    result.populations.resize(m);
    for (int i = 0; i < m; ++i)
        result.populations[i] = std::norm(result.best_coeffs[i]) / cfg.alpha_sq;
    return result;
}

} // namespace qfi
