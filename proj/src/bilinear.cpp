#include "qfi/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qfi/ode.hpp"
#include "qfi/parallel.hpp"

namespace qfi {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sq(double x) { return x * x; }

// parity factor (-1)^m, continued as cos(pi m) for the detuned real-index case
double par(double m) {
    double r = std::remainder(m, 2.0);
    if (r == 0.0) return 1.0;
    if (std::abs(std::abs(r) - 1.0) < 1e-12) return -1.0;
    return std::cos(kPi * m);
}

// 10-point Gauss-Legendre rule on [-1, 1]
constexpr double kGlx[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                            0.8650633666889845, 0.9739065285171717};
constexpr double kGlw[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                            0.1494513491505806, 0.0666713443086881};

void append_panel_nodes(double a, double b, std::vector<double>& nodes,
                        std::vector<double>& weights) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < 5; ++i) {
        nodes.push_back(mid - half * kGlx[i]);
        weights.push_back(half * kGlw[i]);
        nodes.push_back(mid + half * kGlx[i]);
        weights.push_back(half * kGlw[i]);
    }
}

void append_panels(double a, double b, double width, std::vector<double>& nodes,
                   std::vector<double>& weights) {
    if (!(b > a)) return;
    int count = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    double w = (b - a) / count;
    for (int i = 0; i < count; ++i) append_panel_nodes(a + i * w, a + (i + 1) * w, nodes, weights);
}

} // namespace

HarmonicKTriple k_harmonic_closed(double r, int n_max) {
    if (!(r > 0) || n_max < 1) throw Error("k_harmonic_closed: need r > 0, n_max >= 1");
    HarmonicKTriple out;
    out.r = r;
    out.k1.resize(n_max, n_max);
    out.k2.resize(n_max, n_max);
    out.k3_sym.resize(n_max, n_max);
    const double er2 = std::exp(-0.5 * kPi * r);
    const double er = std::exp(-kPi * r);
    for (int m = 1; m <= n_max; ++m) {
        for (int n = 1; n <= n_max; ++n) {
            double dm = 4.0 * m * m + r * r, dn = 4.0 * n * n + r * r;
            double pm = par(m), pn = par(n), pmn = pm * pn;
            double k1, k2, k3;
            if (m == n) {
                k1 = 4.0 * r / sq(dn) *
                     (r * r * r + 4.0 * n * n / kPi * (4.0 - 4.0 * pn * er2 + r * kPi));
                k2 = 4.0 * r * (kPi * r * r * r + 4.0 * n * n * (-2.0 * er + 2.0 + kPi * r)) /
                         (kPi * sq(dn)) +
                     32.0 * sq(pn - er2) * n * n * r / (kPi * sq(dn));
                k3 = 8.0 * r * r / (kPi * dn * sq(dn)) *
                     (8.0 * er2 * pn * n * n * (4.0 * n * n * kPi + r * (8.0 + kPi * r)) +
                      (16.0 * sq(double(n * n)) * kPi - 64.0 * n * n * r - kPi * sq(r * r)));
            } else {
                k1 = 16.0 * m * n * r / (kPi * dm) *
                     (4.0 / dn * (1.0 - pn * er2) + (1.0 - pmn) / double(m * m - n * n));
                k2 = 32.0 * m * n * r / (kPi * dm * dn) * ((1.0 - er) + (pm - er2) * (pn - er2));
                double B = 4.0 * kPi * m * m * r * r + 4.0 * kPi * n * n * r * r +
                           kPi * sq(r * r) + 16.0 * sq(double(m * n)) * kPi + 8.0 * r * r * r +
                           16.0 * m * m * r + 16.0 * n * n * r;
                k3 = 32.0 * m * n * r * r * B / (kPi * sq(dm) * sq(dn)) * (pm + pn) * er2 -
                     256.0 * m * n * r * r * r * (2.0 * m * m + 2.0 * n * n + r * r) /
                         (kPi * sq(dm) * sq(dn)) * (1.0 + pmn);
            }
            out.k1(m - 1, n - 1) = k1;
            out.k2(m - 1, n - 1) = k2;
            out.k3_sym(m - 1, n - 1) = k3;
        }
    }
    return out;
}

PlaneWaveKTriple k_planewave_closed(double r, int n_min, int n_max, double delta_over_gamma) {
    if (!(r > 0) || n_max < n_min) throw Error("k_planewave_closed: need r > 0 and modes");
    const int count = n_max - n_min + 1;
    PlaneWaveKTriple out;
    out.r = r;
    out.k1.resize(count, count);
    out.k2.resize(count, count);
    out.k3.resize(count, count);
    const double er2 = std::exp(-0.5 * kPi * r);
    const double er = std::exp(-kPi * r);
    const double shift = 0.5 * delta_over_gamma * r;  // omega -> omega - delta
    const cplx i(0, 1);
    for (int mi = 0; mi < count; ++mi) {
        for (int ni = 0; ni < count; ++ni) {
            double m = (n_min + mi) - shift;
            double n = (n_min + ni) - shift;
            double dm = 16.0 * m * m + r * r, dn = 16.0 * n * n + r * r;
            cplx k1, k2, k3;
            if (mi == ni) {
                k1 = (4.0 * r * r * r * (kPi * r - 2.0 + 2.0 * er2) +
                      64.0 * n * n * r * (kPi * r + 2.0 - 2.0 * er2)) /
                     (kPi * sq(dn));
                k2 = (4.0 * r * r * r * (4.0 * er2 - er + kPi * r - 3.0) +
                      64.0 * n * n * r * (1.0 + kPi * r - er)) /
                         (kPi * sq(dn)) +
                     4.0 * r * sq(1.0 - er2) / (kPi * dn);
                k3 = -8.0 * r * r / (kPi * dn * sq(dn)) *
                     (-256.0 * (er2 + 1.0) * sq(double(n * n)) * kPi +
                      192.0 * (1.0 - er2) * n * n * r +
                      r * r * r * (4.0 * er2 + kPi * r * er2 + kPi * r - 4.0));
            } else {
                k1 = 8.0 * r * (16.0 * m * n - r * r) * (1.0 - er2) / (kPi * dm * dn);
                cplx den = (r - 4.0 * i * m) * (r + 4.0 * i * n);
                k2 = 2.0 * r / (kPi * den) *
                         (2.0 - 2.0 * er + 4.0 * r * (er2 - 1.0) / (r + 4.0 * i * m) +
                          4.0 * r * (er2 - 1.0) / (r - 4.0 * i * n)) +
                     4.0 * r * sq(1.0 - er2) / (kPi * den);
                k3 = 8.0 * r * r * er2 / (kPi * (m - n)) *
                         ((16.0 * n * n * n * kPi + n * r * (4.0 + kPi * r)) / sq(dn) -
                          m * (16.0 * m * m * kPi + r * (4.0 + kPi * r)) / sq(dm)) +
                     32.0 * r * r * r / (kPi * (m - n)) * (m / sq(dm) - n / sq(dn));
            }
            out.k1(mi, ni) = k1;
            out.k2(mi, ni) = k2;
            out.k3(mi, ni) = k3;
        }
    }
    return out;
}

KMatrix k_numeric(const BasisSpec& basis, const PhysicsParams& params, int jobs) {
    basis.validate();
    params.validate();
    const int count = basis.mode_count();
    const double g = params.gamma;
    const double delta = params.delta / g;
    const double s0 = basis.support_begin() * g;
    const double s1 = basis.support_end() * g;

    // fastest oscillation present in any mode drive, in 1/gamma time units
    double nu = std::abs(delta);
    for (int k = 0; k < count; ++k)
        nu = std::max(nu, std::abs(basis.omega(basis.mode_index(k))) / g + std::abs(delta));
    if (basis.kind == BasisKind::HermiteGaussian)
        nu = std::max(nu, (std::sqrt(2.0 * basis.n_max + 1.0) + 2.0) / (basis.T * g) +
                              std::abs(delta));

    std::vector<double> nodes, weights;
    append_panels(s0, s1, std::min(2.0, kPi / std::max(nu, 0.5)), nodes, weights);
    append_panels(s1, s1 + params.horizon_factor, 2.0, nodes, weights);
    const int n_nodes = static_cast<int>(nodes.size());

    // eta'(tau) per mode at the quadrature nodes
    Eigen::MatrixXcd E(count, n_nodes);
    parallel_for(
        count,
        [&](std::size_t k) {
            int n = basis.mode_index(static_cast<int>(k));
            auto rhs = [&](double tau, const std::vector<double>& y, std::vector<double>& dy) {
                cplx drive = std::conj(basis_eval(basis, n, tau / g)) / std::sqrt(g) *
                             std::polar(1.0, -delta * tau);
                cplx P(y[0], y[1]), Q(y[2], y[3]);
                cplx Pd = -0.5 * P + drive;
                cplx Qd = -0.5 * Q - 0.5 * P;
                dy[0] = Pd.real();
                dy[1] = Pd.imag();
                dy[2] = Qd.real();
                dy[3] = Qd.imag();
            };
            HermiteTrajectory<double> traj;
            Dopri5<double> stepper(rhs);
            OdeOptions<double> opts;
            opts.rel_tol = params.rel_tol;
            opts.abs_tol = params.abs_tol;
            std::vector<double> y(4, 0.0);
            OdeStats stats;
            auto sink = [&](const OdeStep<double>& s) { traj.push(s); };
            stepper.integrate(s0, s1, y, opts, &stats, sink);
            stepper.integrate(s1, s1 + params.horizon_factor, y, opts, &stats, sink);
            std::vector<double> yt;
            for (int j = 0; j < n_nodes; ++j) {
                traj.eval(nodes[j], yt);
                cplx P(yt[0], yt[1]), Q(yt[2], yt[3]);
                E(k, j) = -0.5 * Q - 0.5 * P;
            }
        },
        jobs);

    Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(weights.data(), n_nodes);
    Eigen::MatrixXcd K = 16.0 * E * w.asDiagonal() * E.adjoint();
    K = 0.5 * (K + K.adjoint()).eval();

    KMatrix out;
    out.entries = std::move(K);
    out.basis = basis;
    out.gamma = params.gamma;
    out.delta = params.delta;
    out.r = basis.T * g / kPi;
    out.provenance = KProvenance::Numeric;
    return out;
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& k) {
    return 0.5 * (k + k.adjoint());
}

Eigen::MatrixXd symmetric_part(const Eigen::MatrixXd& k) {
    return 0.5 * (k + k.transpose());
}

EigenResult max_eig(const Eigen::MatrixXcd& k, const std::vector<double>& freq_hint) {
    if (k.rows() != k.cols() || k.rows() == 0) throw EigenFailure("max_eig: square matrix required");
    double scale = k.cwiseAbs().maxCoeff();
    if ((k - k.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, 1.0))
        throw EigenFailure("max_eig: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
    if (es.info() != Eigen::Success) throw EigenFailure("max_eig: eigensolver failed");

    const auto& vals = es.eigenvalues();
    const int n = static_cast<int>(vals.size());
    double lmax = vals(n - 1);
    double tie_tol = 1e-10 * std::max(std::abs(lmax), 1.0);

    int chosen = n - 1;
    double best_hint = -std::numeric_limits<double>::infinity();
    for (int i = n - 1; i >= 0 && vals(i) >= lmax - tie_tol; --i) {
        if (freq_hint.empty()) {
            chosen = i;  // lowest column among the ties
        } else {
            Eigen::Index dom;
            es.eigenvectors().col(i).cwiseAbs().maxCoeff(&dom);
            if (freq_hint[dom] > best_hint) {
                best_hint = freq_hint[dom];
                chosen = i;
            }
        }
    }

    Eigen::VectorXcd v = es.eigenvectors().col(chosen);
    Eigen::Index dom;
    v.cwiseAbs().maxCoeff(&dom);
    cplx phase = v(dom) / std::abs(v(dom));
    v /= phase;
    v.normalize();

    EigenResult out;
    out.lambda_max = lmax;
    out.vector = v;
    out.mode_populations.resize(n);
    for (int i = 0; i < n; ++i) out.mode_populations[i] = std::norm(v(i));
    return out;
}

double asymptotic_lambda(double n_tilde, Bc bc) {
    double x2 = n_tilde * n_tilde;
    if (bc == Bc::Closed) return 64.0 * x2 / sq(4.0 * x2 + 1.0);
    return 256.0 * x2 / sq(16.0 * x2 + 1.0);
}

} // namespace qfi
