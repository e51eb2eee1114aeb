#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qfi/pulse.hpp"
#include "qfi/quadrature.hpp"
#include "qfi/rng.hpp"

using namespace qfi;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("eval of the standard families") {
    auto rect = PulseSpec::rectangular(1.0, 1.0);
    CHECK(eval(rect, 0.5).real() == doctest::Approx(1.0));
    CHECK(eval(rect, 2.0).real() == doctest::Approx(0.0));

    auto dex = PulseSpec::decreasing_exp(1.0, 1.0);
    CHECK(eval(dex, 1.0).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("carrier detuning multiplies by a phase") {
    auto rect = PulseSpec::rectangular(1.0, 1.0, 0.7);
    cplx v = eval(rect, 0.5);
    CHECK(std::abs(v) == doctest::Approx(1.0));
    CHECK(std::arg(v) == doctest::Approx(-0.35));
}

TEST_CASE("norm_sq equals alpha_sq for every family") {
    std::vector<PulseSpec> specs{
        PulseSpec::rectangular(3.0, 2.0),
        PulseSpec::gaussian(1.0, 1.0, 8.0),
        PulseSpec::decreasing_exp(2.0, 0.5),
        PulseSpec::rising_exp(1.5, 1.7),
        PulseSpec::symmetric_exp(0.8, 2.5),
        PulseSpec::sine(5.0, 1.3, 0.25),
    };
    for (const auto& s : specs) {
        CAPTURE(family_name(s.family));
        CHECK(norm_sq(s) == doctest::Approx(s.alpha_sq).epsilon(1e-8));
    }
}

TEST_CASE("norm_sq of an orthonormal expansion obeys Parseval") {
    auto basis = BasisSpec::harmonic(1.0, 2);
    auto p = synthesize(basis, {cplx(1, 0), cplx(1, 0)}, 4.0);
    CHECK(norm_sq(p) == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("boundary suppression of the shifted families") {
    for (const auto& s : {PulseSpec::gaussian(1.0, 1.0), PulseSpec::rising_exp(1.0, 1.0),
                          PulseSpec::symmetric_exp(1.0, 1.0)}) {
        CAPTURE(family_name(s.family));
        double peak = std::sqrt(s.alpha_sq / s.T);
        CHECK(std::norm(eval(s, 0.0)) / (peak * peak) < 1e-12);
    }
}

TEST_CASE("variance of the standard families") {
    CHECK(variance(PulseSpec::rectangular(1.0, 1.0)) ==
          doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-8));
    CHECK(variance(PulseSpec::decreasing_exp(2.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(variance(PulseSpec::gaussian(1.0, 1.0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
    CHECK(variance(PulseSpec::symmetric_exp(1.0, 1.0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-7));

    // harmonic mode n = 1: sigma^2 = T^2/12 (1 - 6/pi^2)
    auto basis = BasisSpec::harmonic(1.0, 1);
    auto mode1 = synthesize(basis, {cplx(1, 0)}, 1.0);
    CHECK(variance(mode1) == doctest::Approx(0.1807560277).epsilon(1e-8));
}

TEST_CASE("harmonic mode variance is bounded by the rectangular value") {
    for (int n = 1; n <= 12; ++n) {
        auto basis = BasisSpec::harmonic(1.0, n);
        std::vector<cplx> c(n, 0.0);
        c[n - 1] = 1.0;
        auto mode = synthesize(basis, c, 1.0);
        CHECK(variance(mode) <= 1.0 / std::sqrt(12.0) + 1e-12);
    }
}

TEST_CASE("area of the standard families") {
    CHECK(area(PulseSpec::rectangular(4.0, 1.0)).real() == doctest::Approx(2.0).epsilon(1e-9));
    // decreasing exponential: A = 2 alpha sqrt(T)
    CHECK(area(PulseSpec::decreasing_exp(2.0, 1.0)).real() ==
          doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-7));
    CHECK(std::abs(area(PulseSpec::zero())) == doctest::Approx(0.0));
}

TEST_CASE("basis_eval values and boundary conditions") {
    auto h = BasisSpec::harmonic(1.0, 4);
    CHECK(basis_eval(h, 1, 0.5).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(basis_eval(h, 3, 0.0).real() == doctest::Approx(0.0));
    CHECK(basis_eval(h, 3, 1.0).real() == doctest::Approx(0.0).epsilon(1e-12));

    auto pw = BasisSpec::plane_wave(1.0, -2, 2);
    CHECK(basis_eval(pw, 0, 0.3).real() == doctest::Approx(1.0));
    CHECK(std::abs(basis_eval(pw, 2, 0.0) - basis_eval(pw, 2, 1.0)) < 1e-12);

    CHECK_THROWS_AS(basis_eval(h, 5, 0.5), IndexOutOfRange);
    CHECK_THROWS_AS(basis_eval(h, 0, 0.5), IndexOutOfRange);
}

TEST_CASE("orthonormality gram matrix is the identity") {
    auto check_gram = [](const BasisSpec& b) {
        int m = b.mode_count();
        for (int i = 0; i < m; ++i) {
            for (int j = i; j < m; ++j) {
                int ni = b.mode_index(i), nj = b.mode_index(j);
                auto re = [&](double t) {
                    return (basis_eval(b, ni, t) * std::conj(basis_eval(b, nj, t))).real();
                };
                auto im = [&](double t) {
                    return (basis_eval(b, ni, t) * std::conj(basis_eval(b, nj, t))).imag();
                };
                QuadTol tol{1e-13, 1e-11};
                double gr = integrate_segment(re, b.support_begin(), b.support_end(), tol);
                double gi = integrate_segment(im, b.support_begin(), b.support_end(), tol);
                double expect = i == j ? 1.0 : 0.0;
                CHECK(std::abs(gr - expect) < 1e-10);
                CHECK(std::abs(gi) < 1e-10);
            }
        }
    };
    check_gram(BasisSpec::harmonic(2.0, 6));
    check_gram(BasisSpec::plane_wave(2.0, -3, 3));
    check_gram(BasisSpec::hermite_gaussian(1.0, -1.0, 5));
}

TEST_CASE("synthesize rescales to the photon number") {
    auto basis = BasisSpec::harmonic(1.0, 2);
    auto p = synthesize(basis, {cplx(3, 0), cplx(4, 0)}, 1.0);
    CHECK(p.coeffs[0].real() == doctest::Approx(0.6));
    CHECK(p.coeffs[1].real() == doctest::Approx(0.8));
    CHECK_THROWS_AS(synthesize(basis, {cplx(0, 0), cplx(0, 0)}, 1.0), ZeroVector);
}

TEST_CASE("synthesized single mode matches the basis function") {
    auto basis = BasisSpec::harmonic(2.0, 3);
    std::vector<cplx> c{0.0, 0.0, cplx(1.0, 0.0)};
    auto p = synthesize(basis, c, 4.0);
    for (double t : {0.1, 0.9, 1.7})
        CHECK(eval(p, t).real() ==
              doctest::Approx(2.0 * basis_eval(basis, 3, t).real()).epsilon(1e-12));
}

TEST_CASE("expansion evaluator matches direct mode sums") {
    Rng rng(11);
    auto basis = BasisSpec::plane_wave(3.0, -4, 4);
    std::vector<cplx> c;
    for (int i = 0; i < basis.mode_count(); ++i) c.emplace_back(rng.normal(), rng.normal());
    auto p = synthesize(basis, c, 2.0, 0.3);
    for (double t : {0.05, 0.77, 1.33, 2.9}) {
        cplx direct = 0.0;
        for (int i = 0; i < basis.mode_count(); ++i)
            direct += p.coeffs[i] * basis_eval(basis, basis.mode_index(i), t);
        direct *= std::polar(1.0, -p.carrier_detuning * t);
        cplx fast = eval(p, t);
        CHECK(std::abs(fast - direct) < 1e-12 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("scale covariance under alpha scaling") {
    Rng rng(5);
    auto basis = BasisSpec::harmonic(1.0, 5);
    std::vector<cplx> c;
    for (int i = 0; i < 5; ++i) c.emplace_back(rng.normal(), 0.0);
    auto p = synthesize(basis, c, 1.0);
    auto p9 = p.with_alpha_sq(9.0);
    for (double t : {0.2, 0.5, 0.8})
        CHECK(eval(p9, t).real() == doctest::Approx(3.0 * eval(p, t).real()).epsilon(1e-14));
    CHECK(norm_sq(p9) == doctest::Approx(9.0).epsilon(1e-8));
}

TEST_CASE("sine family reduces to a harmonic at commensurate frequency") {
    // omega = 2 pi / T is the n = 2 harmonic
    double T = 5.0;
    auto s = PulseSpec::sine(T, 2.0 * kPi / T, 1.0);
    auto basis = BasisSpec::harmonic(T, 2);
    auto h = synthesize(basis, {cplx(0, 0), cplx(1, 0)}, 1.0);
    for (double t : {0.3, 1.9, 4.4})
        CHECK(eval(s, t).real() == doctest::Approx(eval(h, t).real()).epsilon(1e-10));
}
