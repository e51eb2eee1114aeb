#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qfi/ode.hpp"

using namespace qfi;

TEST_CASE("exponential decay matches the analytic solution") {
    auto rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = -0.5 * y[0];
    };
    Dopri5<double> stepper(rhs);
    std::vector<double> y{1.0};
    OdeOptions<double> opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-14;
    OdeStats stats;
    stepper.integrate(0.0, 10.0, y, opts, &stats);
    CHECK(y[0] == doctest::Approx(std::exp(-5.0)).epsilon(1e-9));
    CHECK(stats.steps > 5);
}

TEST_CASE("harmonic oscillator over many periods") {
    auto rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = y[1];
        dy[1] = -4.0 * y[0];
    };
    Dopri5<double> stepper(rhs);
    std::vector<double> y{1.0, 0.0};
    OdeOptions<double> opts;
    opts.rel_tol = 1e-11;
    opts.abs_tol = 1e-13;
    double t1 = 50.0;
    stepper.integrate(0.0, t1, y, opts);
    CHECK(y[0] == doctest::Approx(std::cos(2.0 * t1)).epsilon(1e-7));
    CHECK(y[1] == doctest::Approx(-2.0 * std::sin(2.0 * t1)).epsilon(1e-7));
}

TEST_CASE("tolerance controls the error") {
    auto rhs = [](double t, const std::vector<double>&, std::vector<double>& dy) {
        dy[0] = std::cos(t);
    };
    double errs[2];
    double tols[2] = {1e-6, 1e-10};
    for (int i = 0; i < 2; ++i) {
        Dopri5<double> stepper(rhs);
        std::vector<double> y{0.0};
        OdeOptions<double> opts;
        opts.rel_tol = tols[i];
        opts.abs_tol = tols[i] * 1e-2;
        stepper.integrate(0.0, 20.0, y, opts);
        errs[i] = std::abs(y[0] - std::sin(20.0));
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[1] < 1e-9);
}

TEST_CASE("hermite trajectory reproduces interior values") {
    auto rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = -y[0];
    };
    Dopri5<double> stepper(rhs);
    HermiteTrajectory<double> traj;
    std::vector<double> y{2.0};
    OdeOptions<double> opts;
    opts.rel_tol = 1e-9;
    opts.abs_tol = 1e-12;
    stepper.integrate(0.0, 4.0, y, opts, nullptr,
                      [&](const OdeStep<double>& s) { traj.push(s); });
    std::vector<double> v;
    for (double t : {0.0, 0.7, 1.9, 3.3, 4.0}) {
        traj.eval(t, v);
        CHECK(v[0] == doctest::Approx(2.0 * std::exp(-t)).epsilon(1e-7));
        traj.eval_derivative(t, v);
        CHECK(v[0] == doctest::Approx(-2.0 * std::exp(-t)).epsilon(1e-5));
    }
}

TEST_CASE("long double integration reaches extended accuracy") {
    auto rhs = [](long double, const std::vector<long double>& y, std::vector<long double>& dy) {
        dy[0] = -y[0];
    };
    Dopri5<long double> stepper(rhs);
    std::vector<long double> y{1.0L};
    OdeOptions<long double> opts;
    opts.rel_tol = 1e-15L;
    opts.abs_tol = 1e-18L;
    stepper.integrate(0.0L, 5.0L, y, opts);
    long double exact = std::exp(-5.0L);
    CHECK(static_cast<double>(std::abs(y[0] - exact) / exact) < 1e-13);
}
