#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"

#include "bosegas/errors.hpp"
#include "bosegas/limits.hpp"

using namespace bosegas;

TEST_CASE("classical partition function") {
    auto one = TorusGeometry::lattice(1, 1);
    auto r = classical_xi(1.0, 1.0, 1.0, one, TwoBodyPotential::delta(one), 8);
    CHECK(r.value == doctest::Approx(1.676064).epsilon(1e-6));
    auto g = TorusGeometry::lattice(1, 2);
    auto free = classical_xi(0.3, 1.0, 2.0, g, TwoBodyPotential::zero(g), 6);
    double x = 0.3 * 2 * 2, partial = 0.0, t = 1.0;
    for (int n = 0; n <= 6; ++n) {
        if (n) t *= x / n;
        partial += t;
    }
    CHECK(free.value == doctest::Approx(partial).epsilon(1e-13));
    auto hard = classical_xi(0.2, 60.0, 1.0, g, TwoBodyPotential::delta(g), 4);
    CHECK(hard.value == doctest::Approx(1.0 + 0.4 * std::exp(-30.0)).epsilon(1e-12));
    CHECK_THROWS_AS(classical_xi(0.2, 1.0, 1.0, g, TwoBodyPotential::delta(g), 9), CapacityError);
}

TEST_CASE("classical partition function on the circle") {
    auto c = TorusGeometry::circle(4.0);
    auto free = classical_xi(0.25, 0.5, 1.0, c, TwoBodyPotential::zero(c), 6);
    double x = 1.0, partial = 0.0, t = 1.0;
    for (int n = 0; n <= 6; ++n) {
        if (n) t *= x / n;
        partial += t;
    }
    CHECK(free.value == doctest::Approx(partial).epsilon(1e-12));
    CHECK(free.tail == doctest::Approx(std::exp(1.0) - partial).epsilon(1e-10));
    auto v = TwoBodyPotential::gaussian(c, 1.0, 0.5);
    auto r = classical_xi(0.2, 0.5, 1.0, c, v, 2);
    // n = 2 term: (z^2/2) L int_0^L e^{-lambda0 (v(0) + v(s))} ds
    double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double s) { return std::exp(-0.5 * (v.on_circle(0.0) + v.on_circle(s))); }, 0.0, 4.0, 15, 1e-14);
    CHECK(r.terms[2] == doctest::Approx(0.02 * 4.0 * I).epsilon(1e-8));
    CHECK(r.terms[1] == doctest::Approx(0.2 * 4.0 * std::exp(-0.25 * v.on_circle(0.0))).epsilon(1e-13));
    auto r3 = classical_xi(0.2, 0.5, 1.0, c, v, 4);
    CHECK(r3.terms[2] == doctest::Approx(r.terms[2]).epsilon(1e-8));
    CHECK(r3.terms[4] > 0.0);
}

TEST_CASE("activity schedule") {
    CHECK(activity_to_kappa(1.0, 1.0, 1) == 0.0);
    CHECK(activity_to_kappa(0.5, 0.25, 1) == doctest::Approx(4.0 * std::log(4.0)).epsilon(1e-14));
    for (double nu : {0.4, 0.05, 0.003})
        for (int d : {1, 2, 3}) {
            double k = activity_to_kappa(0.7, nu, d);
            CHECK(std::exp(-k * nu) * std::pow(nu, -0.5 * d) == doctest::Approx(0.7).epsilon(1e-14));
        }
    CHECK_THROWS_AS(activity_to_kappa(0.0, 1.0, 1), DomainError);
}

TEST_CASE("saddle point") {
    auto g = TorusGeometry::lattice(1, 2);
    auto v = TwoBodyPotential::delta(g);
    ModelParams p;
    p.nu = 1.0;
    p.kappa0 = 1.0;
    p.N = 4.0;
    p.coupling = CouplingMode::meanfield;
    auto zero = saddle_point(p, g, v);
    CHECK(zero.s == 0.0);
    CHECK(zero.kappa_ren == 1.0);
    p.lambda0 = 0.8;
    p.rho_mode = RhoMode::wick;
    auto w = saddle_point(p, g, v);
    CHECK(std::abs(w.s) < 1e-12);
    p.rho_mode = RhoMode::explicit_value;
    double wick = p.nu * ideal_occupation(g, p.nu, p.kappa0);
    double prev = 1e300;
    for (double rho : {0.0, 0.2, wick + 0.1, wick + 0.5, 2.0}) {
        p.rho_value = rho;
        auto s = saddle_point(p, g, v);
        CHECK(s.residual < 1e-10);
        CHECK(s.kappa_ren > 0.0);
        CHECK(s.s < prev);
        if (rho > wick) CHECK(s.s < 0.0);
        prev = s.s;
    }
}

TEST_CASE("ideal limits are exact") {
    auto one = TorusGeometry::lattice(1, 1);
    MeanfieldSweepConfig c;
    c.lambda0 = 0.0;
    auto m = meanfield_sweep(c, one, TwoBodyPotential::delta(one), 256, 1);
    for (const auto& pt : m.sweep.points) {
        double nu = pt.parameter;
        CHECK(pt.estimate.value.real() == doctest::Approx(nu * std::exp(-nu) / (1 - std::exp(-nu))).epsilon(1e-12));
        CHECK(pt.discrepancy_err == 0.0);
    }
    CHECK(m.sweep.points.back().estimate.value.real() == doctest::Approx(0.938802).epsilon(1e-6));
    CHECK(m.sweep.decreasing);

    auto g = TorusGeometry::lattice(1, 2);
    ModelParams p;
    p.nu = 1.0;
    p.kappa0 = 1.0;
    p.rho_value = 0.3;
    LargeNConfig lc;
    auto l = largeN_check(p, g, TimeGrid(1.0, 4), TwoBodyPotential::delta(g), lc, 256, 2);
    for (const auto& pt : l.sweep.points) CHECK(std::abs(pt.discrepancy) < 1e-12);
}

TEST_CASE("meanfield sweep on one site") {
    auto one = TorusGeometry::lattice(1, 1);
    MeanfieldSweepConfig c;
    c.eps = 1.0 / 8.0;
    auto m = meanfield_sweep(c, one, TwoBodyPotential::delta(one), 4000, 3);
    CHECK(m.field_lambda0 == 1.0);
    CHECK(m.field_check < 1e-8);
    CHECK(m.sweep.points.size() == 3);
    CHECK(m.sweep.points[0].reference == doctest::Approx(0.8327056412987).epsilon(1e-9));
}

TEST_CASE("sweep verdicts") {
    std::vector<SweepPoint> pts(3);
    pts[0].discrepancy = 0.3;
    pts[1].discrepancy = -0.2;
    pts[2].discrepancy = 0.05;
    for (auto& p : pts) p.discrepancy_err = 0.01;
    CHECK(decreasing_beyond_errors(pts));
    pts[2].discrepancy = 0.19;
    CHECK_FALSE(decreasing_beyond_errors(pts));
}
