#include <cmath>

#include "doctest.h"

#include "bosegas/errors.hpp"
#include "bosegas/loopgas.hpp"
#include "bosegas/meanfield.hpp"

using namespace bosegas;

namespace {

FieldParams field(double kappa0, double lambda0, double N = 1.0, double rho = 0.0) {
    FieldParams f;
    f.kappa0 = kappa0;
    f.lambda0 = lambda0;
    f.N = N;
    f.rho = rho;
    return f;
}

}  // namespace

TEST_CASE("wick constant") {
    CHECK(wick_constant(TorusGeometry::lattice(1, 1), 1.0) == doctest::Approx(1.0));
    CHECK(wick_constant(TorusGeometry::lattice(1, 2), 1.0) == doctest::Approx(0.5 * (1.0 + 1.0 / 3.0)));
    CHECK(wick_constant(TorusGeometry::lattice(2, 3), 1e8) < 1e-7);
    CHECK_THROWS_AS(wick_constant(TorusGeometry::lattice(1, 1), 0.0), DomainError);
}

TEST_CASE("field action") {
    auto one = TorusGeometry::lattice(1, 1);
    auto v1 = TwoBodyPotential::delta(one);
    Eigen::MatrixXcd phi(1, 1);
    phi(0, 0) = 1.0;
    CHECK(field_action(phi, field(1.0, 0.0), one, v1) == doctest::Approx(1.0));
    // rho = -N c cancels the constant
    phi.setZero();
    CHECK(field_action(phi, field(1.0, 0.7, 1.0, -1.0), one, v1) == doctest::Approx(0.0));
    CHECK(field_action(phi, field(1.0, 0.7, 1.0, 0.0), one, v1) == doctest::Approx(0.7 / 4));

    auto g = TorusGeometry::lattice(1, 3);
    auto v = TwoBodyPotential::gaussian(g, 1.0, 1.0);
    Rng rng(4);
    std::normal_distribution<double> n01(0.0, 1.0);
    Eigen::MatrixXcd psi(3, 2);
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 2; ++a) psi(i, a) = cplx(n01(rng), n01(rng));
    Eigen::MatrixXcd Z(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) Z(i, j) = cplx(n01(rng), n01(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Z);
    Eigen::MatrixXcd U = qr.householderQ();
    auto f = field(0.8, 0.9, 2.0, 0.1);
    CHECK(field_action(psi * U, f, g, v) == doctest::Approx(field_action(psi, f, g, v)).epsilon(1e-12));
    // kinetic part equals <phi, (-Delta/2 + kappa0) phi>
    Eigen::MatrixXd h = -0.5 * laplacian_matrix(g);
    h.diagonal().array() += 0.8;
    double quad = (psi.adjoint() * h * psi).trace().real();
    CHECK(field_action(psi, field(0.8, 0.0, 2.0), g, v) == doctest::Approx(quad).epsilon(1e-12));
}

TEST_CASE("single-site quadratures agree") {
    auto a = single_site_field(field(1.0, 0.5), 1.0);
    CHECK(a.z_rel == doctest::Approx(0.9104114060641).epsilon(1e-10));
    CHECK(a.phi2 == doctest::Approx(0.8773543332451).epsilon(1e-10));
    auto b = single_site_field_eta(field(1.0, 0.5), 1.0);
    CHECK(std::abs(a.phi2 - b.phi2) < 1e-9);
    CHECK(std::abs(a.z_rel - b.z_rel) < 1e-9);
    auto c = single_site_field(field(1.0, 1.0, 2.0, 0.2), 1.0);
    CHECK(c.z_rel == doctest::Approx(0.7835059306992).epsilon(1e-10));
    CHECK(c.phi2 == doctest::Approx(0.9294194308513).epsilon(1e-10));
    auto d = single_site_field_eta(field(1.0, 1.0, 2.0, 0.2), 1.0);
    CHECK(std::abs(c.phi2 - d.phi2) < 1e-9);
    auto free = single_site_field(field(2.0, 0.0, 3.0), 1.0);
    CHECK(free.z_rel == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(free.phi2 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("metropolis field sampler") {
    auto one = TorusGeometry::lattice(1, 1);
    auto v = TwoBodyPotential::delta(one);
    auto free = sample_gibbs_field(field(1.0, 0.0), one, v, 40000, 1);
    CHECK(std::abs(free.two_point.value.real() - 1.0) < 3 * free.two_point.stderr_re);
    CHECK(std::abs(free.mean_phi.value.real()) < 4 * free.mean_phi.stderr_re);
    CHECK_FALSE(free.tuning_failed);
    CHECK(free.acceptance > 0.3);
    CHECK(free.acceptance < 0.6);
    auto inter = sample_gibbs_field(field(1.0, 0.5), one, v, 40000, 2);
    CHECK(std::abs(inter.two_point.value.real() - 0.8773543332451) < 3 * inter.two_point.stderr_re);
    auto two = sample_gibbs_field(field(1.0, 0.5, 2.0), one, v, 20000, 3);
    CHECK(std::abs(two.off_species.value.real()) < 4 * two.off_species.stderr_re);
    CHECK(two.tau_int >= 0.5);

    auto g = TorusGeometry::lattice(1, 2);
    auto m = sample_gibbs_field(field(1.0, 0.0), g, TwoBodyPotential::delta(g), 40000, 4, 0, 1);
    // free covariance (-Delta/2 + 1)^{-1}, off-diagonal (1 - 1/3)/2
    CHECK(std::abs(m.two_point.value.real() - 1.0 / 3.0) < 3.5 * m.two_point.stderr_re);
}

TEST_CASE("action functional") {
    auto one = TorusGeometry::lattice(1, 1);
    auto f = field(1.0, 0.5);
    Eigen::VectorXd eta(1);
    eta << 0.0;
    CHECK(std::abs(action_S_eta(eta, f, one).value) < 1e-15);
    for (double h : {0.3, -1.2, 4.0}) {
        eta << h;
        auto s = action_S_eta(eta, f, one);
        cplx closed = std::log(cplx(1.0, -h)) + cplx(0.0, h);
        CHECK(std::abs(s.value - closed) < 1e-9);
        CHECK(s.value.real() >= 0.0);
        CHECK_FALSE(s.precision_flag);
        CHECK(std::abs(action_S_closed(eta, f, one) - closed) < 1e-13);
    }
    auto g = TorusGeometry::lattice(1, 3);
    auto f3 = field(0.7, 0.5);
    Rng rng(8);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int i = 0; i < 5; ++i) {
        Eigen::VectorXd e(3);
        for (int k = 0; k < 3; ++k) e(k) = 2.0 * n01(rng);
        CHECK(std::abs(action_S_eta(e, f3, g).value - action_S_closed(e, f3, g)) < 1e-8);
    }
    // quadratic term: S(s eta)/s^2 -> tr(R eta R eta)/2
    Eigen::VectorXd e(3);
    e << 0.4, -1.0, 0.7;
    Eigen::MatrixXd h = -0.5 * laplacian_matrix(g);
    h.diagonal().array() += 0.7;
    Eigen::MatrixXd R = h.inverse();
    Eigen::MatrixXd RE = R * e.asDiagonal();
    double q = 0.5 * (RE * RE).trace();
    double r1 = action_S_eta(1e-2 * e, f3, g).value.real() / 1e-4 - q;
    double r2 = action_S_eta(5e-3 * e, f3, g).value.real() / 2.5e-5 - q;
    CHECK(std::abs(r1) < 1e-3);
    CHECK(std::abs(r2) < std::abs(r1));
}

TEST_CASE("eta representation of the field partition function") {
    auto one = TorusGeometry::lattice(1, 1);
    auto v = TwoBodyPotential::delta(one);
    auto zero = z_via_eta(field(1.0, 0.0), one, v, 0, 1);
    CHECK(zero.z.value == cplx(1.0, 0.0));
    CHECK(zero.z.stderr_re == 0.0);
    auto z = z_via_eta(field(1.0, 0.5), one, v, 20000, 2);
    CHECK(std::abs(z.z.value.real() - 0.9104114060641) < 3 * z.z.stderr_re);
    CHECK(std::abs(z.z.value.imag()) < 4 * z.z.stderr_im + 1e-12);
    CHECK(z.positivity_violations == 0);
    CHECK(z.modulus_violations == 0);
    auto g = TorusGeometry::lattice(1, 3);
    auto zz = z_via_eta(field(1.0, 0.5, 2.0, 0.1), g, TwoBodyPotential::gaussian(g, 1.0, 1.0), 2000, 3);
    CHECK(zz.positivity_violations == 0);
    CHECK(zz.modulus_violations == 0);
}

TEST_CASE("symanzik series against the field side") {
    auto one = TorusGeometry::lattice(1, 1);
    auto v = TwoBodyPotential::delta(one);
    FieldParams f = field(1.0, 0.5);
    // delta-regularised exact value at delta = 0.1 and the delta -> 0 limit
    auto sym = symanzik_params(f, one, v, 0.1, 14);
    auto r = symanzik_series(f, one, v, sym, 4000, 5);
    CHECK(std::abs(r.z.value.real() - 0.9108638640957) < 3 * r.z.stderr_re + 1e-5);
    auto sym2 = symanzik_params(f, one, v, 0.01, 22);
    auto r2 = symanzik_series(f, one, v, sym2, 2000, 6);
    auto z = z_via_eta(f, one, v, 20000, 7);
    CHECK(std::abs(r2.z.value.real() - z.z.value.real()) < 3 * std::hypot(r2.z.stderr_re, z.z.stderr_re) + 1e-5);
}
