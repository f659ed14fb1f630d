#include <cmath>
#include <random>

#include "doctest.h"

#include "bosegas/errors.hpp"
#include "bosegas/lattice.hpp"

using namespace bosegas;

namespace {

std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

SigmaField random_sigma(int sites, int slices, std::uint64_t seed, double scale = 3.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, scale);
    SigmaField s(sites, slices);
    for (int j = 0; j < slices; ++j)
        for (int x = 0; x < sites; ++x) s(x, j) = g(rng);
    return s;
}

double opnorm(const Eigen::MatrixXcd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues()(0);
}

}  // namespace

TEST_CASE("site arithmetic wraps in every coordinate") {
    auto g = TorusGeometry::lattice(3, 3);
    CHECK(g.sites() == 27);
    for (int x = 0; x < g.sites(); ++x) {
        CHECK(g.index(g.coords(x)) == x);
        CHECK(g.add(g.diff(x, 5), 5) == x);
        for (int a = 0; a < 3; ++a) CHECK(g.shift(g.shift(x, a, 1), a, -1) == x);
    }
    CHECK(g.index({3, -1, 4}) == g.index({0, 2, 1}));
}

TEST_CASE("laplacian spectrum values") {
    CHECK(laplacian_eigenvalues(TorusGeometry::lattice(1, 1)) == std::vector<double>{0.0});
    auto e2 = laplacian_eigenvalues(TorusGeometry::lattice(1, 2));
    REQUIRE(e2.size() == 2);
    CHECK(e2[0] == 0.0);
    CHECK(e2[1] == doctest::Approx(-4.0).epsilon(1e-14));
    auto e4 = laplacian_eigenvalues(TorusGeometry::lattice(1, 4));
    CHECK(e4[0] == 0.0);
    CHECK(e4[1] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(e4[2] == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK(e4[3] == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("cosine formula agrees with a dense eigensolver and has one zero mode") {
    for (auto g : {TorusGeometry::lattice(1, 5), TorusGeometry::lattice(2, 3), TorusGeometry::lattice(3, 2),
                   TorusGeometry::lattice(2, 4)}) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian_matrix(g));
        auto dense = es.eigenvalues();
        auto formula = sorted(laplacian_eigenvalues(g));
        for (int i = 0; i < g.sites(); ++i) CHECK(dense(i) == doctest::Approx(formula[i]).epsilon(1e-12));
        int zeros = 0;
        for (double l : formula) {
            CHECK(l <= 0.0);
            zeros += l == 0.0;
        }
        CHECK(zeros == 1);
        Eigen::MatrixXcd U = plane_waves(g);
        CHECK((U.adjoint() * U - Eigen::MatrixXcd::Identity(g.sites(), g.sites())).norm() < 1e-12);
    }
}

TEST_CASE("circle mode rejects spectral queries") {
    auto c = TorusGeometry::circle(4.0);
    CHECK_THROWS_AS(laplacian_spectrum(c), UnsupportedModeError);
    CHECK_THROWS_AS(free_green(c, 1.0, 1.0), UnsupportedModeError);
}

TEST_CASE("heat propagator values and semigroup") {
    auto g = TorusGeometry::lattice(1, 2);
    auto P0 = heat_propagator(g, 0.0);
    CHECK((P0 - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
    auto P1 = heat_propagator(g, 1.0);
    CHECK(P1(0, 0) == doctest::Approx(0.567668).epsilon(1e-6));
    CHECK(P1(0, 1) == doctest::Approx(0.432332).epsilon(1e-6));
    CHECK(P1(0, 0) == doctest::Approx((1 + std::exp(-2.0)) / 2).epsilon(1e-14));
    CHECK_THROWS_AS(heat_propagator(g, -0.1), DomainError);

    for (auto h : {TorusGeometry::lattice(1, 5), TorusGeometry::lattice(2, 3), TorusGeometry::lattice(3, 2)}) {
        auto A = heat_propagator(h, 0.7), B = heat_propagator(h, 1.9), C = heat_propagator(h, 2.6);
        CHECK((A * B - C).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(A.minCoeff() >= 0.0);
        CHECK((A.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK((A.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
        CHECK((A - A.transpose()).norm() < 1e-14);
        // generator check against the dense Laplacian
        double t = 1e-4;
        Eigen::MatrixXd Pt = heat_propagator(h, t);
        Eigen::MatrixXd approx = Eigen::MatrixXd::Identity(h.sites(), h.sites()) + 0.5 * t * laplacian_matrix(h);
        CHECK((Pt - approx).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("circle heat density") {
    auto c = TorusGeometry::circle(1000.0);
    CHECK(heat_density(c, 1.0, 3.0, 3.0) == doctest::Approx(0.398942).epsilon(1e-6));
    auto s = TorusGeometry::circle(2.0);
    // normalised on the circle
    double sum = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) sum += heat_density(s, 0.8, 0.3, 2.0 * i / n) * 2.0 / n;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(heat_density(s, -1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("potential validation") {
    auto g = TorusGeometry::lattice(1, 4);
    auto z = TwoBodyPotential::zero(g);
    CHECK(validate_potential(g, z).ok);
    auto d = TwoBodyPotential::delta(g);
    auto r = validate_potential(g, d);
    CHECK(r.ok);
    for (double f : d.fourier) CHECK(f == doctest::Approx(0.25).epsilon(1e-14));
    std::vector<double> cosv(4);
    for (int x = 0; x < 4; ++x) cosv[static_cast<std::size_t>(x)] = -std::cos(2 * M_PI * x / 4);
    auto bad = validate_potential(g, TwoBodyPotential::from_values(g, cosv));
    CHECK_FALSE(bad.ok);
    CHECK(bad.offending_modes == std::vector<int>{1, 3});
    CHECK(bad.min_fourier == doctest::Approx(-0.5).epsilon(1e-12));
    auto odd = validate_potential(g, TwoBodyPotential::from_values(g, {1.0, 0.5, 0.0, 0.1}));
    CHECK_FALSE(odd.ok);
    CHECK(odd.evenness_residual == doctest::Approx(0.4));
    CHECK(validate_potential(g, TwoBodyPotential::gaussian(g, 1.0, 0.8)).ok);
    auto c = TorusGeometry::circle(4.0);
    auto cg = TwoBodyPotential::gaussian(c, 1.0, 0.5);
    CHECK(validate_potential(c, cg).ok);
    CHECK(cg.total() == doctest::Approx(0.5 * std::sqrt(2 * M_PI)).epsilon(1e-12));
}

TEST_CASE("time grid and model parameters") {
    TimeGrid grid(1.0, 32);
    CHECK(grid.eps * grid.n_tau == 1.0);
    CHECK(grid.boundary_index(0.25) == 8);
    CHECK(grid.boundary_index(0.26) == -1);
    ModelParams p;
    p.nu = 0.5;
    p.lambda0 = 2.0;
    p.N = 3.0;
    CHECK(p.lambda() == 2.0);
    p.coupling = CouplingMode::meanfield;
    CHECK(p.lambda() == doctest::Approx(2.0 * 0.25 / 4.0));
    auto g = TorusGeometry::lattice(1, 2);
    auto v = TwoBodyPotential::delta(g, 1.5);
    p.rho_value = 0.2;
    CHECK(kappa_rho(p, g, v) == doctest::Approx(p.kappa0 - p.lambda() * 3.0 * 0.2 * 1.5 / 0.25));
}

TEST_CASE("monodromy limits") {
    auto g = TorusGeometry::lattice(1, 3);
    TimeGrid grid(1.3, 10);
    SigmaField zero = SigmaField::Zero(3, 10);
    auto G0 = monodromy(g, grid, zero);
    CHECK((G0 - heat_propagator(g, 1.3).cast<cplx>()).cwiseAbs().maxCoeff() < 1e-13);

    auto one = TorusGeometry::lattice(1, 1);
    SigmaField s = SigmaField::Constant(1, 10, 0.8);
    auto G1 = monodromy(one, grid, s);
    CHECK(std::abs(G1(0, 0) - std::polar(1.0, -0.8 * 1.3)) < 1e-14);

    CHECK_THROWS_AS(monodromy(g, grid, SigmaField::Zero(3, 9)), ShapeError);
}

TEST_CASE("monodromy contraction and second-order splitting") {
    auto g = TorusGeometry::lattice(1, 2);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        TimeGrid grid(1.0, 16);
        auto s = random_sigma(2, 16, seed);
        CHECK(opnorm(monodromy(g, grid, s)) <= 1.0 + 1e-12);
    }
    // a smooth sigma(tau) sampled at two resolutions
    auto smooth = [](int n) {
        SigmaField s(2, n);
        for (int j = 0; j < n; ++j) {
            double t = (j + 0.5) / n;
            s(0, j) = 2.0 * std::sin(2 * M_PI * t);
            s(1, j) = 1.0 + std::cos(2 * M_PI * t);
        }
        return s;
    };
    auto exact = monodromy(g, TimeGrid(1.0, 1024), smooth(1024));
    double e1 = (monodromy(g, TimeGrid(1.0, 16), smooth(16)) - exact).cwiseAbs().maxCoeff();
    double e2 = (monodromy(g, TimeGrid(1.0, 32), smooth(32)) - exact).cwiseAbs().maxCoeff();
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("group property over concatenated periods") {
    auto g = TorusGeometry::lattice(1, 3);
    TimeGrid one(1.0, 8), three(3.0, 24);
    auto s = random_sigma(3, 8, 7);
    SigmaField s3(3, 24);
    for (int l = 0; l < 3; ++l) s3.middleCols(8 * l, 8) = s;
    auto G = monodromy(g, one, s);
    CHECK((monodromy(g, three, s3) - G * G * G).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("free green function") {
    auto one = TorusGeometry::lattice(1, 1);
    CHECK(free_green(one, 1.0, 1.0)(0, 0) == doctest::Approx(0.581977).epsilon(1e-6));
    CHECK(free_green(one, 1.0, 60.0)(0, 0) < 1e-25);
    CHECK_THROWS_AS(free_green(one, 1.0, 0.0), DomainError);

    auto g = TorusGeometry::lattice(1, 2);
    auto G = free_green(g, 1.0, 1.0);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(2, 2);
    for (int l = 1; l <= 50; ++l) sum += std::exp(-double(l)) * heat_propagator(g, double(l));
    CHECK((G - sum).cwiseAbs().maxCoeff() < 1e-12);

    for (auto h : {TorusGeometry::lattice(1, 4), TorusGeometry::lattice(2, 3)}) {
        auto F = free_green(h, 0.7, 0.4);
        CHECK((F - F.transpose()).norm() < 1e-14);
        CHECK(F.minCoeff() > 0.0);
        double occ = 0.0;
        for (double lam : laplacian_eigenvalues(h)) occ += 1.0 / (std::exp(0.7 * (-0.5 * lam + 0.4)) - 1.0);
        occ /= h.sites();
        for (int x = 0; x < h.sites(); ++x) CHECK(F(x, x) == doctest::Approx(occ).epsilon(1e-12));
        CHECK(ideal_occupation(h, 0.7, 0.4) == doctest::Approx(occ).epsilon(1e-13));
        double dk = 1e-6;
        double fd = (ideal_occupation(h, 0.7, 0.4 + dk) - ideal_occupation(h, 0.7, 0.4 - dk)) / (2 * dk);
        CHECK(ideal_occupation_derivative(h, 0.7, 0.4) == doctest::Approx(fd).epsilon(1e-6));
    }
}
