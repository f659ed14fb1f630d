#include <cmath>

#include <boost/math/special_functions/expint.hpp>

#include "doctest.h"

#include "bosegas/errors.hpp"
#include "bosegas/fock.hpp"
#include "bosegas/loopgas.hpp"

using namespace bosegas;

namespace {

ModelParams params(double lambda0, double N = 1.0, double nu = 1.0, double kappa0 = 1.0) {
    ModelParams p;
    p.nu = nu;
    p.kappa0 = kappa0;
    p.lambda0 = lambda0;
    p.N = N;
    return p;
}

}  // namespace

TEST_CASE("bridge endpoints and trivial cases") {
    auto g = TorusGeometry::lattice(1, 4);
    TimeGrid grid(1.0, 8);
    auto b = sample_bridge(g, 1, 3, grid.eps, grid, 1);
    CHECK(b.sites.size() == 2);
    CHECK(b.sites.front() == 1);
    CHECK(b.sites.back() == 3);
    auto one = TorusGeometry::lattice(1, 1);
    auto c = sample_bridge(one, 0, 0, 1.0, grid, 2);
    for (int s : c.sites) CHECK(s == 0);
    CHECK_THROWS_AS(sample_bridge(g, 0, 1, 0.3, grid, 1), DomainError);
    auto circ = TorusGeometry::circle(4.0);
    auto d = sample_bridge(circ, 0.5, 3.5, 0.37, grid, 3);
    CHECK(d.coords.front() == doctest::Approx(0.5));
    CHECK(d.coords.back() == doctest::Approx(3.5));
    for (double x : d.coords) CHECK((x >= 0.0 && x < 4.0));
}

TEST_CASE("lattice bridge mid-time marginal") {
    for (int m : {2, 4}) {
        auto g = TorusGeometry::lattice(1, m);
        TimeGrid grid(1.0, 4);
        int x = 0, y = m / 2;
        double T = 1.0;
        auto row = heat_kernel_row(g, 0.5 * T);
        double pT = heat_kernel_row(g, T)[static_cast<std::size_t>(g.diff(y, x))];
        std::vector<int> counts(static_cast<std::size_t>(m), 0);
        const int n = 10000;
        Rng rng(7);
        HeatKernelTable table(g, grid.eps, 4);
        std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
        for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(sample_lattice_bridge(g, table, x, y, times, rng)[2])]++;
        for (int z = 0; z < m; ++z) {
            double p = row[static_cast<std::size_t>(g.diff(z, x))] * row[static_cast<std::size_t>(g.diff(y, z))] / pT;
            double se = std::sqrt(p * (1 - p) / n);
            CHECK(std::abs(counts[static_cast<std::size_t>(z)] / double(n) - p) < 5 * se + 1e-12);
        }
    }
}

TEST_CASE("circle bridge mid-point statistics") {
    // short bridge, no winding: midpoint ~ N(x + dx/2, T/4)
    Rng rng(3);
    double L = 10.0, T = 0.2;
    std::vector<double> times{0.0, 0.1, 0.2};
    RunningStats s;
    for (int i = 0; i < 20000; ++i) s.add(sample_circle_bridge(L, 4.0, 5.0, times, rng)[1]);
    CHECK(std::abs(s.mean - 4.5) < 5 * s.stderr_mean());
    CHECK(s.variance() == doctest::Approx(0.05).epsilon(0.05));
}

TEST_CASE("two-loop interaction") {
    auto one = TorusGeometry::lattice(1, 1);
    TimeGrid grid(0.8, 4);
    auto v = TwoBodyPotential::delta(one);
    LoopActivity act(one, grid, 1.0, 3);
    Rng rng(1);
    for (int l = 1; l <= 3; ++l)
        for (int lp = 1; lp <= 3; ++lp) {
            auto a = make_loop(one, act.table(), grid, l, 0, rng);
            auto b = make_loop(one, act.table(), grid, lp, 0, rng);
            CHECK(loop_interaction_Vnu(a, b, v, one, grid) == doctest::Approx(0.5 * l * lp * 0.8));
        }
    auto g = TorusGeometry::lattice(1, 3);
    auto gv = TwoBodyPotential::gaussian(g, 1.0, 1.0);
    LoopActivity act3(g, grid, 1.0, 3);
    for (int i = 0; i < 20; ++i) {
        auto a = act3.sample(rng), b = act3.sample(rng);
        double ab = loop_interaction_Vnu(a, b, gv, g, grid);
        CHECK(ab == doctest::Approx(loop_interaction_Vnu(b, a, gv, g, grid)).epsilon(1e-13));
        CHECK(ab >= 0.0);
        CHECK(loop_interaction_Vnu(a, b, TwoBodyPotential::zero(g), g, grid) == 0.0);
        auto M = interaction_matrix({a, b}, gv, g, grid);
        CHECK(M(0, 1) == doctest::Approx(ab).epsilon(1e-13));
    }
    auto a = act3.sample(rng);
    TimeGrid other(0.8, 8);
    LoopActivity act_o(g, other, 1.0, 1);
    auto b = act_o.sample(rng);
    CHECK_THROWS_AS(loop_interaction_Vnu(a, b, gv, g, grid), ShapeError);
}

TEST_CASE("ideal loop gas is exact") {
    auto g = TorusGeometry::lattice(1, 2);
    TimeGrid grid(1.0, 8);
    auto v = TwoBodyPotential::delta(g);
    LoopTruncation t;
    t.n_max = 6;
    t.l_max = 6;
    auto r = xi_rel_series(params(0.0, 1.5), g, grid, v, t, 0, 1);
    CHECK(r.xi_rel.value.real() == 1.0);
    CHECK(r.xi_rel.stderr_re == 0.0);
    double Q = 0.0;
    for (int l = 1; l <= 6; ++l) Q += std::exp(-double(l)) / l * 2 * heat_kernel_row(g, l)[0];
    CHECK(r.Q0 == doctest::Approx(Q).epsilon(1e-14));
    double partial = 0.0, term = 1.0;
    for (int n = 0; n <= 6; ++n) {
        if (n) term *= 1.5 * Q / n;
        partial += term;
    }
    CHECK(r.raw.value.real() == doctest::Approx(partial).epsilon(1e-14));
    // coefficients of N^n are Q^n/n! >= 0
    for (double c : r.coefficients) CHECK(c >= 0.0);
    CHECK(r.coefficients[1] == doctest::Approx(Q));

    // infinite winding sum is -sum_k log(1 - e^{-nu(kappa - lambda_k/2)})
    t.l_max = 80;
    auto r2 = xi_rel_series(params(0.0), g, grid, v, t, 0, 1);
    double logdet = 0.0;
    for (double e : laplacian_eigenvalues(g)) logdet -= std::log(1 - std::exp(-(1.0 - 0.5 * e)));
    CHECK(r2.Q0 == doctest::Approx(logdet).epsilon(1e-13));
    CHECK(r2.tail_windings < 1e-30);
}

TEST_CASE("truncation diagnostic") {
    auto g = TorusGeometry::lattice(1, 2);
    TimeGrid grid(1.0, 4);
    LoopTruncation t;
    t.n_max = 1;
    t.l_max = 1;
    auto r = xi_rel_series(params(0.0, 2.0, 1.0, 0.2), g, grid, TwoBodyPotential::delta(g), t, 0, 1);
    CHECK(r.truncated);
    t.n_max = 10;
    t.l_max = 40;
    auto s = xi_rel_series(params(0.0, 1.0, 1.0, 2.0), g, grid, TwoBodyPotential::delta(g), t, 0, 1);
    CHECK_FALSE(s.truncated);
}

TEST_CASE("ideal duhamel from open paths") {
    auto g = TorusGeometry::lattice(1, 2);
    TimeGrid grid(1.0, 8);
    auto v = TwoBodyPotential::delta(g);
    LoopTruncation t;
    auto G = free_green(g, 1.0, 1.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            auto r = duhamel_loopgas(params(0.0), g, grid, v, 0.25, x, 0.25, y, t, 0, 1);
            CHECK(std::abs(r.value.value.real() - G(x, y)) < 1e-12);
            CHECK(r.species_diagonal);
            Eigen::MatrixXd M0 = std::exp(-1.0) * heat_propagator(g, 1.0);
            Eigen::MatrixXd K = std::exp(-0.5) * heat_propagator(g, 0.5) *
                                (Eigen::MatrixXd::Identity(2, 2) - M0).inverse();
            auto u = duhamel_loopgas(params(0.0), g, grid, v, 0.75, x, 0.25, y, t, 0, 1);
            CHECK(std::abs(u.value.value.real() - K(x, y)) < 1e-12);
        }
    CHECK_THROWS_AS(duhamel_loopgas(params(0.0), g, grid, v, 0.2, 0, 0.0, 0, t, 0, 1), DomainError);
    CHECK_THROWS_AS(duhamel_loopgas(params(0.0), g, grid, v, 0.25, 0, 0.5, 0, t, 0, 1), DomainError);
}

TEST_CASE("edwards limit on one site") {
    // N = 0 leaves the open path alone; on one site it is constant and
    // V(w0, w0) = nu l0^2 / 2
    auto one = TorusGeometry::lattice(1, 1);
    TimeGrid grid(1.0, 4);
    auto v = TwoBodyPotential::delta(one);
    auto p = params(0.3, 0.0);
    LoopTruncation t;
    auto r = duhamel_loopgas(p, one, grid, v, 0.0, 0, 0.0, 0, t, 20000, 9);
    double expect = 0.0;
    for (int l = 1; l < 200; ++l) expect += std::exp(-1.0 * l - 0.3 * l * l / 2);
    CHECK(std::abs(r.value.value.real() - expect) < 4 * r.value.stderr_re);
    CHECK(r.value.stderr_re < 2e-3);
}

TEST_CASE("loop gas matches the oracle on two sites") {
    auto g = TorusGeometry::lattice(1, 2);
    TimeGrid grid(1.0, 16);
    auto v = TwoBodyPotential::delta(g);
    ModelParams p = params(0.0);
    p.coupling = CouplingMode::fixed;
    p.lambda0 = 0.5;
    LoopTruncation t;
    t.n_max = 6;
    t.l_max = 6;
    auto exact = xi_exact(p, g, v, 8);
    FockOracle o(p, g, v, 8);
    auto r = xi_rel_series(p, g, grid, v, t, 4000, 11);
    // first-order Trotter bias is small at 16 slices; allow it in quadrature
    double tol = 3 * std::hypot(r.xi_rel.stderr_re, 2e-3);
    CHECK(std::abs(r.xi_rel.value.real() - exact.xi_rel) < tol);
    CHECK(r.xi_rel.value.real() <= 1.0 + 3 * r.xi_rel.stderr_re);
    auto d = duhamel_loopgas(p, g, grid, v, 0.0, 0, 0.0, 1, t, 4000, 12);
    double G = o.gamma1()(0, 1);
    CHECK(std::abs(d.value.value.real() - G) < 3 * std::hypot(d.value.stderr_re, 2e-3));
}

TEST_CASE("classical schedule suppresses multiple windings") {
    double z = 0.5;
    for (double nu : {0.05, 0.01}) {
        auto circ = TorusGeometry::circle(4.0);
        double kappa = -std::log(z * std::sqrt(nu)) / nu;
        double r = loop_activity_term(circ, nu, kappa, 2) / loop_activity_term(circ, nu, kappa, 1);
        CHECK(r == doctest::Approx(z * std::sqrt(nu) * std::pow(2.0, -1.5)).epsilon(1e-6));
    }
}

TEST_CASE("symanzik ingredients") {
    auto one = TorusGeometry::lattice(1, 1);
    FieldParams f;
    f.kappa0 = 1.0;
    f.lambda0 = 0.0;
    auto sym = symanzik_params(f, one, TwoBodyPotential::delta(one), 0.05, 20);
    CHECK(sym.kappa_delta == 1.0);
    CHECK(sym.theta_delta == doctest::Approx(-std::exp(-0.05)));
    DurationLaw law(one, 1.0, 0.05, 20000);
    CHECK(law.total() == doctest::Approx(boost::math::expint(1, 0.05)).epsilon(1e-6));
    auto z = symanzik_series(f, one, TwoBodyPotential::delta(one), sym, 0, 1);
    CHECK(z.raw_ideal == doctest::Approx(std::exp(z.Q_delta)).epsilon(1e-10));
    CHECK(z.z.value.real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(symanzik_params(f, one, TwoBodyPotential::delta(one), 0.0, 4), DomainError);

    // durations follow dT/T e^{-T}: mean of e^{-T} against the exact ratio
    Rng rng(5);
    RunningStats s;
    for (int i = 0; i < 20000; ++i) s.add(std::exp(-law.sample(rng)));
    double expect = boost::math::expint(1, 0.1) / boost::math::expint(1, 0.05);
    CHECK(std::abs(s.mean - expect) < 5 * s.stderr_mean());

    auto g = TorusGeometry::lattice(1, 3);
    for (int i = 0; i < 50; ++i) {
        auto L = sample_local_times(g, 1, 2.5, rng);
        double tot = 0.0;
        for (double x : L) tot += x;
        CHECK(tot == doctest::Approx(2.5));
    }
    std::vector<double> a{1.5}, b{0.4};
    CHECK(symanzik_V0(a, b, TwoBodyPotential::delta(one), one) == doctest::Approx(0.5 * 1.5 * 0.4));
}

TEST_CASE("symanzik rho shift") {
    auto g = TorusGeometry::lattice(1, 2);
    auto v = TwoBodyPotential::from_values(g, {1.0, 0.25});
    FieldParams f;
    f.kappa0 = 1.2;
    f.lambda0 = 0.6;
    f.N = 2.0;
    f.rho = 0.1;
    auto s = symanzik_params(f, g, v, 0.1, 6);
    double c = -s.theta_delta;
    CHECK(s.shift == doctest::Approx(2.0 * c + 0.1));
    CHECK(s.kappa_delta == doctest::Approx(1.2 - 0.2 * s.shift * 1.25));
    CHECK(s.constant == doctest::Approx(-0.1 * s.shift * s.shift * 2 * 1.25));
}
