#include <cmath>
#include <set>

#include "doctest.h"

#include "bosegas/errors.hpp"
#include "bosegas/fock.hpp"
#include "bosegas/loopgas.hpp"
#include "bosegas/mayer.hpp"

using namespace bosegas;

namespace {

ModelParams params(double lambda0, double N = 1.0) {
    ModelParams p;
    p.nu = 1.0;
    p.kappa0 = 1.0;
    p.lambda0 = lambda0;
    p.N = N;
    return p;
}

}  // namespace

TEST_CASE("connected graph counts") {
    std::vector<std::size_t> expect{1, 1, 4, 38, 728};
    for (int n = 1; n <= 5; ++n) {
        auto gs = enumerate_connected(n);
        CHECK(gs.size() == expect[static_cast<std::size_t>(n) - 1]);
        std::set<std::uint32_t> masks;
        for (const auto& g : gs) {
            masks.insert(g.mask);
            CHECK(static_cast<int>(g.tree.size()) == n - 1);
            for (const auto& e : g.tree) CHECK(std::find(g.edges.begin(), g.edges.end(), e) != g.edges.end());
        }
        CHECK(masks.size() == gs.size());
    }
    auto two = enumerate_connected(2);
    CHECK(two[0].edges == std::vector<Edge>{{0, 1}});
    auto four = enumerate_connected(4);
    const auto& full = four.back();
    CHECK(full.edges.size() == 6);
    CHECK(full.tree == std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}});
    CHECK_THROWS_AS(enumerate_connected(6), CapacityError);
}

TEST_CASE("mayer factor") {
    auto one = TorusGeometry::lattice(1, 1);
    TimeGrid grid(1.0, 4);
    LoopActivity act(one, grid, 1.0, 2);
    Rng rng(2);
    auto a = make_loop(one, act.table(), grid, 1, 0, rng);
    auto b = make_loop(one, act.table(), grid, 1, 0, rng);
    auto p = params(0.5);
    CHECK(mayer_factor(a, b, p, TwoBodyPotential::delta(one), one, grid) ==
          doctest::Approx(std::exp(-0.5) - 1.0).epsilon(1e-12));
    CHECK(mayer_factor(a, b, p, TwoBodyPotential::zero(one), one, grid) == 0.0);
    auto g = TorusGeometry::lattice(1, 3);
    auto v = TwoBodyPotential::gaussian(g, 1.0, 1.0);
    LoopActivity act3(g, grid, 1.0, 3);
    for (int i = 0; i < 50; ++i) {
        auto x = act3.sample(rng), y = act3.sample(rng);
        double G = mayer_factor(x, y, p, v, g, grid);
        double bound = 0.5 * 2 * loop_interaction_Vnu(x, y, v, g, grid);
        CHECK(G <= 0.0);
        CHECK(G > -1.0);
        CHECK(std::abs(G) <= bound + 1e-15);
    }
}

TEST_CASE("ideal ursell coefficients") {
    auto g = TorusGeometry::lattice(1, 2);
    TimeGrid grid(1.0, 8);
    auto v = TwoBodyPotential::delta(g);
    auto p = params(0.0, 1.7);
    auto b1 = ursell_coefficient(1, p, g, grid, v, 6, 0, 1);
    double Q = LoopActivity(g, grid, 1.0, 6).total();
    CHECK(b1.b.value.real() == doctest::Approx(1.7 * Q).epsilon(1e-14));
    for (int n = 2; n <= 4; ++n) CHECK(ursell_coefficient(n, p, g, grid, v, 6, 0, 1).b.value.real() == 0.0);
    auto poly = n_polynomial(p, g, grid, v, 3, 6, 0, 1);
    CHECK(poly.c[0] == doctest::Approx(Q).epsilon(1e-14));
    CHECK(poly.c[1] == 0.0);
    CHECK(poly.c[2] == 0.0);
    auto s = mayer_series(p, g, grid, v, 3, 6, 0, 1);
    for (double x : s.log_xi_rel) CHECK(std::abs(x) < 1e-14);
}

TEST_CASE("ursell structure at weak coupling") {
    auto g = TorusGeometry::lattice(1, 2);
    TimeGrid grid(1.0, 8);
    auto v = TwoBodyPotential::delta(g);
    auto p = params(0.3);
    auto b1 = ursell_coefficient(1, p, g, grid, v, 6, 4000, 3);
    LoopTruncation t;
    t.n_max = 1;
    t.l_max = 6;
    auto lg = xi_rel_series(p, g, grid, v, t, 4000, 4);
    CHECK(std::abs(b1.b.value.real() - lg.coefficients[1]) <
          3 * std::hypot(b1.b.stderr_re, lg.coefficient_err[1]));
    auto b2 = ursell_coefficient(2, p, g, grid, v, 6, 4000, 3);
    CHECK(b2.b.value.real() <= 3 * b2.b.stderr_re);
    for (int n = 2; n <= 4; ++n) {
        auto u = ursell_coefficient(n, p, g, grid, v, 6, 1000, 5);
        CHECK(u.majorization_violations == 0);
        CHECK(std::abs(u.b.value.real()) <= u.tree_bound.value.real() + 3 * u.tree_bound.stderr_re);
        double sum = 0.0;
        for (double e : u.by_edges) sum += e;
        CHECK(sum == doctest::Approx(u.b.value.real()).epsilon(1e-10));
    }
}

TEST_CASE("mayer partial sums track the oracle") {
    auto g = TorusGeometry::lattice(1, 2);
    TimeGrid grid(1.0, 16);
    auto v = TwoBodyPotential::delta(g);
    auto p = params(0.1);
    auto exact = xi_exact(p, g, v, 8);
    auto s = mayer_series(p, g, grid, v, 3, 8, 4000, 7);
    double target = exact.log_xi_rel;
    double err = s.log_xi_rel_err.back();
    CHECK(std::abs(s.log_xi_rel.back() - target) < std::max(0.02 * std::abs(target), 3 * err + 5e-4));
    CHECK(std::abs(s.log_xi_rel[0] - target) > std::abs(s.log_xi_rel.back() - target));
}

TEST_CASE("n polynomial terms by edge count") {
    auto g = TorusGeometry::lattice(1, 2);
    TimeGrid grid(1.0, 8);
    auto v = TwoBodyPotential::delta(g);
    auto p = params(0.2, 3.0);
    auto poly = n_polynomial(p, g, grid, v, 3, 6, 1000, 9);
    CHECK(poly.mode == CouplingMode::fixed);
    CHECK(poly.by_edges[2].size() == 4);
    CHECK(poly.by_edges[2][0] == 0.0);
    CHECK(poly.by_edges[2][1] == 0.0);
    // b_n = N^n c_n for rho = 0
    auto u = ursell_coefficient(2, p, g, grid, v, 6, 1000, 9);
    CHECK(u.b.value.real() == doctest::Approx(9.0 * poly.c[1]).epsilon(1e-12));
}
