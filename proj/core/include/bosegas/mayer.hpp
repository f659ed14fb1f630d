#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "bosegas/lattice.hpp"
#include "bosegas/paths.hpp"
#include "bosegas/stats.hpp"

namespace bosegas {

using Edge = std::pair<int, int>;

struct ClusterGraph {
    int n = 1;
    std::vector<Edge> edges;  // i < j, lexicographic
    std::vector<Edge> tree;   // lexicographically smallest spanning tree
    std::uint32_t mask = 0;   // bit k for the k-th pair in lexicographic order
};

// all connected labelled graphs on n <= 5 vertices, ordered by mask
std::vector<ClusterGraph> enumerate_connected(int n);

// exp(-(lambda/nu)(V(a,b) + V(b,a))) - 1
double mayer_factor(const Path& a, const Path& b, const ModelParams& p, const TwoBodyPotential& v,
                    const TorusGeometry& g, const TimeGrid& grid);
inline double mayer_factor_from_V(double lambda_over_nu, double v_ab) {
    return std::expm1(-lambda_over_nu * 2.0 * v_ab);
}

struct UrsellEstimate {
    int n = 1;
    ComplexEstimate b;
    ComplexEstimate tree_bound;              // same sum with |G| on tree edges only
    std::vector<double> by_edges;            // contribution per edge count
    std::vector<double> by_edges_err;
    std::uint64_t majorization_violations = 0;
    double Q = 0.0;                          // loop activity at kappa(rho)
};

UrsellEstimate ursell_coefficient(int n, const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                                  const TwoBodyPotential& v, int l_max, std::size_t samples, std::uint64_t seed);

struct MayerSeries {
    std::vector<UrsellEstimate> terms;
    double constant = 0.0;      // rho constant
    double ideal = 0.0;         // N Q0, the lambda0 = 0 value of sum b_n
    // partial sums of ln Xi_rel, index k holds sum_{n <= k+1} b_n + constant - ideal
    std::vector<double> log_xi_rel;
    std::vector<double> log_xi_rel_err;
};

MayerSeries mayer_series(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                         const TwoBodyPotential& v, int n_max, int l_max, std::size_t samples, std::uint64_t seed);

// ln Xi ~ sum_n c_n N^n at the coupling in p; meaningful as a polynomial for rho = 0
struct NPolynomial {
    CouplingMode mode = CouplingMode::fixed;
    double lambda = 0.0;
    std::vector<double> c;
    std::vector<double> c_err;
    std::vector<std::vector<double>> by_edges;  // per order, per edge count, without N^n
};

NPolynomial n_polynomial(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                         const TwoBodyPotential& v, int n_max, int l_max, std::size_t samples, std::uint64_t seed);

}  // namespace bosegas
