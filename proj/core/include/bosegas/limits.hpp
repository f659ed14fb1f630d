#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bosegas/lattice.hpp"
#include "bosegas/loopgas.hpp"
#include "bosegas/stats.hpp"

namespace bosegas {

struct ClassicalXi {
    double value = 0.0;
    std::vector<double> terms;   // n = 0..n_max
    std::vector<int> nodes;      // quadrature nodes used per n (circle)
    double tail = 0.0;           // v = 0 bound on the omitted orders
    bool truncated = false;
};

// sum_{n <= n_max} (zN)^n/n! int prod du exp(-(lambda0/2) sum_{i,j} v(u_i - u_j))
ClassicalXi classical_xi(double z, double lambda0, double N, const TorusGeometry& g, const TwoBodyPotential& v,
                         int n_max, double tol = 1e-8);

// kappa with e^{-kappa nu} nu^{-d/2} = z
double activity_to_kappa(double z, double nu, int d);

struct SweepPoint {
    double parameter = 0.0;
    ComplexEstimate estimate;  // route value
    double reference = 0.0;
    double reference_err = 0.0;
    double discrepancy = 0.0;
    double discrepancy_err = 0.0;
    bool flagged = false;
};

struct LimitSweep {
    std::string parameter_name;
    std::vector<SweepPoint> points;
    bool decreasing = false;     // |disc| drops by more than the combined 1 sigma at each step
    bool final_ok = false;
    std::string note;
};

// |d_{k+1}| + sqrt(e_k^2 + e_{k+1}^2) < |d_k| for every step
bool decreasing_beyond_errors(const std::vector<SweepPoint>& pts, double sigmas = 1.0);

struct ClassicalSweepConfig {
    double z = 0.5;
    double lambda0 = 0.5;
    double L = 4.0;
    std::vector<double> nu_list{0.4, 0.2, 0.1, 0.05};
    int n_tau = 8;
    int n_max = 8;
    int l_max = 6;
    double tolerance = 0.05;
};

// relative discrepancy of the raw circle loop gas to classical_xi at activity z (2 pi)^{-1/2}
LimitSweep classical_limit_sweep(const ClassicalSweepConfig& c, const TwoBodyPotential& v, std::size_t samples,
                                 std::uint64_t seed);

struct SaddleState {
    double s = 0.0;
    double kappa_ren = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// s = lambda0 (N/(N+1)) sum v (nu n(kappa0 + s) - rho)
SaddleState saddle_point(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v);

struct LargeNConfig {
    std::vector<double> N_list{4.0, 64.0};
    int x = 0;
    int y = 0;
    std::size_t mayer_samples = 0;  // > 0 adds the non-tree/tree ratio at order 3
};

struct LargeNSweep {
    LimitSweep sweep;
    std::vector<double> kappa_ren;
    std::vector<double> nontree_ratio;  // per N, |3-edge| / |2-edge| contribution at n = 3
};

// hs-field gamma1 with lambda = lambda0 nu^2/(N+1) against free_green(kappa_ren)
LargeNSweep largeN_check(const ModelParams& base, const TorusGeometry& g, const TimeGrid& grid,
                         const TwoBodyPotential& v, const LargeNConfig& c, std::size_t samples, std::uint64_t seed);

struct MeanfieldSweepConfig {
    double kappa0 = 1.0;
    double lambda0 = 0.5;
    std::vector<double> nu_list{0.5, 0.25, 0.125};
    double eps = 1.0 / 32.0;   // slice width kept fixed across the sweep
};

struct MeanfieldSweep {
    LimitSweep sweep;
    double field_lambda0 = 0.0;
    double field_check = 0.0;  // |radial - eta quadrature| on the field side
};

// nu gamma1 from hs-field (lambda = lambda0 nu^2, rho = wick) against <phi^* phi>
MeanfieldSweep meanfield_sweep(const MeanfieldSweepConfig& c, const TorusGeometry& g, const TwoBodyPotential& v,
                               std::size_t samples, std::uint64_t seed);

}  // namespace bosegas
