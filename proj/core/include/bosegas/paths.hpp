#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bosegas/lattice.hpp"
#include "bosegas/stats.hpp"

namespace bosegas {

// A sampled Brownian path. Positions are stored at every sampled time,
// endpoints included; the interaction only sees the points listed by
// first_point .. first_point + n_points - 1, each attached to a time slice.
struct Path {
    bool closed = true;
    int winding = 0;         // l for loops, l0 for open paths
    double duration = 0.0;
    int start_slice = 0;     // slice of the first interaction point
    int first_point = 0;
    int n_points = 0;
    std::vector<int> sites;       // lattice mode
    std::vector<double> coords;   // circle mode, in [0, L)
    std::vector<double> times;

    int slice_of(int k, int n_tau) const { return (start_slice + k) % n_tau; }
};

// e^{t Delta/2} by displacement on the grid t = k h, k = 0..k_max
class HeatKernelTable {
public:
    HeatKernelTable() = default;
    HeatKernelTable(const TorusGeometry& g, double h, int k_max);
    double operator()(int k, int x, int y) const { return rows_[static_cast<std::size_t>(k)][static_cast<std::size_t>(geom_.diff(x, y))]; }
    double step() const { return h_; }
    int k_max() const { return static_cast<int>(rows_.size()) - 1; }
    int steps_for(double t) const;

private:
    TorusGeometry geom_;
    double h_ = 0.0;
    std::vector<std::vector<double>> rows_;
};

// Sequential conditional bridge from x at time 0 to y at time T. Lattice
// times must be multiples of the table step.
std::vector<int> sample_lattice_bridge(const TorusGeometry& g, const HeatKernelTable& table, int x, int y,
                                       const std::vector<double>& times, Rng& rng);
std::vector<double> sample_circle_bridge(double L, double x, double y, const std::vector<double>& times, Rng& rng);

// convenience form of the bridge sampler on the uniform grid 0, eps, ..., T
struct BridgeSample {
    std::vector<int> sites;
    std::vector<double> coords;
};
BridgeSample sample_bridge(const TorusGeometry& g, double x, double y, double T, const TimeGrid& grid,
                           std::uint64_t seed);

// closed loop with l windings based at u, points at grid times 0..l nu - eps
Path make_loop(const TorusGeometry& g, const HeatKernelTable* table, const TimeGrid& grid, int l, double u,
               Rng& rng);
// open path from x' at tau' = j' eps to x after duration T = m eps;
// interaction points at tau' + eps/2 + k eps
Path make_open_path(const TorusGeometry& g, const HeatKernelTable* table, const TimeGrid& grid, int j_prime,
                    int m, double x_prime, double x, Rng& rng);

// per-slice occupation table for lattice paths: rows slices, cols sites
Eigen::MatrixXd slice_occupation(const Path& p, const TorusGeometry& g, const TimeGrid& grid);

// V_nu(w, w') = 1/2 eps sum_slices sum_{points of w, w' on the slice} v(difference)
double loop_interaction_Vnu(const Path& a, const Path& b, const TwoBodyPotential& v, const TorusGeometry& g,
                            const TimeGrid& grid);

// Pairwise V_nu for a set of paths. Lattice paths go through occupation tables.
Eigen::MatrixXd interaction_matrix(const std::vector<Path>& paths, const TwoBodyPotential& v,
                                   const TorusGeometry& g, const TimeGrid& grid);

// Samples closed loops with probability ~ (e^{-kappa l nu}/l) p_{l nu}(u,u).
class LoopActivity {
public:
    LoopActivity(const TorusGeometry& g, const TimeGrid& grid, double kappa, int l_max);
    // Q = sum_l (e^{-kappa l nu}/l) sum_u p_{l nu}(u,u)
    double total() const { return total_; }
    const std::vector<double>& by_winding() const { return weights_; }
    Path sample(Rng& rng) const;
    const HeatKernelTable* table() const { return geom_.is_lattice() ? &table_ : nullptr; }

private:
    TorusGeometry geom_;
    TimeGrid grid_;
    int l_max_;
    HeatKernelTable table_;
    std::vector<double> weights_;
    std::vector<double> cdf_;
    double total_ = 0.0;
};

// single-loop activity contributed by winding l
double loop_activity_term(const TorusGeometry& g, double nu, double kappa, int l);

}  // namespace bosegas
