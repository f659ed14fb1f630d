#pragma once

#include <cstdint>
#include <vector>

#include "bosegas/lattice.hpp"
#include "bosegas/paths.hpp"
#include "bosegas/stats.hpp"

namespace bosegas {

struct LoopTruncation {
    int n_max = 6;
    int l_max = 6;
    double tail_tolerance = 1e-3;
};

struct LoopGasResult {
    ComplexEstimate xi_rel;
    // sum_n N^n/n! Q^n E_n without the ideal normalisation and constant
    ComplexEstimate raw;
    // per order n: Q^n/n! E_n, the coefficient of N^n (rho = 0)
    std::vector<double> coefficients;
    std::vector<double> coefficient_err;
    double Q_rho = 0.0;
    double Q0 = 0.0;
    double constant = 0.0;   // C_rho, exponent of the rho constant
    double tail_orders = 0.0;
    double tail_windings = 0.0;
    bool truncated = false;
};

// truncation tails of the lambda0 = 0 series: relative tail of the order sum,
// and N times the omitted winding activity
struct IdealTails {
    double orders = 0.0;
    double windings = 0.0;
};
IdealTails ideal_tails(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid, const LoopTruncation& t);

LoopGasResult xi_rel_series(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                            const TwoBodyPotential& v, const LoopTruncation& t, std::size_t samples,
                            std::uint64_t seed);

struct LoopDuhamelResult {
    ComplexEstimate value;
    bool species_diagonal = true;
    double open_weight = 0.0;  // sum over l0 of e^{-kappa T} p_T(x, x')
    int l0_max = 0;
    bool truncated = false;
};

// tau, tau' on slice boundaries, 0 <= tau' <= tau < nu; x, x' are site
// indices in lattice mode and coordinates in circle mode
LoopDuhamelResult duhamel_loopgas(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                                  const TwoBodyPotential& v, double tau, double x, double tau_prime,
                                  double x_prime, const LoopTruncation& t, std::size_t samples, std::uint64_t seed);

// ---------------------------------------------------------------- Symanzik

struct SymanzikParams {
    double delta = 0.1;
    double theta_delta = 0.0;  // -[h^{-1} e^{-delta h}]_xx
    double kappa_delta = 0.0;
    double constant = 0.0;     // exponent of the Wick-ordering constant
    double g = 0.0;            // lambda0/(N+1)
    double shift = 0.0;        // N c_delta + rho
    int n_max = 8;
    int grid_points = 20000;
};

struct FieldParams {
    double kappa0 = 1.0;
    double lambda0 = 0.0;
    double N = 1.0;
    double rho = 0.0;
};

SymanzikParams symanzik_params(const FieldParams& f, const TorusGeometry& g, const TwoBodyPotential& v,
                               double delta, int n_max);

// dT/T e^{-kappa T} tr p_T on [delta, inf), sampled on a log grid with a
// piecewise-linear density in s = ln T
class DurationLaw {
public:
    DurationLaw(const TorusGeometry& g, double kappa, double delta, int points);
    double total() const { return total_; }
    double sample(Rng& rng) const;

private:
    std::vector<double> s_, f_, cdf_;
    double total_ = 0.0;
};

// continuous-time random-walk loop of duration T based at u: time spent on each site
std::vector<double> sample_local_times(const TorusGeometry& g, int u, double T, Rng& rng);

// V_0 = 1/2 sum_{x,y} L(x) v(x - y) L'(y)
double symanzik_V0(const std::vector<double>& a, const std::vector<double>& b, const TwoBodyPotential& v,
                   const TorusGeometry& g);

struct SymanzikResult {
    ComplexEstimate z;
    double Q_delta = 0.0;
    double Q0 = 0.0;
    double raw_ideal = 0.0;  // sum_n (N Q_delta)^n/n!
};

SymanzikResult symanzik_series(const FieldParams& f, const TorusGeometry& g, const TwoBodyPotential& v,
                               const SymanzikParams& sym, std::size_t samples, std::uint64_t seed);

}  // namespace bosegas
