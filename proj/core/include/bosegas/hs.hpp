#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "bosegas/lattice.hpp"
#include "bosegas/stats.hpp"

namespace bosegas {

struct HSWeight {
    double theta = 0.0;
    cplx D{0.0, 0.0};
    cplx exponent{0.0, 0.0};  // i N theta - N D

    cplx weight() const { return std::exp(exponent); }
};

// sqrt(lambda/(nu eps)) V^{1/2} applied to white noise, one column per slice
class SigmaSampler {
public:
    SigmaSampler(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid, const TwoBodyPotential& v);
    SigmaField operator()(Rng& rng) const;
    const Eigen::MatrixXd& root() const { return root_; }

private:
    int sites_;
    int slices_;
    bool zero_;
    Eigen::MatrixXd root_;
};

SigmaField sample_sigma(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                        const TwoBodyPotential& v, std::uint64_t seed);

double wick_rho(const ModelParams& p, const TorusGeometry& g);

// sum_i Log(1 - mu_i) over the eigenvalues of M; the principal branch per
// eigenvalue is the branch of the winding series
cplx log_det_one_minus(const Eigen::MatrixXcd& M);

class HSModel {
public:
    HSModel(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid, const TwoBodyPotential& v);

    SigmaField sample(Rng& rng) const { return sampler_(rng); }
    HSWeight weight(const SigmaField& sigma) const;
    HSWeight weight_from_monodromy(const SigmaField& sigma, const Eigen::MatrixXcd& gamma) const;
    // sum over windings of e^{-kappa0 T} Gamma(tau, tau' - l nu), T = tau - tau' + l nu > 0
    Eigen::MatrixXcd duhamel_kernel(const SigmaField& sigma, int j, int j_prime) const;
    const Monodromy& propagators() const { return mono_; }
    double rho() const { return rho_; }
    double lambda() const { return lambda_; }

private:
    ModelParams params_;
    TorusGeometry geom_;
    TimeGrid grid_;
    Monodromy mono_;
    SigmaSampler sampler_;
    double rho_;
    double lambda_;
    cplx logdet0_;
};

HSWeight hs_log_weight(const SigmaField& sigma, const ModelParams& p, const TorusGeometry& g,
                       const TimeGrid& grid, const TwoBodyPotential& v);

struct WindingSum {
    cplx value{0.0, 0.0};
    double tail_bound = 0.0;
};

WindingSum winding_exponent(const SigmaField& sigma, const ModelParams& p, const TorusGeometry& g,
                            const TimeGrid& grid, int l_max);

ComplexEstimate estimate_xi_rel(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                                const TwoBodyPotential& v, std::size_t n_samples, std::uint64_t seed);

ComplexEstimate estimate_duhamel(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                                 const TwoBodyPotential& v, double tau, int x, double tau_prime, int x_prime,
                                 std::size_t n_samples, std::uint64_t seed);

// exp(int_0^inf tr[(A+t)^{-1} - (1+t)^{-1}] dt), which equals 1/det A when A + A* > 0
struct QuadratureValue {
    cplx value{0.0, 0.0};
    double error = 0.0;
};
QuadratureValue inverse_det_by_quadrature(const Eigen::MatrixXcd& A, double tol = 1e-12);

}  // namespace bosegas
