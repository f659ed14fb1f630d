#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "bosegas/lattice.hpp"
#include "bosegas/loopgas.hpp"
#include "bosegas/stats.hpp"

namespace bosegas {

// [(-Delta/2 + kappa0)^{-1}]_xx
double wick_constant(const TorusGeometry& g, double kappa0);

// phi: sites x N complex matrix
double field_action(const Eigen::MatrixXcd& phi, const FieldParams& f, const TorusGeometry& g,
                    const TwoBodyPotential& v);

struct GibbsFieldResult {
    ComplexEstimate two_point;     // <phi_a(x)^* phi_a(y)>, averaged over species
    ComplexEstimate off_species;   // <phi_0(x)^* phi_1(y)>, zero estimate when N = 1
    ComplexEstimate mean_phi;      // <phi_0(x)>
    double acceptance = 0.0;
    double step = 0.0;
    double tau_int = 0.0;
    bool tuning_failed = false;
    std::size_t sweeps = 0;
};

// Metropolis random walk on exp(-h), one site update at a time; the step is
// tuned during burn-in toward 45% acceptance
GibbsFieldResult sample_gibbs_field(const FieldParams& f, const TorusGeometry& g, const TwoBodyPotential& v,
                                    std::size_t sweeps, std::uint64_t seed, int x = 0, int y = 0);

// single site: u = |phi|^2 with density u^{N-1} e^{-h(u)}
struct RadialQuadrature {
    double z_rel = 1.0;       // int e^{-h} / int e^{-kappa0 |phi|^2}
    double phi2 = 0.0;        // <phi_a^* phi_a> for one species
    double error = 0.0;
};
RadialQuadrature single_site_field(const FieldParams& f, double v0, double tol = 1e-12);
// same quantities from the eta representation: a one-dimensional Gaussian
// integral of (kappa0 - i eta)^{-N}-type weights
RadialQuadrature single_site_field_eta(const FieldParams& f, double v0, double tol = 1e-12);

struct ActionValue {
    cplx value{0.0, 0.0};
    double error = 0.0;
    bool precision_flag = false;
};

// S(eta) by adaptive quadrature over t in [0, inf)
ActionValue action_S_eta(const Eigen::VectorXd& eta, const FieldParams& f, const TorusGeometry& g,
                         double tol = 1e-10);
// sum_k [log(1 - i mu_k) + i mu_k], mu_k the eigenvalues of R^{1/2} eta R^{1/2}
cplx action_S_closed(const Eigen::VectorXd& eta, const FieldParams& f, const TorusGeometry& g);

// eta ~ N(0, (lambda0/(N+1)) v)
class EtaSampler {
public:
    EtaSampler(const FieldParams& f, const TorusGeometry& g, const TwoBodyPotential& v);
    Eigen::VectorXd operator()(Rng& rng) const;
    bool zero() const { return zero_; }

private:
    Eigen::MatrixXd root_;
    bool zero_ = false;
};

struct EtaEstimate {
    ComplexEstimate z;
    std::uint64_t positivity_violations = 0;  // Re S < 0
    std::uint64_t modulus_violations = 0;     // |e^{-N S}| > 1
};

// E[e^{-i rho sum eta} e^{-N S(eta)}]
EtaEstimate z_via_eta(const FieldParams& f, const TorusGeometry& g, const TwoBodyPotential& v,
                      std::size_t samples, std::uint64_t seed);

}  // namespace bosegas
