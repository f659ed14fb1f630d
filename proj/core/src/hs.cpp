#include "bosegas/hs.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bosegas/errors.hpp"

namespace bosegas {

SigmaSampler::SigmaSampler(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                           const TwoBodyPotential& v)
    : sites_(g.sites()), slices_(grid.n_tau), zero_(p.lambda() == 0.0) {
    if (!g.is_lattice()) throw UnsupportedModeError("sigma fields live on the lattice");
    if (p.lambda() < 0.0) throw DomainError("lambda must be >= 0");
    auto rep = validate_potential(g, v);
    if (!rep.ok) throw PotentialError("potential rejected: " + rep.message);
    if (zero_) return;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v.matrix(g));
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff()))
            throw PotentialError("potential covariance is not positive semidefinite");
        ev(i) = std::sqrt(std::max(0.0, ev(i)));
    }
    double scale = std::sqrt(p.lambda() / (p.nu * grid.eps));
    root_ = scale * es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

SigmaField SigmaSampler::operator()(Rng& rng) const {
    SigmaField s = SigmaField::Zero(sites_, slices_);
    if (zero_) return s;
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd xi(sites_);
    for (int j = 0; j < slices_; ++j) {
        for (int x = 0; x < sites_; ++x) xi(x) = gauss(rng);
        s.col(j) = root_ * xi;
    }
    return s;
}

SigmaField sample_sigma(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                        const TwoBodyPotential& v, std::uint64_t seed) {
    Rng rng(seed);
    return SigmaSampler(p, g, grid, v)(rng);
}

double wick_rho(const ModelParams& p, const TorusGeometry& g) {
    if (!(p.kappa0 > 0.0)) throw DomainError("wick_rho needs kappa0 > 0");
    return p.nu * ideal_occupation(g, p.nu, p.kappa0);
}

cplx log_det_one_minus(const Eigen::MatrixXcd& M) {
    if (M.rows() == 1) {
        cplx a = 1.0 - M(0, 0);
        if (std::abs(a) == 0.0) throw SingularError("1 - M is singular");
        return std::log(a);
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        cplx a = 1.0 - es.eigenvalues()(i);
        if (std::abs(a) < 1e-300) throw SingularError("1 - M is singular");
        s += std::log(a);
    }
    return s;
}

HSModel::HSModel(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid, const TwoBodyPotential& v)
    : params_(p),
      geom_(g),
      grid_(grid),
      mono_(g, grid),
      sampler_(p, g, grid, v),
      rho_(resolve_rho(p, g)),
      lambda_(p.lambda()) {
    p.check();
    if (std::abs(grid.nu - p.nu) > 1e-12 * p.nu) throw ShapeError("time grid length differs from nu");
    SigmaField zero = SigmaField::Zero(g.sites(), grid.n_tau);
    logdet0_ = log_det_one_minus(std::exp(-p.nu * p.kappa0) * mono_.full(zero));
}

HSWeight HSModel::weight_from_monodromy(const SigmaField& sigma, const Eigen::MatrixXcd& gamma) const {
    HSWeight w;
    w.theta = rho_ / params_.nu * grid_.eps * sigma.sum();
    w.D = log_det_one_minus(std::exp(-params_.nu * params_.kappa0) * gamma) - logdet0_;
    w.exponent = cplx(0.0, params_.N * w.theta) - params_.N * w.D;
    return w;
}

HSWeight HSModel::weight(const SigmaField& sigma) const { return weight_from_monodromy(sigma, mono_.full(sigma)); }

Eigen::MatrixXcd HSModel::duhamel_kernel(const SigmaField& sigma, int j, int j_prime) const {
    const double k0 = params_.kappa0, eps = grid_.eps, nu = params_.nu;
    int n = grid_.n_tau, L = geom_.sites();
    Eigen::MatrixXcd A = std::exp(-k0 * j * eps) * mono_(sigma, 0, j);
    Eigen::MatrixXcd B = std::exp(-k0 * (nu - j_prime * eps)) * mono_(sigma, j_prime, n);
    Eigen::MatrixXcd M = std::exp(-k0 * nu) * mono_(sigma, 0, n);
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(L, L);
    Eigen::MatrixXcd K = A * (one - M).partialPivLu().solve(B);
    if (j > j_prime) K += std::exp(-k0 * (j - j_prime) * eps) * mono_(sigma, j_prime, j);
    return K;
}

HSWeight hs_log_weight(const SigmaField& sigma, const ModelParams& p, const TorusGeometry& g,
                       const TimeGrid& grid, const TwoBodyPotential& v) {
    if (sigma.cols() != grid.n_tau || sigma.rows() != g.sites()) throw ShapeError("sigma shape mismatch");
    return HSModel(p, g, grid, v).weight(sigma);
}

WindingSum winding_exponent(const SigmaField& sigma, const ModelParams& p, const TorusGeometry& g,
                            const TimeGrid& grid, int l_max) {
    if (l_max < 1) throw DomainError("l_max must be >= 1");
    Monodromy mono(g, grid);
    Eigen::MatrixXcd G = mono.full(sigma);
    Eigen::MatrixXcd G0 = mono.full(SigmaField::Zero(g.sites(), grid.n_tau));
    Eigen::MatrixXcd Gl = G, G0l = G0;
    WindingSum r;
    double q = std::exp(-p.nu * p.kappa0);
    for (int l = 1; l <= l_max; ++l) {
        r.value += std::pow(q, l) / l * (Gl.trace() - G0l.trace());
        Gl = G * Gl;
        G0l = G0 * G0l;
    }
    r.tail_bound = 2.0 * g.sites() * std::pow(q, l_max + 1) / ((l_max + 1) * (1.0 - q));
    return r;
}

namespace {

void check_samples(std::size_t n) {
    if (n < 256) throw DomainError("HS estimators need at least 256 samples");
}

}  // namespace

ComplexEstimate estimate_xi_rel(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                                const TwoBodyPotential& v, std::size_t n_samples, std::uint64_t seed) {
    check_samples(n_samples);
    HSModel model(p, g, grid, v);
    Rng rng(seed);
    std::vector<cplx> w(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) w[i] = model.weight(model.sample(rng)).weight();
    auto e = batch_mean(w);
    e.ess = effective_sample_size(w);
    e.seed = seed;
    e.unreliable = e.ess < 10.0;
    return e;
}

ComplexEstimate estimate_duhamel(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                                 const TwoBodyPotential& v, double tau, int x, double tau_prime, int x_prime,
                                 std::size_t n_samples, std::uint64_t seed) {
    check_samples(n_samples);
    int j = grid.boundary_index(tau), jp = grid.boundary_index(tau_prime);
    if (j < 0 || jp < 0) throw DomainError("tau and tau' must be slice boundaries");
    if (j >= grid.n_tau || jp > j) throw DomainError("duhamel needs 0 <= tau' <= tau < nu");
    if (x < 0 || x >= g.sites() || x_prime < 0 || x_prime >= g.sites()) throw DomainError("site out of range");
    HSModel model(p, g, grid, v);
    Rng rng(seed);
    std::vector<cplx> num(n_samples), den(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        SigmaField s = model.sample(rng);
        cplx w = model.weight(s).weight();
        den[i] = w;
        num[i] = w * model.duhamel_kernel(s, j, jp)(x, x_prime);
    }
    auto e = batch_ratio(num, den);
    e.seed = seed;
    e.unreliable = e.ess < 10.0;
    return e;
}

QuadratureValue inverse_det_by_quadrature(const Eigen::MatrixXcd& A, double tol) {
    using boost::math::quadrature::gauss_kronrod;
    auto n = A.rows();
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(n, n);
    auto f = [&](double t) -> cplx {
        Eigen::MatrixXcd R = (A + t * one).inverse();
        return R.trace() - double(n) / (1.0 + t);
    };
    QuadratureValue q;
    double err = 0.0;
    cplx integral = gauss_kronrod<double, 15>::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 20, tol,
                                                         &err);
    q.value = std::exp(integral);
    q.error = err * std::abs(q.value);
    return q;
}

}  // namespace bosegas
