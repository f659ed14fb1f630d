#include "bosegas/meanfield.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

Eigen::MatrixXd one_body(const TorusGeometry& g, double kappa0) {
    Eigen::MatrixXd h = -0.5 * laplacian_matrix(g);
    h.diagonal().array() += kappa0;
    return h;
}

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double wick_constant(const TorusGeometry& g, double kappa0) {
    if (!g.is_lattice()) throw UnsupportedModeError("wick constant needs lattice mode");
    if (!(kappa0 > 0.0)) throw DomainError("wick constant needs kappa0 > 0");
    double c = 0.0;
    for (double e : laplacian_eigenvalues(g)) c += 1.0 / (kappa0 - 0.5 * e);
    return c / g.sites();
}

double field_action(const Eigen::MatrixXcd& phi, const FieldParams& f, const TorusGeometry& g,
                    const TwoBodyPotential& v) {
    int n = g.sites();
    if (phi.rows() != n) throw ShapeError("field has the wrong number of sites");
    double kin = 0.0;
    Eigen::VectorXd mod2(n);
    for (int x = 0; x < n; ++x) {
        mod2(x) = phi.row(x).squaredNorm();
        for (int axis = 0; axis < g.d; ++axis) kin += (phi.row(g.shift(x, axis, 1)) - phi.row(x)).squaredNorm();
    }
    double h = 0.5 * kin + f.kappa0 * mod2.sum();
    if (f.lambda0 == 0.0) return h;
    double c = wick_constant(g, f.kappa0);
    Eigen::VectorXd u = mod2.array() - (double(phi.cols()) * c + f.rho);
    return h + 0.5 * f.lambda0 / (f.N + 1.0) * u.dot(v.matrix(g) * u);
}

GibbsFieldResult sample_gibbs_field(const FieldParams& f, const TorusGeometry& g, const TwoBodyPotential& v,
                                    std::size_t sweeps, std::uint64_t seed, int x, int y) {
    if (f.N < 1.0 || f.N != std::floor(f.N)) throw DomainError("field sampler needs integer N >= 1");
    if (sweeps < 256) throw DomainError("field sampler needs at least 256 sweeps");
    int n = g.sites(), N = static_cast<int>(f.N);
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(n, N);
    double h = field_action(phi, f, g, v);
    double step = 1.0 / std::sqrt(f.kappa0 + 1.0);

    auto sweep = [&](std::size_t& acc) {
        for (int s = 0; s < n; ++s) {
            Eigen::RowVectorXcd old = phi.row(s);
            for (int a = 0; a < N; ++a) phi(s, a) += step * std::sqrt(0.5) * cplx(gauss(rng), gauss(rng));
            double h1 = field_action(phi, f, g, v);
            if (h1 <= h || unif(rng) < std::exp(h - h1)) {
                h = h1;
                ++acc;
            } else {
                phi.row(s) = old;
            }
        }
    };

    GibbsFieldResult r;
    std::size_t burn = std::max<std::size_t>(200, sweeps / 5);
    for (std::size_t b = 0; b < burn; b += 50) {
        std::size_t acc = 0;
        for (int k = 0; k < 50; ++k) sweep(acc);
        double rate = double(acc) / (50.0 * n);
        step *= std::exp(rate - 0.45);
    }
    std::vector<cplx> tp(sweeps), off(sweeps), mean(sweeps);
    std::vector<double> series(sweeps);
    std::size_t acc = 0;
    for (std::size_t k = 0; k < sweeps; ++k) {
        sweep(acc);
        cplx s = 0.0;
        for (int a = 0; a < N; ++a) s += std::conj(phi(x, a)) * phi(y, a);
        tp[k] = s / double(N);
        off[k] = N > 1 ? std::conj(phi(x, 0)) * phi(y, 1) : cplx(0.0);
        mean[k] = phi(x, 0);
        series[k] = tp[k].real();
    }
    r.acceptance = double(acc) / (double(sweeps) * n);
    r.step = step;
    r.sweeps = sweeps;
    r.tuning_failed = r.acceptance < 0.05 || r.acceptance > 0.95;
    r.tau_int = integrated_autocorrelation(series);
    r.two_point = batch_mean(tp);
    r.off_species = batch_mean(off);
    r.mean_phi = batch_mean(mean);
    for (auto* e : {&r.two_point, &r.off_species, &r.mean_phi}) {
        e->seed = seed;
        e->ess = double(sweeps) / std::max(1.0, 2.0 * r.tau_int);
    }
    return r;
}

RadialQuadrature single_site_field(const FieldParams& f, double v0, double tol) {
    if (!(f.kappa0 > 0.0)) throw DomainError("field quadrature needs kappa0 > 0");
    if (!(f.N > 0.0)) throw DomainError("field quadrature needs N > 0");
    using boost::math::quadrature::gauss_kronrod;
    double g = f.lambda0 / (f.N + 1.0);
    double a = f.N / f.kappa0 + f.rho;
    auto h = [&](double u) { return f.kappa0 * u + 0.5 * g * v0 * (u - a) * (u - a); };
    double inf = std::numeric_limits<double>::infinity();
    double e0 = 0.0, e1 = 0.0;
    double I0 = gauss_kronrod<double, 31>::integrate(
        [&](double u) { return std::pow(u, f.N - 1.0) * std::exp(-h(u)); }, 0.0, inf, 25, tol, &e0);
    double I1 = gauss_kronrod<double, 31>::integrate(
        [&](double u) { return std::pow(u, f.N) * std::exp(-h(u)); }, 0.0, inf, 25, tol, &e1);
    RadialQuadrature r;
    double norm = boost::math::tgamma(f.N) / std::pow(f.kappa0, f.N);
    r.z_rel = I0 / norm;
    r.phi2 = I1 / (I0 * f.N);
    r.error = std::max(e0 / I0, e1 / I1);
    return r;
}

RadialQuadrature single_site_field_eta(const FieldParams& f, double v0, double tol) {
    if (!(f.kappa0 > 0.0)) throw DomainError("field quadrature needs kappa0 > 0");
    using boost::math::quadrature::gauss_kronrod;
    double var = f.lambda0 / (f.N + 1.0) * v0;
    RadialQuadrature r;
    if (var == 0.0) {
        r.phi2 = 1.0 / f.kappa0;
        return r;
    }
    double sd = std::sqrt(var);
    // eta = sd * x, x standard normal
    auto weight = [&](double x) {
        double eta = sd * x;
        cplx S = std::log(cplx(1.0, -eta / f.kappa0)) + cplx(0.0, eta / f.kappa0);
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi) * std::exp(cplx(0.0, -f.rho * eta) - f.N * S);
    };
    double inf = std::numeric_limits<double>::infinity();
    double e0 = 0.0, e1 = 0.0;
    cplx Z = gauss_kronrod<double, 31>::integrate(weight, -inf, inf, 25, tol, &e0);
    cplx P = gauss_kronrod<double, 31>::integrate(
        [&](double x) { return weight(x) / cplx(f.kappa0, -sd * x); }, -inf, inf, 25, tol, &e1);
    r.z_rel = Z.real();
    r.phi2 = (P / Z).real();
    r.error = std::max(e0 / std::abs(Z), e1 / std::abs(P)) + std::abs(Z.imag());
    return r;
}

ActionValue action_S_eta(const Eigen::VectorXd& eta, const FieldParams& f, const TorusGeometry& g, double tol) {
    if (!(f.kappa0 > 0.0)) throw DomainError("action needs kappa0 > 0");
    if (eta.size() != g.sites()) throw ShapeError("eta has the wrong number of sites");
    using boost::math::quadrature::gauss_kronrod;
    Eigen::MatrixXcd h = one_body(g, f.kappa0).cast<cplx>();
    Eigen::MatrixXcd E = eta.cast<cplx>().asDiagonal();
    auto n = h.rows();
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(n, n);
    auto integrand = [&](double t) -> cplx {
        Eigen::MatrixXcd Rinv = h + t * one;
        Eigen::MatrixXcd R = Rinv.inverse();
        Eigen::MatrixXcd M = (Rinv - cplx(0.0, 1.0) * E).partialPivLu().solve(E * R);
        return (R * E * M).trace();
    };
    ActionValue s;
    double err = 0.0;
    s.value = gauss_kronrod<double, 31>::integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 25, tol,
                                                   &err);
    s.error = err;
    s.precision_flag = err > 100.0 * tol * std::max(1.0, std::abs(s.value));
    return s;
}

cplx action_S_closed(const Eigen::VectorXd& eta, const FieldParams& f, const TorusGeometry& g) {
    if (eta.size() != g.sites()) throw ShapeError("eta has the wrong number of sites");
    Eigen::MatrixXd R = one_body(g, f.kappa0).inverse();
    Eigen::MatrixXd Rh = sym_sqrt(0.5 * (R + R.transpose()));
    Eigen::MatrixXd A = Rh * eta.asDiagonal() * Rh;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
    cplx s = 0.0;
    for (double mu : es.eigenvalues()) s += std::log(cplx(1.0, -mu)) + cplx(0.0, mu);
    return s;
}

EtaSampler::EtaSampler(const FieldParams& f, const TorusGeometry& g, const TwoBodyPotential& v) {
    auto rep = validate_potential(g, v);
    if (!rep.ok) throw PotentialError(rep.message);
    double gc = f.lambda0 / (f.N + 1.0);
    zero_ = gc == 0.0;
    root_ = sym_sqrt(gc * v.matrix(g));
}

Eigen::VectorXd EtaSampler::operator()(Rng& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd xi(root_.rows());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = gauss(rng);
    if (zero_) return Eigen::VectorXd::Zero(root_.rows());
    return root_ * xi;
}

EtaEstimate z_via_eta(const FieldParams& f, const TorusGeometry& g, const TwoBodyPotential& v, std::size_t samples,
                      std::uint64_t seed) {
    if (!(f.kappa0 > 0.0)) throw DomainError("z_via_eta needs kappa0 > 0");
    EtaSampler sampler(f, g, v);
    EtaEstimate out;
    out.z.seed = seed;
    if (sampler.zero()) {
        out.z.value = 1.0;
        return out;
    }
    if (samples < 256) throw DomainError("z_via_eta needs at least 256 samples");
    Rng rng(seed);
    std::vector<cplx> w(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        Eigen::VectorXd eta = sampler(rng);
        cplx S = action_S_closed(eta, f, g);
        if (S.real() < -1e-14 * std::max(1.0, std::abs(S))) ++out.positivity_violations;
        cplx e = std::exp(-f.N * S);
        if (std::abs(e) > 1.0 + 1e-12) ++out.modulus_violations;
        w[i] = std::exp(cplx(0.0, -f.rho * eta.sum())) * e;
    }
    out.z = batch_mean(w);
    out.z.seed = seed;
    out.z.ess = effective_sample_size(w);
    out.z.unreliable = out.z.ess < 10.0;
    return out;
}

}  // namespace bosegas
