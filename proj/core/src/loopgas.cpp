#include "bosegas/loopgas.hpp"

#include <algorithm>
#include <cmath>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

void check_samples(std::size_t n) {
    if (n < 256) throw DomainError("loop-gas estimators need at least 256 samples");
}

// (N Q)^n / n!, with 0^0 = 1
std::vector<double> poisson_terms(double x, int n_max) {
    std::vector<double> c(static_cast<std::size_t>(n_max) + 1);
    c[0] = 1.0;
    for (int n = 1; n <= n_max; ++n) c[static_cast<std::size_t>(n)] = c[static_cast<std::size_t>(n) - 1] * x / n;
    return c;
}

double rho_constant(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v) {
    double c = counterterm(p, g);
    double vol = g.is_lattice() ? g.sites() : g.circumference;
    return -0.5 * p.lambda() * c * c * vol * v.total();
}

double transition(const TorusGeometry& g, double T, double x, double y) {
    if (g.is_lattice()) return heat_kernel_row(g, T)[static_cast<std::size_t>(g.diff(int(x), int(y)))];
    return heat_density(g, T, x, y);
}

}  // namespace

IdealTails ideal_tails(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid, const LoopTruncation& t) {
    IdealTails out;
    double Q = 0.0;
    for (int l = 1; l <= t.l_max; ++l) Q += loop_activity_term(g, grid.nu, p.kappa0, l);
    double x = p.N * Q, partial = 0.0, term = 1.0;
    for (int n = 0; n <= t.n_max; ++n) {
        if (n > 0) term *= x / n;
        partial += term;
    }
    out.orders = 1.0 - partial * std::exp(-x);
    double omitted = 0.0;
    for (int l = t.l_max + 1; l < t.l_max + 10000; ++l) {
        double a = loop_activity_term(g, grid.nu, p.kappa0, l);
        omitted += a;
        if (a < 1e-17 * std::max(omitted, 1e-300) || a == 0.0) break;
    }
    out.windings = p.N * omitted;
    return out;
}

LoopGasResult xi_rel_series(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                            const TwoBodyPotential& v, const LoopTruncation& t, std::size_t samples,
                            std::uint64_t seed) {
    p.check();
    if (t.n_max < 0 || t.l_max < 1) throw DomainError("bad loop-gas truncation");
    double lam = p.lambda();
    double kap = kappa_rho(p, g, v);
    LoopActivity act(g, grid, kap, t.l_max);
    LoopActivity act0(g, grid, p.kappa0, t.l_max);

    LoopGasResult r;
    r.Q_rho = act.total();
    r.Q0 = act0.total();
    r.constant = rho_constant(p, g, v);
    auto tails = ideal_tails(p, g, grid, t);
    r.tail_orders = tails.orders;
    r.tail_windings = tails.windings;
    r.truncated = tails.orders + tails.windings > t.tail_tolerance;

    auto c = poisson_terms(p.N * r.Q_rho, t.n_max);
    auto c0 = poisson_terms(p.N * r.Q0, t.n_max);
    double D0 = 0.0;
    for (double x : c0) D0 += x;

    std::vector<double> E(c.size(), 1.0), E_err(c.size(), 0.0);
    double min_ess = 0.0;
    bool sampled = false;
    if (lam != 0.0) {
        check_samples(samples);
        for (int n = 1; n <= t.n_max; ++n) {
            Rng rng(stream_seed(seed, static_cast<std::uint64_t>(n)));
            std::vector<cplx> w(samples);
            std::vector<Path> loops(static_cast<std::size_t>(n));
            for (std::size_t i = 0; i < samples; ++i) {
                for (auto& l : loops) l = act.sample(rng);
                double S = interaction_matrix(loops, v, g, grid).sum();
                w[i] = std::exp(-lam / grid.nu * S);
            }
            auto e = batch_mean(w);
            E[static_cast<std::size_t>(n)] = e.value.real();
            E_err[static_cast<std::size_t>(n)] = e.stderr_re;
            double ess = effective_sample_size(w);
            min_ess = sampled ? std::min(min_ess, ess) : ess;
            sampled = true;
        }
    }

    auto q = poisson_terms(r.Q_rho, t.n_max);
    double raw = 0.0, raw_var = 0.0;
    for (std::size_t n = 0; n < c.size(); ++n) {
        // coefficient of N^n: Q^n/n! E_n
        double qn = q[n];
        r.coefficients.push_back(qn * E[n]);
        r.coefficient_err.push_back(qn * E_err[n]);
        raw += c[n] * E[n];
        raw_var += c[n] * c[n] * E_err[n] * E_err[n];
    }
    double pref = std::exp(r.constant) / D0;
    std::uint64_t total = sampled ? samples * static_cast<std::uint64_t>(t.n_max) : 0;

    r.raw.value = raw;
    r.raw.stderr_re = std::sqrt(raw_var);
    r.raw.n = total;
    r.raw.seed = seed;
    r.raw.ess = sampled ? min_ess : double(total);

    r.xi_rel = r.raw;
    r.xi_rel.value = pref * raw;
    r.xi_rel.stderr_re = pref * std::sqrt(raw_var);
    r.xi_rel.unreliable = sampled && min_ess < 10.0;
    return r;
}

LoopDuhamelResult duhamel_loopgas(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                                  const TwoBodyPotential& v, double tau, double x, double tau_prime,
                                  double x_prime, const LoopTruncation& t, std::size_t samples, std::uint64_t seed) {
    p.check();
    int j = grid.boundary_index(tau), jp = grid.boundary_index(tau_prime);
    if (j < 0 || jp < 0) throw DomainError("tau and tau' must be slice boundaries");
    if (j >= grid.n_tau || jp > j) throw DomainError("duhamel needs 0 <= tau' <= tau < nu");
    if (g.is_lattice()) {
        if (x != std::floor(x) || x_prime != std::floor(x_prime) || x < 0 || x_prime < 0 || x >= g.sites() ||
            x_prime >= g.sites())
            throw DomainError("site out of range");
    }
    double lam = p.lambda();
    double kap = kappa_rho(p, g, v);
    int m0 = j - jp;
    int l0_min = m0 == 0 ? 1 : 0;

    // open-path weights, summed until negligible
    std::vector<double> a0;
    double W0 = 0.0;
    int l0 = l0_min;
    const int cap = 400;
    LoopDuhamelResult r;
    for (;; ++l0) {
        double T = m0 * grid.eps + l0 * grid.nu;
        double a = std::exp(-kap * T) * transition(g, T, x, x_prime);
        a0.push_back(a);
        W0 += a;
        if (l0 >= t.l_max && (kap <= 0.0 || a < 1e-17 * W0)) break;
        if (l0 >= cap) {
            r.truncated = true;
            break;
        }
    }
    r.l0_max = l0;
    r.open_weight = W0;

    LoopActivity act(g, grid, kap, t.l_max);
    auto c = poisson_terms(p.N * act.total(), t.n_max);

    r.value.seed = seed;
    if (lam == 0.0) {
        r.value.value = W0;
        r.value.ess = 0.0;
        return r;
    }
    check_samples(samples);

    std::vector<double> cdf;
    double acc = 0.0;
    for (double a : a0) cdf.push_back(acc += a);
    int m_max = m0 + l0 * grid.n_tau;
    HeatKernelTable half;
    if (g.is_lattice()) half = HeatKernelTable(g, 0.5 * grid.eps, 2 * m_max);

    std::vector<std::vector<double>> A(c.size()), B(c.size());
    double num = 0.0, dsum = 0.0;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t n = 0; n < c.size(); ++n) {
        if (c[n] == 0.0) continue;
        Rng rng(stream_seed(seed, 1000 + n));
        std::vector<Path> paths(n + 1);
        A[n].resize(samples);
        B[n].resize(samples);
        for (std::size_t i = 0; i < samples; ++i) {
            double r_ = unif(rng) * W0;
            auto k = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), r_) - cdf.begin());
            k = std::min(k, static_cast<int>(cdf.size()) - 1);
            int m = m0 + (l0_min + k) * grid.n_tau;
            paths[0] = make_open_path(g, g.is_lattice() ? &half : nullptr, grid, jp, m, x_prime, x, rng);
            paths[0].winding = l0_min + k;
            for (std::size_t q = 1; q <= n; ++q) paths[q] = act.sample(rng);
            Eigen::MatrixXd V = interaction_matrix(paths, v, g, grid);
            double s_all = V.sum();
            double s_loops = n > 0 ? V.bottomRightCorner(Eigen::Index(n), Eigen::Index(n)).sum() : 0.0;
            A[n][i] = std::exp(-lam / grid.nu * s_all);
            B[n][i] = std::exp(-lam / grid.nu * s_loops);
        }
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            ma += A[n][i];
            mb += B[n][i];
        }
        num += c[n] * W0 * ma / double(samples);
        dsum += c[n] * mb / double(samples);
    }
    double G = num / dsum;
    // linearised ratio, batch errors per order
    double var = 0.0;
    std::uint64_t total = 0;
    for (std::size_t n = 0; n < c.size(); ++n) {
        if (A[n].empty()) continue;
        std::vector<cplx> z(samples);
        for (std::size_t i = 0; i < samples; ++i) z[i] = c[n] * (W0 * A[n][i] - G * B[n][i]) / dsum;
        double se = batch_mean(z).stderr_re;
        var += se * se;
        total += samples;
    }
    r.value.value = G;
    r.value.stderr_re = std::sqrt(var);
    r.value.n = total;
    r.value.ess = double(total);
    return r;
}

// ---------------------------------------------------------------- Symanzik

SymanzikParams symanzik_params(const FieldParams& f, const TorusGeometry& g, const TwoBodyPotential& v,
                               double delta, int n_max) {
    if (!(delta > 0.0)) throw DomainError("symanzik needs delta > 0");
    if (!g.is_lattice()) throw UnsupportedModeError("symanzik series is lattice only");
    if (!(f.kappa0 > 0.0)) throw DomainError("symanzik needs kappa0 > 0");
    if (n_max < 0) throw DomainError("n_max must be >= 0");
    SymanzikParams s;
    s.delta = delta;
    s.n_max = n_max;
    double c = 0.0;
    for (double e : laplacian_eigenvalues(g)) {
        double h = -0.5 * e + f.kappa0;
        c += std::exp(-delta * h) / h;
    }
    c /= g.sites();
    s.theta_delta = -c;
    s.g = f.lambda0 / (f.N + 1.0);
    s.shift = f.N * c + f.rho;
    s.kappa_delta = f.kappa0 - s.g * s.shift * v.total();
    s.constant = -0.5 * s.g * s.shift * s.shift * g.sites() * v.total();
    return s;
}

DurationLaw::DurationLaw(const TorusGeometry& g, double kappa, double delta, int points) {
    if (!(kappa > 0.0)) throw DomainError("duration law needs a positive killing rate");
    if (!(delta > 0.0)) throw DomainError("duration law needs delta > 0");
    if (points < 16) throw DomainError("duration grid too coarse");
    double t_max = std::max(20.0 * delta, (std::log(double(g.sites())) + 45.0) / kappa);
    double a = std::log(delta), b = std::log(t_max), h = (b - a) / (points - 1);
    s_.resize(static_cast<std::size_t>(points));
    f_.resize(s_.size());
    cdf_.resize(s_.size());
    for (int i = 0; i < points; ++i) {
        double s = a + i * h, T = std::exp(s);
        s_[static_cast<std::size_t>(i)] = s;
        f_[static_cast<std::size_t>(i)] = std::exp(-kappa * T) * g.sites() * heat_kernel_row(g, T)[0];
    }
    cdf_[0] = 0.0;
    for (std::size_t i = 1; i < s_.size(); ++i) cdf_[i] = cdf_[i - 1] + 0.5 * h * (f_[i - 1] + f_[i]);
    total_ = cdf_.back();
}

double DurationLaw::sample(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double r = unif(rng) * total_;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), r);
    std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), 1, s_.size() - 1) - 1;
    double h = s_[i + 1] - s_[i];
    double target = r - cdf_[i];
    double f0 = f_[i], slope = (f_[i + 1] - f_[i]) / (2.0 * h);
    // f0 x + slope x^2 = target
    double x = 2.0 * target / (f0 + std::sqrt(std::max(0.0, f0 * f0 + 4.0 * slope * target)));
    x = std::clamp(x, 0.0, h);
    return std::exp(s_[i] + x);
}

std::vector<double> sample_local_times(const TorusGeometry& g, int u, double T, Rng& rng) {
    std::vector<double> L(static_cast<std::size_t>(g.sites()), 0.0);
    if (g.sites() == 1) {
        L[0] = T;
        return L;
    }
    // jumps at total rate d, direction uniform among the 2d neighbours
    std::poisson_distribution<int> jumps(g.d * T);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> dir(0, 2 * g.d - 1);
    std::vector<double> times;
    for (int attempt = 0; attempt < 1000000; ++attempt) {
        int k = jumps(rng);
        times.resize(static_cast<std::size_t>(k));
        for (auto& t : times) t = unif(rng) * T;
        std::sort(times.begin(), times.end());
        std::fill(L.begin(), L.end(), 0.0);
        int x = u;
        double last = 0.0;
        for (double t : times) {
            L[static_cast<std::size_t>(x)] += t - last;
            last = t;
            int d = dir(rng);
            x = g.shift(x, d / 2, (d % 2) ? 1 : -1);
        }
        L[static_cast<std::size_t>(x)] += T - last;
        if (x == u) return L;
    }
    throw UnreachableEndpoint("random-walk loop did not close");
}

double symanzik_V0(const std::vector<double>& a, const std::vector<double>& b, const TwoBodyPotential& v,
                   const TorusGeometry& g) {
    double s = 0.0;
    for (int x = 0; x < g.sites(); ++x) {
        if (a[static_cast<std::size_t>(x)] == 0.0) continue;
        for (int y = 0; y < g.sites(); ++y) s += a[static_cast<std::size_t>(x)] * v(g, x, y) * b[static_cast<std::size_t>(y)];
    }
    return 0.5 * s;
}

SymanzikResult symanzik_series(const FieldParams& f, const TorusGeometry& g, const TwoBodyPotential& v,
                               const SymanzikParams& sym, std::size_t samples, std::uint64_t seed) {
    if (!(sym.delta > 0.0)) throw DomainError("symanzik needs delta > 0");
    DurationLaw law(g, sym.kappa_delta, sym.delta, sym.grid_points);
    DurationLaw law0(g, f.kappa0, sym.delta, sym.grid_points);
    SymanzikResult r;
    r.Q_delta = law.total();
    r.Q0 = law0.total();
    auto c = poisson_terms(f.N * r.Q_delta, sym.n_max);
    for (double x : c) r.raw_ideal += x;

    double pref = std::exp(sym.constant - f.N * r.Q0);
    double sum = c[0], var = 0.0;
    std::uint64_t total = 0;
    double min_ess = double(samples);
    if (sym.g != 0.0 && v.total() != 0.0) {
        check_samples(samples);
        std::uniform_int_distribution<int> site(0, g.sites() - 1);
        Eigen::MatrixXd Vm = v.matrix(g);
        for (int n = 1; n <= sym.n_max; ++n) {
            if (c[static_cast<std::size_t>(n)] == 0.0) break;
            Rng rng(stream_seed(seed, 2000 + static_cast<std::uint64_t>(n)));
            std::vector<cplx> w(samples);
            Eigen::VectorXd Ltot(g.sites());
            for (std::size_t i = 0; i < samples; ++i) {
                Ltot.setZero();
                for (int q = 0; q < n; ++q) {
                    double T = law.sample(rng);
                    auto L = sample_local_times(g, site(rng), T, rng);
                    for (int x = 0; x < g.sites(); ++x) Ltot(x) += L[static_cast<std::size_t>(x)];
                }
                // sum_{ij} V0 = 1/2 Ltot' v Ltot
                w[i] = std::exp(-sym.g * 0.5 * Ltot.dot(Vm * Ltot));
            }
            auto e = batch_mean(w);
            sum += c[static_cast<std::size_t>(n)] * e.value.real();
            var += c[static_cast<std::size_t>(n)] * c[static_cast<std::size_t>(n)] * e.stderr_re * e.stderr_re;
            total += samples;
            min_ess = std::min(min_ess, effective_sample_size(w));
        }
    } else {
        for (int n = 1; n <= sym.n_max; ++n) sum += c[static_cast<std::size_t>(n)];
    }
    r.z.value = pref * sum;
    r.z.stderr_re = pref * std::sqrt(var);
    r.z.n = total;
    r.z.seed = seed;
    r.z.ess = min_ess;
    r.z.unreliable = total > 0 && min_ess < 10.0;
    return r;
}

}  // namespace bosegas
