#include "bosegas/limits.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "bosegas/errors.hpp"
#include "bosegas/hs.hpp"
#include "bosegas/mayer.hpp"
#include "bosegas/meanfield.hpp"

namespace bosegas {

namespace {

struct Nodes {
    std::vector<double> x, w;
};

// composite 4-point Gauss-Legendre on [0, L)
Nodes gl_nodes(double L, int panels) {
    using rule = boost::math::quadrature::gauss<double, 4>;
    Nodes n;
    double h = L / panels;
    for (int p = 0; p < panels; ++p) {
        double mid = (p + 0.5) * h;
        const auto& a = rule::abscissa();
        const auto& w = rule::weights();
        for (std::size_t i = 0; i < a.size(); ++i) {
            // the rule stores non-negative abscissae; zero appears once
            n.x.push_back(mid + 0.5 * h * a[i]);
            n.w.push_back(0.5 * h * w[i]);
            if (a[i] != 0.0) {
                n.x.push_back(mid - 0.5 * h * a[i]);
                n.w.push_back(0.5 * h * w[i]);
            }
        }
    }
    return n;
}

// integral over u_2..u_n of the n-point Boltzmann factor with u_1 = 0,
// summed over multisets of quadrature nodes
double fixed_point_integral(int n, const Nodes& nd, const Eigen::MatrixXd& vm, const Eigen::VectorXd& v_to_0,
                            double v0, double lambda0) {
    if (n == 1) return std::exp(-0.5 * lambda0 * v0);
    int M = static_cast<int>(nd.x.size());
    int k = n - 1;
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    double total = 0.0;
    // iterative nondecreasing tuples
    std::vector<double> pair(static_cast<std::size_t>(k) + 1, 0.0), weight(static_cast<std::size_t>(k) + 1, 1.0),
        coef(static_cast<std::size_t>(k) + 1, 1.0);
    std::vector<int> run(static_cast<std::size_t>(k) + 1, 0);
    int depth = 0;
    idx[0] = 0;
    while (depth >= 0) {
        if (idx[static_cast<std::size_t>(depth)] >= M) {
            --depth;
            if (depth >= 0) ++idx[static_cast<std::size_t>(depth)];
            continue;
        }
        int j = idx[static_cast<std::size_t>(depth)];
        auto d = static_cast<std::size_t>(depth);
        double add = v_to_0(j);
        for (int q = 0; q < depth; ++q) add += vm(j, idx[static_cast<std::size_t>(q)]);
        pair[d + 1] = pair[d] + add;
        weight[d + 1] = weight[d] * nd.w[static_cast<std::size_t>(j)];
        run[d + 1] = (depth > 0 && idx[d - 1] == j) ? run[d] + 1 : 1;
        coef[d + 1] = coef[d] / run[d + 1];
        if (depth == k - 1) {
            total += fact * coef[d + 1] * weight[d + 1] * std::exp(-0.5 * lambda0 * (n * v0 + 2.0 * pair[d + 1]));
            ++idx[d];
        } else {
            ++depth;
            idx[static_cast<std::size_t>(depth)] = j;
        }
    }
    return total;
}

}  // namespace

ClassicalXi classical_xi(double z, double lambda0, double N, const TorusGeometry& g, const TwoBodyPotential& v,
                         int n_max, double tol) {
    if (n_max < 0 || n_max > 8) throw CapacityError("classical_xi is limited to n_max <= 8");
    if (!(z > 0.0)) throw DomainError("activity must be positive");
    ClassicalXi r;
    double vol = g.is_lattice() ? double(g.sites()) : g.circumference;
    double zN = z * N;
    double v0 = g.is_lattice() ? v.at(0) : v.on_circle(0.0);
    r.terms.push_back(1.0);
    r.nodes.push_back(0);
    double total = 1.0, pw = 1.0;
    for (int n = 1; n <= n_max; ++n) {
        pw *= zN / n;
        double integral;
        if (g.is_lattice()) {
            Nodes nd;
            for (int x = 0; x < g.sites(); ++x) {
                nd.x.push_back(x);
                nd.w.push_back(1.0);
            }
            Eigen::MatrixXd vm = v.matrix(g);
            Eigen::VectorXd to0 = vm.col(0);
            integral = n == 1 ? std::exp(-0.5 * lambda0 * v0)
                              : fixed_point_integral(n, nd, vm, to0, v0, lambda0);
            r.nodes.push_back(g.sites());
        } else {
            auto eval = [&](int panels) {
                Nodes nd = gl_nodes(g.circumference, panels);
                auto M = static_cast<Eigen::Index>(nd.x.size());
                Eigen::MatrixXd vm(M, M);
                Eigen::VectorXd to0(M);
                for (Eigen::Index i = 0; i < M; ++i) {
                    to0(i) = v.on_circle(nd.x[static_cast<std::size_t>(i)]);
                    for (Eigen::Index j = 0; j < M; ++j)
                        vm(i, j) = v.on_circle(nd.x[static_cast<std::size_t>(i)] - nd.x[static_cast<std::size_t>(j)]);
                }
                return fixed_point_integral(n, nd, vm, to0, v0, lambda0);
            };
            int panels = 1;
            double prev = eval(panels);
            integral = prev;
            if (n > 1) {
                for (;;) {
                    panels *= 2;
                    integral = eval(panels);
                    if (std::abs(integral - prev) * vol * pw < tol * total) break;
                    if (panels >= 64) {
                        r.truncated = true;
                        break;
                    }
                    prev = integral;
                }
            }
            r.nodes.push_back(4 * panels);
        }
        double term = pw * vol * integral;
        r.terms.push_back(term);
        total += term;
    }
    r.value = total;
    double x = zN * vol, partial = 0.0, t = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        if (n) t *= x / n;
        partial += t;
    }
    r.tail = std::exp(x) - partial;
    if (r.tail > 1e-6 * r.value) r.truncated = true;
    return r;
}

double activity_to_kappa(double z, double nu, int d) {
    if (!(z > 0.0) || !(nu > 0.0)) throw DomainError("activity and nu must be positive");
    return -std::log(z * std::pow(nu, 0.5 * d)) / nu;
}

bool decreasing_beyond_errors(const std::vector<SweepPoint>& pts, double sigmas) {
    if (pts.size() < 2) return false;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        double e = std::hypot(pts[k].discrepancy_err, pts[k + 1].discrepancy_err);
        if (!(std::abs(pts[k + 1].discrepancy) + sigmas * e < std::abs(pts[k].discrepancy))) return false;
    }
    return true;
}

LimitSweep classical_limit_sweep(const ClassicalSweepConfig& c, const TwoBodyPotential& v, std::size_t samples,
                                 std::uint64_t seed) {
    for (std::size_t k = 1; k < c.nu_list.size(); ++k)
        if (!(c.nu_list[k] < c.nu_list[k - 1])) throw DomainError("nu list must be strictly decreasing");
    auto circ = TorusGeometry::circle(c.L);
    LimitSweep out;
    out.parameter_name = "nu";
    double z_cl = c.z / std::sqrt(2.0 * std::numbers::pi);
    auto ref = classical_xi(z_cl, c.lambda0, 1.0, circ, v, c.n_max);
    out.note = "classical activity z (2 pi)^{-1/2}";
    for (std::size_t k = 0; k < c.nu_list.size(); ++k) {
        double nu = c.nu_list[k];
        ModelParams p;
        p.nu = nu;
        p.kappa0 = activity_to_kappa(c.z, nu, 1);
        p.lambda0 = c.lambda0;
        p.N = 1.0;
        TimeGrid grid(nu, c.n_tau);
        LoopTruncation t;
        t.n_max = c.n_max;
        t.l_max = c.l_max;
        auto r = xi_rel_series(p, circ, grid, v, t, samples, stream_seed(seed, k));
        SweepPoint pt;
        pt.parameter = nu;
        pt.estimate = r.raw;
        pt.reference = ref.value;
        pt.discrepancy = r.raw.value.real() / ref.value - 1.0;
        pt.discrepancy_err = r.raw.stderr_re / ref.value;
        pt.flagged = r.raw.unreliable || r.truncated;
        out.points.push_back(pt);
    }
    out.decreasing = decreasing_beyond_errors(out.points);
    out.final_ok = !out.points.empty() && std::abs(out.points.back().discrepancy) < c.tolerance;
    return out;
}

SaddleState saddle_point(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v) {
    if (!(p.kappa0 > 0.0)) throw DomainError("saddle needs kappa0 > 0");
    double rho = resolve_rho(p, g);
    double A = p.lambda0 * p.N / (p.N + 1.0) * v.total();
    auto F = [&](double s) { return s - A * (p.nu * ideal_occupation(g, p.nu, p.kappa0 + s) - rho); };
    SaddleState st;
    if (A == 0.0) {
        st.kappa_ren = p.kappa0;
        return st;
    }
    double lo = -p.kappa0 + 1e-6;
    double hi = std::max(1.0, std::abs(F(0.0)) + 1.0);
    if (F(lo) > 0.0) throw RootNotFound("saddle equation has no sign change above -kappa0");
    int expand = 0;
    while (F(hi) < 0.0) {
        hi *= 2.0;
        if (++expand > 200) throw RootNotFound("saddle bracket did not close");
    }
    std::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    auto [a, b] = boost::math::tools::toms748_solve(F, lo, hi, tol, iters);
    double s = std::abs(F(a)) < std::abs(F(b)) ? a : b;
    st.s = s;
    st.kappa_ren = p.kappa0 + s;
    st.residual = std::abs(F(s));
    st.iterations = static_cast<int>(iters);
    return st;
}

LargeNSweep largeN_check(const ModelParams& base, const TorusGeometry& g, const TimeGrid& grid,
                         const TwoBodyPotential& v, const LargeNConfig& c, std::size_t samples, std::uint64_t seed) {
    for (std::size_t k = 1; k < c.N_list.size(); ++k)
        if (!(c.N_list[k] > c.N_list[k - 1])) throw DomainError("N list must be increasing");
    LargeNSweep out;
    out.sweep.parameter_name = "N";
    for (std::size_t k = 0; k < c.N_list.size(); ++k) {
        ModelParams p = base;
        p.N = c.N_list[k];
        p.coupling = CouplingMode::meanfield;
        auto st = saddle_point(p, g, v);
        double ref = free_green(g, p.nu, st.kappa_ren)(c.x, c.y);
        auto e = estimate_duhamel(p, g, grid, v, 0.0, c.x, 0.0, c.y, samples, stream_seed(seed, k));
        SweepPoint pt;
        pt.parameter = p.N;
        pt.estimate = e;
        pt.reference = ref;
        pt.discrepancy = e.value.real() - ref;
        pt.discrepancy_err = e.stderr_re;
        pt.flagged = e.unreliable;
        out.sweep.points.push_back(pt);
        out.kappa_ren.push_back(st.kappa_ren);
        if (c.mayer_samples > 0) {
            auto u = ursell_coefficient(3, p, g, grid, v, 4, c.mayer_samples, stream_seed(seed, 100 + k));
            out.nontree_ratio.push_back(std::abs(u.by_edges[3]) / std::max(1e-300, std::abs(u.by_edges[2])));
        }
    }
    auto& pts = out.sweep.points;
    out.sweep.decreasing = pts.size() >= 2 &&
                           std::abs(pts.back().discrepancy) +
                                   std::hypot(pts.back().discrepancy_err, pts.front().discrepancy_err) <
                               std::abs(pts.front().discrepancy);
    out.sweep.final_ok = !pts.empty() && std::abs(pts.back().discrepancy) <= 3.0 * pts.back().discrepancy_err;
    return out;
}

MeanfieldSweep meanfield_sweep(const MeanfieldSweepConfig& c, const TorusGeometry& g, const TwoBodyPotential& v,
                               std::size_t samples, std::uint64_t seed) {
    for (std::size_t k = 1; k < c.nu_list.size(); ++k)
        if (!(c.nu_list[k] < c.nu_list[k - 1])) throw DomainError("nu list must be strictly decreasing");
    MeanfieldSweep out;
    out.sweep.parameter_name = "nu";
    // quantum lambda = lambda0 nu^2 at N = 1 pairs with g = lambda0 in the field functional
    out.field_lambda0 = 2.0 * c.lambda0;
    FieldParams f;
    f.kappa0 = c.kappa0;
    f.lambda0 = out.field_lambda0;
    f.N = 1.0;
    f.rho = 0.0;
    double field, field_err = 0.0;
    if (g.sites() == 1) {
        auto a = single_site_field(f, v.at(0));
        auto b = single_site_field_eta(f, v.at(0));
        field = a.phi2;
        out.field_check = std::abs(a.phi2 - b.phi2);
    } else {
        auto m = sample_gibbs_field(f, g, v, std::max<std::size_t>(samples, 4096), stream_seed(seed, 999));
        field = m.two_point.value.real();
        field_err = m.two_point.stderr_re;
        out.field_check = std::nan("");
    }
    for (std::size_t k = 0; k < c.nu_list.size(); ++k) {
        double nu = c.nu_list[k];
        ModelParams p;
        p.nu = nu;
        p.kappa0 = c.kappa0;
        p.lambda0 = c.lambda0 * nu * nu;
        p.coupling = CouplingMode::fixed;
        p.N = 1.0;
        p.rho_mode = RhoMode::wick;
        int n_tau = std::max(1, static_cast<int>(std::lround(nu / c.eps)));
        TimeGrid grid(nu, n_tau);
        auto e = estimate_duhamel(p, g, grid, v, 0.0, 0, 0.0, 0, samples, stream_seed(seed, k));
        SweepPoint pt;
        pt.parameter = nu;
        pt.estimate = e;
        pt.estimate.value *= nu;
        pt.estimate.stderr_re *= nu;
        pt.estimate.stderr_im *= nu;
        pt.reference = field;
        pt.reference_err = field_err;
        pt.discrepancy = nu * e.value.real() - field;
        pt.discrepancy_err = std::hypot(nu * e.stderr_re, field_err);
        pt.flagged = e.unreliable;
        out.sweep.points.push_back(pt);
    }
    out.sweep.decreasing = decreasing_beyond_errors(out.sweep.points);
    out.sweep.final_ok = out.sweep.decreasing;
    return out;
}

}  // namespace bosegas
