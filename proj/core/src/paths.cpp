#include "bosegas/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bosegas/errors.hpp"

namespace bosegas {

HeatKernelTable::HeatKernelTable(const TorusGeometry& g, double h, int k_max) : geom_(g), h_(h) {
    if (!g.is_lattice()) throw UnsupportedModeError("heat kernel table needs lattice mode");
    rows_.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) rows_.push_back(heat_kernel_row(g, k * h));
}

int HeatKernelTable::steps_for(double t) const {
    double k = t / h_;
    long r = std::lround(k);
    if (std::abs(k - double(r)) > 1e-9 * std::max(1.0, k)) throw DomainError("time is not on the kernel grid");
    if (r > k_max()) throw DomainError("time beyond the kernel table");
    return static_cast<int>(r);
}

std::vector<int> sample_lattice_bridge(const TorusGeometry& g, const HeatKernelTable& table, int x, int y,
                                       const std::vector<double>& times, Rng& rng) {
    int n = g.sites();
    std::vector<int> ks;
    ks.reserve(times.size());
    for (double t : times) ks.push_back(table.steps_for(t));
    int K = ks.back();
    if (table(K, x, y) < 1e-300) throw UnreachableEndpoint("bridge endpoint has zero transition probability");
    std::vector<int> out(times.size());
    out[0] = x;
    out.back() = y;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> w(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i + 2 < times.size(); ++i) {
        int cur = out[i];
        int step = ks[i + 1] - ks[i], rest = K - ks[i + 1];
        double tot = 0.0;
        for (int z = 0; z < n; ++z) {
            w[static_cast<std::size_t>(z)] = table(step, cur, z) * table(rest, z, y);
            tot += w[static_cast<std::size_t>(z)];
        }
        double r = unif(rng) * tot, acc = 0.0;
        int pick = n - 1;
        for (int z = 0; z < n; ++z) {
            acc += w[static_cast<std::size_t>(z)];
            if (r < acc) {
                pick = z;
                break;
            }
        }
        out[i + 1] = pick;
    }
    return out;
}

std::vector<double> sample_circle_bridge(double L, double x, double y, const std::vector<double>& times, Rng& rng) {
    double T = times.back();
    double dx = std::remainder(y - x, L);
    // winding sector
    std::vector<double> sector_w;
    std::vector<int> sector;
    double tot = 0.0;
    for (int w = 0;; ++w) {
        bool any = false;
        for (int s : {w, -w}) {
            if (w == 0 && s != 0) continue;
            double p = heat_density_winding(L, T, dx, s);
            if (p > 1e-18 || w == 0) {
                sector.push_back(s);
                sector_w.push_back(p);
                tot += p;
                any = true;
            }
        }
        if (!any && w > 0) break;
    }
    if (!(tot > 0.0)) throw UnreachableEndpoint("circle bridge has zero density");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double r = unif(rng) * tot, acc = 0.0;
    int w = sector.back();
    for (std::size_t i = 0; i < sector.size(); ++i) {
        acc += sector_w[i];
        if (r < acc) {
            w = sector[i];
            break;
        }
    }
    double target = x + dx + w * L;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> out(times.size());
    double cur = x;
    out[0] = x;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        double s = T - times[i], d = times[i + 1] - times[i];
        if (i + 2 == times.size()) {
            cur = target;
        } else {
            double mean = cur + d / s * (target - cur);
            double var = d * (s - d) / s;
            cur = mean + std::sqrt(var) * gauss(rng);
        }
        out[i + 1] = cur;
    }
    for (auto& c : out) {
        c = std::fmod(c, L);
        if (c < 0.0) c += L;
    }
    return out;
}

BridgeSample sample_bridge(const TorusGeometry& g, double x, double y, double T, const TimeGrid& grid,
                           std::uint64_t seed) {
    Rng rng(seed);
    long steps = std::lround(T / grid.eps);
    if (g.is_lattice() && std::abs(T / grid.eps - double(steps)) > 1e-9)
        throw DomainError("lattice bridge duration must be a multiple of eps");
    if (!(T > 0.0)) throw DomainError("bridge duration must be positive");
    std::vector<double> times;
    if (g.is_lattice() || std::abs(T / grid.eps - double(steps)) <= 1e-9) {
        for (long k = 0; k <= steps; ++k) times.push_back(k * grid.eps);
        times.back() = T;
    } else {
        for (double t = 0.0; t < T - 1e-12; t += grid.eps) times.push_back(t);
        times.push_back(T);
    }
    BridgeSample b;
    if (g.is_lattice()) {
        HeatKernelTable table(g, grid.eps, static_cast<int>(steps));
        b.sites = sample_lattice_bridge(g, table, static_cast<int>(x), static_cast<int>(y), times, rng);
    } else {
        b.coords = sample_circle_bridge(g.circumference, x, y, times, rng);
    }
    return b;
}

Path make_loop(const TorusGeometry& g, const HeatKernelTable* table, const TimeGrid& grid, int l, double u,
               Rng& rng) {
    Path p;
    p.closed = true;
    p.winding = l;
    p.duration = l * grid.nu;
    int m = l * grid.n_tau;
    p.times.resize(static_cast<std::size_t>(m) + 1);
    for (int k = 0; k <= m; ++k) p.times[static_cast<std::size_t>(k)] = k * grid.eps;
    p.times.back() = p.duration;
    p.first_point = 0;
    p.n_points = m;
    p.start_slice = 0;
    if (g.is_lattice())
        p.sites = sample_lattice_bridge(g, *table, static_cast<int>(u), static_cast<int>(u), p.times, rng);
    else
        p.coords = sample_circle_bridge(g.circumference, u, u, p.times, rng);
    return p;
}

Path make_open_path(const TorusGeometry& g, const HeatKernelTable* table, const TimeGrid& grid, int j_prime,
                    int m, double x_prime, double x, Rng& rng) {
    if (m < 1) throw DomainError("open path needs a positive duration");
    Path p;
    p.closed = false;
    p.duration = m * grid.eps;
    p.times.resize(static_cast<std::size_t>(m) + 2);
    p.times[0] = 0.0;
    for (int k = 0; k < m; ++k) p.times[static_cast<std::size_t>(k) + 1] = (k + 0.5) * grid.eps;
    p.times.back() = p.duration;
    p.first_point = 1;
    p.n_points = m;
    p.start_slice = j_prime % grid.n_tau;
    if (g.is_lattice())
        p.sites = sample_lattice_bridge(g, *table, static_cast<int>(x_prime), static_cast<int>(x), p.times, rng);
    else
        p.coords = sample_circle_bridge(g.circumference, x_prime, x, p.times, rng);
    return p;
}

Eigen::MatrixXd slice_occupation(const Path& p, const TorusGeometry& g, const TimeGrid& grid) {
    Eigen::MatrixXd O = Eigen::MatrixXd::Zero(grid.n_tau, g.sites());
    for (int k = 0; k < p.n_points; ++k)
        O(p.slice_of(k, grid.n_tau), p.sites[static_cast<std::size_t>(p.first_point + k)]) += 1.0;
    return O;
}

double loop_interaction_Vnu(const Path& a, const Path& b, const TwoBodyPotential& v, const TorusGeometry& g,
                            const TimeGrid& grid) {
    if (a.times.size() >= 2 && b.times.size() >= 2) {
        double ea = a.closed ? a.times[1] - a.times[0] : a.times[2] - a.times[1];
        double eb = b.closed ? b.times[1] - b.times[0] : b.times[2] - b.times[1];
        if ((a.n_points > 1 && std::abs(ea - grid.eps) > 1e-12) || (b.n_points > 1 && std::abs(eb - grid.eps) > 1e-12))
            throw ShapeError("paths are not on the shared time grid");
    }
    if (g.is_lattice()) {
        Eigen::MatrixXd Oa = slice_occupation(a, g, grid), Ob = slice_occupation(b, g, grid);
        return 0.5 * grid.eps * (Oa * v.matrix(g)).cwiseProduct(Ob).sum();
    }
    std::vector<std::vector<double>> sa(static_cast<std::size_t>(grid.n_tau)), sb(static_cast<std::size_t>(grid.n_tau));
    for (int k = 0; k < a.n_points; ++k)
        sa[static_cast<std::size_t>(a.slice_of(k, grid.n_tau))].push_back(a.coords[static_cast<std::size_t>(a.first_point + k)]);
    for (int k = 0; k < b.n_points; ++k)
        sb[static_cast<std::size_t>(b.slice_of(k, grid.n_tau))].push_back(b.coords[static_cast<std::size_t>(b.first_point + k)]);
    double s = 0.0;
    for (int j = 0; j < grid.n_tau; ++j)
        for (double x : sa[static_cast<std::size_t>(j)])
            for (double y : sb[static_cast<std::size_t>(j)]) s += v.on_circle(x - y);
    return 0.5 * grid.eps * s;
}

Eigen::MatrixXd interaction_matrix(const std::vector<Path>& paths, const TwoBodyPotential& v,
                                   const TorusGeometry& g, const TimeGrid& grid) {
    auto n = static_cast<Eigen::Index>(paths.size());
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
    if (g.is_lattice()) {
        Eigen::MatrixXd Vm = v.matrix(g);
        std::vector<Eigen::MatrixXd> occ, vocc;
        for (const auto& p : paths) {
            occ.push_back(slice_occupation(p, g, grid));
            vocc.push_back(occ.back() * Vm);
        }
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j) {
                double x = 0.5 * grid.eps * vocc[static_cast<std::size_t>(i)].cwiseProduct(occ[static_cast<std::size_t>(j)]).sum();
                V(i, j) = x;
                V(j, i) = x;
            }
        return V;
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            double x = loop_interaction_Vnu(paths[static_cast<std::size_t>(i)], paths[static_cast<std::size_t>(j)], v, g, grid);
            V(i, j) = x;
            V(j, i) = x;
        }
    return V;
}

double loop_activity_term(const TorusGeometry& g, double nu, double kappa, int l) {
    double tr;
    if (g.is_lattice())
        tr = g.sites() * heat_kernel_row(g, l * nu)[0];
    else
        tr = g.circumference * heat_density(g, l * nu, 0.0, 0.0);
    return std::exp(-kappa * l * nu) / l * tr;
}

LoopActivity::LoopActivity(const TorusGeometry& g, const TimeGrid& grid, double kappa, int l_max)
    : geom_(g), grid_(grid), l_max_(l_max) {
    if (l_max < 1) throw DomainError("l_max must be >= 1");
    if (g.is_lattice()) table_ = HeatKernelTable(g, grid.eps, l_max * grid.n_tau);
    for (int l = 1; l <= l_max; ++l) {
        weights_.push_back(loop_activity_term(g, grid.nu, kappa, l));
        total_ += weights_.back();
        cdf_.push_back(total_);
    }
}

Path LoopActivity::sample(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double r = unif(rng) * total_;
    int l = static_cast<int>(std::upper_bound(cdf_.begin(), cdf_.end(), r) - cdf_.begin()) + 1;
    l = std::min(l, l_max_);
    double u;
    if (geom_.is_lattice()) {
        std::uniform_int_distribution<int> site(0, geom_.sites() - 1);
        u = site(rng);
    } else {
        u = unif(rng) * geom_.circumference;
    }
    return make_loop(geom_, geom_.is_lattice() ? &table_ : nullptr, grid_, l, u, rng);
}

}  // namespace bosegas
