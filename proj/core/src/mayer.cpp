#include "bosegas/mayer.hpp"

#include <cmath>
#include <numeric>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

std::vector<Edge> all_pairs(int n) {
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return e;
}

int find(std::vector<int>& parent, int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
}

double rho_constant(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v) {
    double c = counterterm(p, g);
    double vol = g.is_lattice() ? g.sites() : g.circumference;
    return -0.5 * p.lambda() * c * c * vol * v.total();
}

}  // namespace

std::vector<ClusterGraph> enumerate_connected(int n) {
    if (n < 1) throw DomainError("graph size must be positive");
    if (n > 5) throw CapacityError("graph enumeration is limited to n <= 5");
    auto pairs = all_pairs(n);
    std::vector<ClusterGraph> out;
    std::uint32_t limit = 1u << pairs.size();
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        // Kruskal over edges in lexicographic order gives the lex-min spanning tree
        std::vector<int> parent(static_cast<std::size_t>(n));
        std::iota(parent.begin(), parent.end(), 0);
        ClusterGraph gr;
        gr.n = n;
        gr.mask = mask;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            if (!(mask & (1u << k))) continue;
            gr.edges.push_back(pairs[k]);
            int a = find(parent, pairs[k].first), b = find(parent, pairs[k].second);
            if (a != b) {
                parent[static_cast<std::size_t>(a)] = b;
                gr.tree.push_back(pairs[k]);
            }
        }
        if (static_cast<int>(gr.tree.size()) == n - 1) out.push_back(std::move(gr));
    }
    return out;
}

double mayer_factor(const Path& a, const Path& b, const ModelParams& p, const TwoBodyPotential& v,
                    const TorusGeometry& g, const TimeGrid& grid) {
    double lv = p.lambda() / grid.nu;
    return std::expm1(-lv * (loop_interaction_Vnu(a, b, v, g, grid) + loop_interaction_Vnu(b, a, v, g, grid)));
}

UrsellEstimate ursell_coefficient(int n, const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                                  const TwoBodyPotential& v, int l_max, std::size_t samples, std::uint64_t seed) {
    p.check();
    auto graphs = enumerate_connected(n);
    double lam = p.lambda(), lv = lam / grid.nu;
    LoopActivity act(g, grid, kappa_rho(p, g, v), l_max);

    UrsellEstimate u;
    u.n = n;
    u.Q = act.total();
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    double pref = std::pow(p.N * u.Q, double(n)) / fact;
    int max_edges = n * (n - 1) / 2;
    u.by_edges.assign(static_cast<std::size_t>(max_edges) + 1, 0.0);
    u.by_edges_err.assign(u.by_edges.size(), 0.0);
    u.b.seed = seed;
    u.tree_bound.seed = seed;

    if (lam == 0.0) {
        if (n == 1) {
            u.b.value = pref;
            u.by_edges[0] = pref;
        }
        return u;
    }
    if (samples < 256) throw DomainError("mayer estimators need at least 256 samples");

    Rng rng(stream_seed(seed, 3000 + static_cast<std::uint64_t>(n)));
    std::vector<cplx> w(samples), tb(samples);
    std::vector<std::vector<cplx>> we(u.by_edges.size(), std::vector<cplx>(samples));
    std::vector<Path> loops(static_cast<std::size_t>(n));
    Eigen::MatrixXd G(n, n);
    for (std::size_t s = 0; s < samples; ++s) {
        for (auto& l : loops) l = act.sample(rng);
        Eigen::MatrixXd V = interaction_matrix(loops, v, g, grid);
        double self = 1.0;
        for (int i = 0; i < n; ++i) self *= std::exp(-lv * V(i, i));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) G(i, j) = mayer_factor_from_V(lv, V(i, j));
        double sum = 0.0, tree_sum = 0.0;
        std::vector<double> per_e(u.by_edges.size(), 0.0);
        for (const auto& gr : graphs) {
            double t = 1.0;
            for (auto [i, j] : gr.edges) t *= G(i, j);
            double tt = 1.0;
            for (auto [i, j] : gr.tree) tt *= std::abs(G(i, j));
            if (std::abs(t) > tt * (1.0 + 1e-12) + 1e-300) ++u.majorization_violations;
            sum += t;
            per_e[gr.edges.size()] += t;
            if (gr.edges.size() == gr.tree.size()) tree_sum += tt;
        }
        w[s] = self * sum;
        tb[s] = self * tree_sum;
        for (std::size_t e = 0; e < per_e.size(); ++e) we[e][s] = self * per_e[e];
    }
    auto eb = batch_mean(w);
    u.b = eb;
    u.b.value *= pref;
    u.b.stderr_re *= pref;
    u.b.stderr_im = 0.0;
    u.b.seed = seed;
    u.b.ess = double(samples);
    auto et = batch_mean(tb);
    u.tree_bound = et;
    u.tree_bound.value *= pref;
    u.tree_bound.stderr_re *= pref;
    u.tree_bound.stderr_im = 0.0;
    u.tree_bound.seed = seed;
    for (std::size_t e = 0; e < we.size(); ++e) {
        auto x = batch_mean(we[e]);
        u.by_edges[e] = pref * x.value.real();
        u.by_edges_err[e] = pref * x.stderr_re;
    }
    return u;
}

MayerSeries mayer_series(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                         const TwoBodyPotential& v, int n_max, int l_max, std::size_t samples, std::uint64_t seed) {
    if (n_max < 1 || n_max > 5) throw CapacityError("mayer series is limited to 1 <= n <= 5");
    MayerSeries m;
    m.constant = rho_constant(p, g, v);
    m.ideal = p.N * LoopActivity(g, grid, p.kappa0, l_max).total();
    double sum = m.constant - m.ideal, var = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        m.terms.push_back(ursell_coefficient(n, p, g, grid, v, l_max, samples, seed));
        sum += m.terms.back().b.value.real();
        var += std::pow(m.terms.back().b.stderr_re, 2);
        m.log_xi_rel.push_back(sum);
        m.log_xi_rel_err.push_back(std::sqrt(var));
    }
    return m;
}

NPolynomial n_polynomial(const ModelParams& p, const TorusGeometry& g, const TimeGrid& grid,
                         const TwoBodyPotential& v, int n_max, int l_max, std::size_t samples, std::uint64_t seed) {
    if (n_max < 1 || n_max > 5) throw CapacityError("n_polynomial is limited to 1 <= n <= 5");
    NPolynomial out;
    out.mode = p.coupling;
    out.lambda = p.lambda();
    // c_n is b_n / N^n, evaluated with N = 1 weights at the same lambda and kappa
    ModelParams q = p;
    double kap = kappa_rho(p, g, v);
    q.coupling = CouplingMode::fixed;
    q.lambda0 = p.lambda();
    q.N = 1.0;
    q.kappa0 = kap;
    q.rho_mode = RhoMode::explicit_value;
    q.rho_value = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        auto u = ursell_coefficient(n, q, g, grid, v, l_max, samples, seed);
        out.c.push_back(u.b.value.real());
        out.c_err.push_back(u.b.stderr_re);
        out.by_edges.push_back(u.by_edges);
    }
    return out;
}

}  // namespace bosegas
