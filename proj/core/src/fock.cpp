#include "bosegas/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bosegas/errors.hpp"

namespace bosegas {

std::size_t basis_size(int modes, int n_max) {
    // C(modes + n_max, n_max), saturating
    double c = 1.0;
    for (int i = 1; i <= n_max; ++i) c = c * double(modes + i) / double(i);
    if (c > 1e18) return std::numeric_limits<std::size_t>::max();
    return static_cast<std::size_t>(std::llround(c));
}

std::uint64_t OccupationBasis::key(const std::vector<std::uint8_t>& occ) const {
    std::uint64_t k = 0;
    for (auto o : occ) k = k * std::uint64_t(n_max + 1) + o;
    return k;
}

int OccupationBasis::find(const std::vector<std::uint8_t>& occ) const {
    auto it = lookup_.find(key(occ));
    return it == lookup_.end() ? -1 : it->second;
}

int OccupationBasis::find_sector(const std::vector<int>& numbers) const {
    auto it = sector_lookup_.find(numbers);
    return it == sector_lookup_.end() ? -1 : it->second;
}

int OccupationBasis::total(int state) const {
    int s = 0;
    for (auto o : states[static_cast<std::size_t>(state)]) s += o;
    return s;
}

int OccupationBasis::site_occupation(int state, int x) const {
    int s = 0;
    for (int a = 0; a < n_species; ++a) s += states[static_cast<std::size_t>(state)][static_cast<std::size_t>(x * n_species + a)];
    return s;
}

OccupationBasis make_basis(const TorusGeometry& g, int n_species, int n_max) {
    if (!g.is_lattice()) throw UnsupportedModeError("Fock oracle needs lattice mode");
    if (n_species < 1 || n_species > 2) throw UnsupportedModeError("Fock oracle supports 1 or 2 species");
    if (n_max < 0) throw DomainError("n_max must be >= 0");
    if (g.sites() > 4) throw CapacityError("Fock oracle is limited to 4 sites");
    if (n_max > 10) throw CapacityError("Fock oracle is limited to n_max <= 10");
    OccupationBasis b;
    b.geom = g;
    b.n_species = n_species;
    b.n_max = n_max;
    b.modes = g.sites() * n_species;
    std::size_t expected = basis_size(b.modes, n_max);
    if (expected > kMaxFockStates)
        throw CapacityError("Fock basis of " + std::to_string(expected) + " states exceeds the 2e5 limit");
    b.states.reserve(expected);

    std::vector<std::uint8_t> occ(static_cast<std::size_t>(b.modes), 0);
    auto rec = [&](auto&& self, int mode, int budget) -> void {
        if (mode == b.modes) {
            b.states.push_back(occ);
            return;
        }
        for (int k = 0; k <= budget; ++k) {
            occ[static_cast<std::size_t>(mode)] = static_cast<std::uint8_t>(k);
            self(self, mode + 1, budget - k);
        }
        occ[static_cast<std::size_t>(mode)] = 0;
    };
    rec(rec, 0, n_max);

    b.sector_of.resize(b.states.size());
    b.local_index.resize(b.states.size());
    for (std::size_t i = 0; i < b.states.size(); ++i) {
        b.lookup_[b.key(b.states[i])] = static_cast<int>(i);
        std::vector<int> numbers(static_cast<std::size_t>(n_species), 0);
        for (int m = 0; m < b.modes; ++m) numbers[static_cast<std::size_t>(m % n_species)] += b.states[i][static_cast<std::size_t>(m)];
        auto it = b.sector_lookup_.find(numbers);
        int s;
        if (it == b.sector_lookup_.end()) {
            s = static_cast<int>(b.sectors.size());
            b.sector_lookup_[numbers] = s;
            b.sectors.push_back({numbers, {}});
        } else {
            s = it->second;
        }
        b.sector_of[i] = s;
        b.local_index[i] = static_cast<int>(b.sectors[static_cast<std::size_t>(s)].members.size());
        b.sectors[static_cast<std::size_t>(s)].members.push_back(static_cast<int>(i));
    }
    for (const auto& s : b.sectors)
        if (s.members.size() > kMaxFockSector)
            throw CapacityError("Fock sector of " + std::to_string(s.members.size()) +
                                " states exceeds the dense eigensolver limit");
    return b;
}

double TruncatedOperator::hermiticity_residual() const {
    double r = 0.0;
    for (const auto& B : blocks)
        if (B.size() > 0) r = std::max(r, (B - B.transpose()).cwiseAbs().maxCoeff());
    return r;
}

Eigen::MatrixXd TruncatedOperator::dense() const {
    std::size_t n = basis->size();
    if (n > 5000) throw CapacityError("dense view limited to 5000 states");
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t s = 0; s < blocks.size(); ++s) {
        const auto& mem = basis->sectors[s].members;
        for (std::size_t i = 0; i < mem.size(); ++i)
            for (std::size_t j = 0; j < mem.size(); ++j)
                H(mem[i], mem[j]) = blocks[s](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return H;
}

namespace {

int species_count(const ModelParams& p) {
    double r = std::round(p.N);
    if (std::abs(p.N - r) > 1e-12 || r < 1.0 || r > 2.0)
        throw UnsupportedModeError("Fock oracle needs integer N in {1, 2}");
    return static_cast<int>(r);
}

Eigen::MatrixXd sector_hamiltonian(const OccupationBasis& b, int s, const ModelParams& p, const Eigen::MatrixXd& h,
                                   const TwoBodyPotential& v, double lambda, double c) {
    const auto& mem = b.sectors[static_cast<std::size_t>(s)].members;
    auto dim = static_cast<Eigen::Index>(mem.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    const auto& g = b.geom;
    int L = g.sites(), S = b.n_species;
    std::vector<double> nx(static_cast<std::size_t>(L));
    for (Eigen::Index i = 0; i < dim; ++i) {
        int st = mem[static_cast<std::size_t>(i)];
        const auto& occ = b.states[static_cast<std::size_t>(st)];
        double diag = 0.0;
        for (int x = 0; x < L; ++x) {
            nx[static_cast<std::size_t>(x)] = b.site_occupation(st, x);
            diag += p.nu * h(x, x) * nx[static_cast<std::size_t>(x)];
        }
        if (lambda != 0.0) {
            double e = 0.0;
            for (int x = 0; x < L; ++x)
                for (int y = 0; y < L; ++y)
                    e += (nx[static_cast<std::size_t>(x)] - c) * v(g, x, y) * (nx[static_cast<std::size_t>(y)] - c);
            diag += 0.5 * lambda * e;
        }
        H(i, i) = diag;
        // hopping nu h_xy b^dagger_{x,a} b_{y,a}
        for (int a = 0; a < S; ++a)
            for (int y = 0; y < L; ++y) {
                int ny = occ[static_cast<std::size_t>(y * S + a)];
                if (ny == 0) continue;
                for (int x = 0; x < L; ++x) {
                    if (x == y || h(x, y) == 0.0) continue;
                    auto nocc = occ;
                    nocc[static_cast<std::size_t>(y * S + a)] -= 1;
                    nocc[static_cast<std::size_t>(x * S + a)] += 1;
                    int t = b.find(nocc);
                    double amp = std::sqrt(double(nocc[static_cast<std::size_t>(x * S + a)]) * ny);
                    H(b.local_index[static_cast<std::size_t>(t)], i) += p.nu * h(x, y) * amp;
                }
            }
    }
    return H;
}

Eigen::MatrixXd single_particle(const TorusGeometry& g, double kappa0) {
    Eigen::MatrixXd h = -0.5 * laplacian_matrix(g);
    h.diagonal().array() += kappa0;
    return h;
}

}  // namespace

TruncatedOperator build_hamiltonian(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v,
                                    int n_max) {
    p.check();
    int S = species_count(p);
    auto basis = std::make_shared<OccupationBasis>(make_basis(g, S, n_max));
    TruncatedOperator op;
    op.label = "hamiltonian";
    op.basis = basis;
    Eigen::MatrixXd h = single_particle(g, p.kappa0);
    double lam = p.lambda(), c = counterterm(p, g);
    for (std::size_t s = 0; s < basis->sectors.size(); ++s)
        op.blocks.push_back(sector_hamiltonian(*basis, static_cast<int>(s), p, h, v, lam, c));
    return op;
}

TruncatedOperator number_operator(const ModelParams& p, const TorusGeometry& g, int n_max) {
    int S = species_count(p);
    auto basis = std::make_shared<OccupationBasis>(make_basis(g, S, n_max));
    TruncatedOperator op;
    op.label = "number";
    op.basis = basis;
    for (const auto& sec : basis->sectors) {
        auto dim = static_cast<Eigen::Index>(sec.members.size());
        int n = 0;
        for (int k : sec.numbers) n += k;
        op.blocks.push_back(Eigen::MatrixXd::Identity(dim, dim) * double(n));
    }
    return op;
}

FockOracle::FockOracle(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v, int n_max)
    : params_(p), geom_(g) {
    auto H = build_hamiltonian(p, g, v, n_max);
    basis_ = H.basis;
    e0_ = std::numeric_limits<double>::infinity();
    for (auto& B : H.blocks) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
        energies_.push_back(es.eigenvalues());
        vectors_.push_back(es.eigenvectors());
        e0_ = std::min(e0_, es.eigenvalues().minCoeff());
    }
    log_xi_ = log_trace(n_max);
}

double FockOracle::log_trace(int n) const {
    double s = 0.0;
    for (std::size_t k = 0; k < energies_.size(); ++k) {
        int tot = 0;
        for (int q : basis_->sectors[k].numbers) tot += q;
        if (tot > n) continue;
        s += (-(energies_[k].array() - e0_)).exp().sum();
    }
    return std::log(s) - e0_;
}

Eigen::MatrixXd FockOracle::annihilation(int s, int s_plus, int x, int a) const {
    const auto& b = *basis_;
    const auto& lo = b.sectors[static_cast<std::size_t>(s)].members;
    const auto& hi = b.sectors[static_cast<std::size_t>(s_plus)].members;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(lo.size()), static_cast<Eigen::Index>(hi.size()));
    int mode = x * b.n_species + a;
    for (std::size_t j = 0; j < hi.size(); ++j) {
        auto occ = b.states[static_cast<std::size_t>(hi[j])];
        int n = occ[static_cast<std::size_t>(mode)];
        if (n == 0) continue;
        occ[static_cast<std::size_t>(mode)] -= 1;
        int i = b.find(occ);
        B(b.local_index[static_cast<std::size_t>(i)], static_cast<Eigen::Index>(j)) = std::sqrt(double(n));
    }
    return vectors_[static_cast<std::size_t>(s)].transpose() * B * vectors_[static_cast<std::size_t>(s_plus)];
}

double FockOracle::duhamel(double tau, int x, double tau_prime, int x_prime) const {
    double nu = params_.nu;
    if (!(tau_prime >= 0.0 && tau_prime <= tau && tau < nu))
        throw DomainError("duhamel needs 0 <= tau' <= tau < nu");
    int L = geom_.sites();
    if (x < 0 || x >= L || x_prime < 0 || x_prime >= L) throw DomainError("site index out of range");
    double u = tau > tau_prime ? (tau - tau_prime) / nu : 1.0;
    const auto& b = *basis_;
    double acc = 0.0;
    for (std::size_t s = 0; s < b.sectors.size(); ++s) {
        auto up = b.sectors[s].numbers;
        up[0] += 1;
        int sp = b.find_sector(up);
        if (sp < 0) continue;
        Eigen::MatrixXd Bx = annihilation(static_cast<int>(s), sp, x, 0);
        Eigen::MatrixXd Bxp = x_prime == x ? Bx : annihilation(static_cast<int>(s), sp, x_prime, 0);
        const auto& Ei = energies_[s];
        const auto& Ej = energies_[static_cast<std::size_t>(sp)];
        for (Eigen::Index i = 0; i < Bx.rows(); ++i)
            for (Eigen::Index j = 0; j < Bx.cols(); ++j) {
                double w = std::exp(-(1.0 - u) * (Ei(i) - e0_) - u * (Ej(j) - e0_));
                acc += w * Bx(i, j) * Bxp(i, j);
            }
    }
    return acc * std::exp(-e0_ - log_xi_);
}

Eigen::MatrixXd FockOracle::gamma1() const {
    int L = geom_.sites();
    Eigen::MatrixXd G(L, L);
    for (int x = 0; x < L; ++x)
        for (int y = 0; y < L; ++y) G(x, y) = duhamel(0.0, x, 0.0, y);
    return G;
}

XiResult xi_exact(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v, int n_max,
                  double drift_tolerance) {
    FockOracle full(p, g, v, n_max);
    ModelParams p0 = p;
    p0.lambda0 = 0.0;
    FockOracle ideal(p0, g, v, n_max);
    XiResult r;
    double lx = full.log_trace(), lx0 = ideal.log_trace();
    r.xi = std::exp(lx);
    r.xi0 = std::exp(lx0);
    r.log_xi_rel = lx - lx0;
    r.xi_rel = std::exp(r.log_xi_rel);
    if (n_max > 0) r.drift = std::abs(-std::expm1(full.log_trace(n_max - 1) - lx));
    r.truncation_warning = r.drift > drift_tolerance;
    r.basis_states = full.basis().size();
    r.xi_extrapolated = r.xi;
    r.xi0_extrapolated = r.xi0;
    if (n_max >= 2) {
        auto ext = [&](const FockOracle& o) {
            return aitken(std::exp(o.log_trace(n_max - 2)), std::exp(o.log_trace(n_max - 1)), std::exp(o.log_trace()));
        };
        r.xi_extrapolated = ext(full);
        r.xi0_extrapolated = ext(ideal);
    }
    return r;
}

double aitken(double a, double b, double c) {
    double d1 = b - a, d2 = c - b, den = d2 - d1;
    // no geometric tail to extrapolate
    if (den == 0.0 || d2 == 0.0 || !(std::abs(d2) < std::abs(d1))) return c;
    return c - d2 * d2 / den;
}

double duhamel_exact(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v, int n_max,
                     double tau, int x, double tau_prime, int x_prime) {
    return FockOracle(p, g, v, n_max).duhamel(tau, x, tau_prime, x_prime);
}

CcrResult ccr_residual(double nu, int n_max) {
    if (n_max < 1) throw DomainError("ccr_residual needs n_max >= 1");
    int dim = n_max + 1;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 1; n <= n_max; ++n) b(n - 1, n) = std::sqrt(double(n));
    Eigen::MatrixXd phi = std::sqrt(nu) * b;
    Eigen::MatrixXd comm = phi * phi.transpose() - phi.transpose() * phi;
    Eigen::MatrixXd dev = comm - nu * Eigen::MatrixXd::Identity(dim, dim);
    CcrResult r;
    for (int i = 0; i < n_max; ++i)
        for (int j = 0; j < n_max; ++j) r.protected_max = std::max(r.protected_max, std::abs(dev(i, j)));
    r.top_commutator = comm(n_max, n_max);
    r.top_deviation = dev(n_max, n_max);
    return r;
}

}  // namespace bosegas
