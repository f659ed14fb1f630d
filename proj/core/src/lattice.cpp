#include "bosegas/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

int wrap(int a, int m) {
    int r = a % m;
    return r < 0 ? r + m : r;
}

void require_lattice(const TorusGeometry& g, const char* what) {
    if (!g.is_lattice()) throw UnsupportedModeError(std::string(what) + ": lattice mode required");
}

// 1-d heat kernel on a ring of m sites with generator Delta/2
std::vector<double> ring_kernel(int m, double t) {
    std::vector<double> out(static_cast<std::size_t>(m), 0.0);
    for (int dx = 0; dx < m; ++dx) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) {
            double lam = 2.0 * (std::cos(two_pi * k / m) - 1.0);
            s += std::exp(0.5 * t * lam) * std::cos(two_pi * k * dx / m);
        }
        out[static_cast<std::size_t>(dx)] = std::max(0.0, s / m);
    }
    return out;
}

}  // namespace

TorusGeometry TorusGeometry::lattice(int d, int m) {
    if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
    if (m < 1) throw DomainError("sites per side must be >= 1");
    TorusGeometry g;
    g.d = d;
    g.m = m;
    return g;
}

TorusGeometry TorusGeometry::circle(double L) {
    if (!(L > 0.0)) throw DomainError("circle circumference must be positive");
    TorusGeometry g;
    g.d = 1;
    g.m = 0;
    g.mode = DomainMode::circle;
    g.circumference = L;
    return g;
}

int TorusGeometry::sites() const {
    if (!is_lattice()) return 0;
    int n = 1;
    for (int i = 0; i < d; ++i) n *= m;
    return n;
}

std::array<int, 3> TorusGeometry::coords(int idx) const {
    std::array<int, 3> c{0, 0, 0};
    for (int i = 0; i < d; ++i) {
        c[static_cast<std::size_t>(i)] = idx % m;
        idx /= m;
    }
    return c;
}

int TorusGeometry::index(const std::array<int, 3>& c) const {
    int idx = 0;
    for (int i = d - 1; i >= 0; --i) idx = idx * m + wrap(c[static_cast<std::size_t>(i)], m);
    return idx;
}

int TorusGeometry::diff(int x, int y) const {
    auto a = coords(x), b = coords(y);
    for (int i = 0; i < 3; ++i) a[static_cast<std::size_t>(i)] -= b[static_cast<std::size_t>(i)];
    return index(a);
}

int TorusGeometry::add(int x, int y) const {
    auto a = coords(x), b = coords(y);
    for (int i = 0; i < 3; ++i) a[static_cast<std::size_t>(i)] += b[static_cast<std::size_t>(i)];
    return index(a);
}

int TorusGeometry::shift(int x, int axis, int step) const {
    auto a = coords(x);
    a[static_cast<std::size_t>(axis)] += step;
    return index(a);
}

// ---------------------------------------------------------------- potential

double TwoBodyPotential::v0() const {
    if (mode == DomainMode::circle) return profile(0.0);
    return values.empty() ? 0.0 : values[0];
}

double TwoBodyPotential::total() const {
    if (mode == DomainMode::circle) {
        // trapezoid on a periodic integrand is spectrally accurate
        const int n = 1024;
        double h = circumference / n, s = 0.0;
        for (int i = 0; i < n; ++i) s += profile(i * h);
        return s * h;
    }
    double s = 0.0;
    for (double x : values) s += x;
    return s;
}

Eigen::MatrixXd TwoBodyPotential::matrix(const TorusGeometry& g) const {
    require_lattice(g, "potential matrix");
    int n = g.sites();
    Eigen::MatrixXd V(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) V(x, y) = values[static_cast<std::size_t>(g.diff(x, y))];
    return V;
}

static std::vector<double> dft_real(const TorusGeometry& g, const std::vector<double>& v) {
    int n = g.sites();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
        auto kc = g.coords(k);
        double s = 0.0;
        for (int x = 0; x < n; ++x) {
            auto xc = g.coords(x);
            double ph = 0.0;
            for (int i = 0; i < g.d; ++i) ph += kc[static_cast<std::size_t>(i)] * xc[static_cast<std::size_t>(i)];
            s += v[static_cast<std::size_t>(x)] * std::cos(two_pi * ph / g.m);
        }
        out[static_cast<std::size_t>(k)] = s / n;
    }
    return out;
}

TwoBodyPotential TwoBodyPotential::from_values(const TorusGeometry& g, std::vector<double> v, std::string label) {
    require_lattice(g, "potential");
    if (static_cast<int>(v.size()) != g.sites())
        throw ShapeError("potential needs one value per lattice displacement");
    TwoBodyPotential p;
    p.values = std::move(v);
    p.fourier = dft_real(g, p.values);
    p.label = std::move(label);
    return p;
}

TwoBodyPotential TwoBodyPotential::zero(const TorusGeometry& g) {
    if (!g.is_lattice()) {
        TwoBodyPotential p;
        p.mode = DomainMode::circle;
        p.circumference = g.circumference;
        p.profile = [](double) { return 0.0; };
        p.label = "zero";
        return p;
    }
    return from_values(g, std::vector<double>(static_cast<std::size_t>(g.sites()), 0.0), "zero");
}

TwoBodyPotential TwoBodyPotential::delta(const TorusGeometry& g, double amplitude) {
    require_lattice(g, "delta potential");
    std::vector<double> v(static_cast<std::size_t>(g.sites()), 0.0);
    v[0] = amplitude;
    return from_values(g, std::move(v), "delta");
}

TwoBodyPotential TwoBodyPotential::gaussian(const TorusGeometry& g, double amplitude, double width) {
    if (!(width > 0.0)) throw DomainError("gaussian width must be positive");
    if (g.is_lattice()) {
        std::vector<double> v(static_cast<std::size_t>(g.sites()));
        for (int x = 0; x < g.sites(); ++x) {
            auto c = g.coords(x);
            double r2 = 0.0;
            for (int i = 0; i < g.d; ++i) {
                int a = c[static_cast<std::size_t>(i)];
                a = std::min(a, g.m - a);
                r2 += double(a) * a;
            }
            v[static_cast<std::size_t>(x)] = amplitude * std::exp(-r2 / (2.0 * width * width));
        }
        return from_values(g, std::move(v), "gaussian");
    }
    TwoBodyPotential p;
    p.mode = DomainMode::circle;
    p.circumference = g.circumference;
    double L = g.circumference;
    int images = 2 + static_cast<int>(std::ceil(10.0 * width / L));
    p.profile = [amplitude, width, L, images](double x) {
        x = std::remainder(x, L);
        double s = 0.0;
        for (int w = -images; w <= images; ++w) {
            double y = x + w * L;
            s += std::exp(-y * y / (2.0 * width * width));
        }
        return amplitude * s;
    };
    p.label = "gaussian";
    return p;
}

PotentialReport validate_potential(const TorusGeometry& g, const TwoBodyPotential& v) {
    PotentialReport r;
    const double tol = 1e-12;
    if (!g.is_lattice()) {
        double L = g.circumference;
        const int n = 512;
        for (int i = 0; i < n; ++i) {
            double x = L * i / n;
            r.evenness_residual = std::max(r.evenness_residual, std::abs(v.on_circle(x) - v.on_circle(-x)));
        }
        r.min_fourier = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 64; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += v.on_circle(L * i / n) * std::cos(two_pi * k * i / n);
            s /= n;
            if (s < -tol) r.offending_modes.push_back(k);
            r.min_fourier = std::min(r.min_fourier, s);
        }
        r.v0 = v.on_circle(0.0);
    } else {
        if (static_cast<int>(v.values.size()) != g.sites()) {
            r.ok = false;
            r.message = "potential size does not match geometry";
            return r;
        }
        for (int x = 0; x < g.sites(); ++x)
            r.evenness_residual =
                std::max(r.evenness_residual, std::abs(v.values[static_cast<std::size_t>(x)] -
                                                       v.values[static_cast<std::size_t>(g.neg(x))]));
        auto vh = dft_real(g, v.values);
        r.min_fourier = *std::min_element(vh.begin(), vh.end());
        for (int k = 0; k < g.sites(); ++k)
            if (vh[static_cast<std::size_t>(k)] < -tol) r.offending_modes.push_back(k);
        r.v0 = v.values[0];
    }
    if (r.evenness_residual > tol) {
        r.ok = false;
        r.message += "potential is not even; ";
    }
    if (!r.offending_modes.empty()) {
        r.ok = false;
        r.message += "negative Fourier coefficient (not of positive type); ";
    }
    if (!std::isfinite(r.v0)) {
        r.ok = false;
        r.message += "v(0) is not finite; ";
    }
    return r;
}

// --------------------------------------------------------------- time grid

TimeGrid::TimeGrid(double nu_, int n_tau_) : nu(nu_), n_tau(n_tau_) {
    if (!(nu_ > 0.0)) throw DomainError("nu must be positive");
    if (n_tau_ < 1) throw DomainError("n_tau must be >= 1");
    eps = nu / n_tau;
}

int TimeGrid::boundary_index(double tau) const {
    double j = tau / eps;
    long r = std::lround(j);
    if (std::abs(j - double(r)) > 1e-9 * std::max(1.0, std::abs(j))) return -1;
    if (r < 0 || r > n_tau) return -1;
    return static_cast<int>(r);
}

// ------------------------------------------------------------------ model

double ModelParams::lambda() const {
    if (coupling == CouplingMode::fixed) return lambda0;
    return lambda0 * nu * nu / (N + 1.0);
}

void ModelParams::check() const {
    if (!(nu > 0.0)) throw DomainError("nu must be positive");
    if (!(kappa0 > 0.0)) throw DomainError("kappa0 must be positive");
    if (!(lambda0 >= 0.0)) throw DomainError("lambda0 must be >= 0");
    if (!(N >= 0.0)) throw DomainError("N must be >= 0");
    if (rho_mode == RhoMode::explicit_value && !(rho_value >= 0.0)) throw DomainError("rho must be >= 0");
}

std::string to_string(CouplingMode m) { return m == CouplingMode::fixed ? "fixed" : "meanfield"; }
std::string to_string(RhoMode m) { return m == RhoMode::wick ? "wick" : "explicit"; }

CouplingMode coupling_from_string(const std::string& s) {
    if (s == "fixed") return CouplingMode::fixed;
    if (s == "meanfield") return CouplingMode::meanfield;
    throw DomainError("unknown coupling mode '" + s + "'");
}

RhoMode rho_mode_from_string(const std::string& s) {
    if (s == "explicit") return RhoMode::explicit_value;
    if (s == "wick") return RhoMode::wick;
    throw DomainError("unknown rho mode '" + s + "'");
}

double resolve_rho(const ModelParams& p, const TorusGeometry& g) {
    if (p.rho_mode == RhoMode::explicit_value) return p.rho_value;
    if (!g.is_lattice()) throw UnsupportedModeError("wick rho diverges in circle mode");
    return p.nu * ideal_occupation(g, p.nu, p.kappa0);
}

double counterterm(const ModelParams& p, const TorusGeometry& g) { return p.N * resolve_rho(p, g) / p.nu; }

double kappa_rho(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v) {
    return p.kappa0 - p.lambda() * counterterm(p, g) * v.total() / p.nu;
}

// ---------------------------------------------------------------- spectra

std::vector<SpectralMode> laplacian_spectrum(const TorusGeometry& g) {
    require_lattice(g, "laplacian_spectrum");
    std::vector<SpectralMode> out;
    out.reserve(static_cast<std::size_t>(g.sites()));
    for (int k = 0; k < g.sites(); ++k) {
        auto kc = g.coords(k);
        double lam = 0.0;
        for (int i = 0; i < g.d; ++i) lam += 2.0 * (std::cos(two_pi * kc[static_cast<std::size_t>(i)] / g.m) - 1.0);
        // exact zero for the constant mode and for cos rounding near zero
        if (std::abs(lam) < 1e-15) lam = 0.0;
        out.push_back({lam, kc});
    }
    return out;
}

std::vector<double> laplacian_eigenvalues(const TorusGeometry& g) {
    std::vector<double> out;
    for (const auto& s : laplacian_spectrum(g)) out.push_back(s.eigenvalue);
    return out;
}

Eigen::MatrixXcd plane_waves(const TorusGeometry& g) {
    require_lattice(g, "plane_waves");
    int n = g.sites();
    Eigen::MatrixXcd U(n, n);
    double norm = 1.0 / std::sqrt(double(n));
    for (int k = 0; k < n; ++k) {
        auto kc = g.coords(k);
        for (int x = 0; x < n; ++x) {
            auto xc = g.coords(x);
            double ph = 0.0;
            for (int i = 0; i < g.d; ++i) ph += kc[static_cast<std::size_t>(i)] * xc[static_cast<std::size_t>(i)];
            U(x, k) = std::polar(norm, two_pi * ph / g.m);
        }
    }
    return U;
}

Eigen::MatrixXd laplacian_matrix(const TorusGeometry& g) {
    require_lattice(g, "laplacian_matrix");
    int n = g.sites();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        L(x, x) -= 2.0 * g.d;
        for (int a = 0; a < g.d; ++a) {
            L(g.shift(x, a, 1), x) += 1.0;
            L(g.shift(x, a, -1), x) += 1.0;
        }
    }
    return L;
}

// ---------------------------------------------------------------- kernels

std::vector<double> heat_kernel_row(const TorusGeometry& g, double t) {
    require_lattice(g, "heat kernel");
    if (t < 0.0) throw DomainError("heat propagator needs t >= 0");
    auto ring = ring_kernel(g.m, t);
    std::vector<double> out(static_cast<std::size_t>(g.sites()));
    for (int x = 0; x < g.sites(); ++x) {
        auto c = g.coords(x);
        double p = 1.0;
        for (int i = 0; i < g.d; ++i) p *= ring[static_cast<std::size_t>(c[static_cast<std::size_t>(i)])];
        out[static_cast<std::size_t>(x)] = p;
    }
    return out;
}

Eigen::MatrixXd heat_propagator(const TorusGeometry& g, double t) {
    auto row = heat_kernel_row(g, t);
    int n = g.sites();
    Eigen::MatrixXd P(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) P(x, y) = row[static_cast<std::size_t>(g.diff(x, y))];
    return P;
}

double heat_density_winding(double L, double t, double dx, int w) {
    double y = dx + w * L;
    return std::exp(-y * y / (2.0 * t)) / std::sqrt(two_pi * t);
}

double heat_density(const TorusGeometry& g, double t, double x, double y) {
    if (g.is_lattice()) throw UnsupportedModeError("heat_density is the circle-mode transition density");
    if (!(t > 0.0)) throw DomainError("circle heat density needs t > 0");
    double L = g.circumference;
    double dx = std::remainder(x - y, L);
    double s = heat_density_winding(L, t, dx, 0);
    for (int w = 1;; ++w) {
        double a = heat_density_winding(L, t, dx, w);
        double b = heat_density_winding(L, t, dx, -w);
        s += a + b;
        if (a < 1e-16 && b < 1e-16) break;
    }
    return s;
}

// --------------------------------------------------------------- monodromy

Monodromy::Monodromy(const TorusGeometry& g, const TimeGrid& grid)
    : geom_(g), grid_(grid), half_(heat_propagator(g, 0.5 * grid.eps)), full_(heat_propagator(g, grid.eps)) {}

Eigen::MatrixXcd Monodromy::operator()(const SigmaField& sigma, int j_from, int j_to) const {
    int n = geom_.sites();
    if (sigma.rows() != n || sigma.cols() != grid_.n_tau)
        throw ShapeError("sigma field does not match sites x slices");
    if (j_from < 0 || j_to > grid_.n_tau || j_from > j_to) throw DomainError("slice range outside the grid");
    if (j_from == j_to) return Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd G = half_.cast<cplx>();
    const double eps = grid_.eps;
    for (int j = j_from; j < j_to; ++j) {
        for (int x = 0; x < n; ++x) G.row(x) *= std::polar(1.0, -eps * sigma(x, j));
        if (j + 1 < j_to)
            G = full_ * G;
        else
            G = half_ * G;
    }
    return G;
}

Eigen::MatrixXcd propagator(const TorusGeometry& g, const TimeGrid& grid, const SigmaField& sigma, int j_from,
                            int j_to) {
    return Monodromy(g, grid)(sigma, j_from, j_to);
}

Eigen::MatrixXcd monodromy(const TorusGeometry& g, const TimeGrid& grid, const SigmaField& sigma) {
    return propagator(g, grid, sigma, 0, grid.n_tau);
}

// ------------------------------------------------------------- free green

Eigen::MatrixXd free_green(const TorusGeometry& g, double nu, double kappa0) {
    require_lattice(g, "free_green");
    if (!(kappa0 > 0.0)) throw DomainError("free_green: kappa0 <= 0, winding series diverges");
    auto spec = laplacian_spectrum(g);
    int n = g.sites();
    std::vector<double> row(static_cast<std::size_t>(n), 0.0);
    for (int x = 0; x < n; ++x) {
        auto xc = g.coords(x);
        double s = 0.0;
        for (const auto& mode : spec) {
            double mu = std::exp(-nu * kappa0 + 0.5 * nu * mode.eigenvalue);
            double ph = 0.0;
            for (int i = 0; i < g.d; ++i) ph += mode.k[static_cast<std::size_t>(i)] * xc[static_cast<std::size_t>(i)];
            s += mu / (1.0 - mu) * std::cos(two_pi * ph / g.m);
        }
        row[static_cast<std::size_t>(x)] = s / n;
    }
    Eigen::MatrixXd G(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) G(x, y) = row[static_cast<std::size_t>(g.diff(x, y))];
    return G;
}

double ideal_occupation(const TorusGeometry& g, double nu, double kappa) {
    double s = 0.0;
    auto ev = laplacian_eigenvalues(g);
    for (double lam : ev) {
        double a = nu * (-0.5 * lam + kappa);
        if (!(a > 0.0)) throw DomainError("ideal occupation diverges: kappa below the spectrum");
        s += 1.0 / std::expm1(a);
    }
    return s / double(ev.size());
}

double ideal_occupation_derivative(const TorusGeometry& g, double nu, double kappa) {
    double s = 0.0;
    auto ev = laplacian_eigenvalues(g);
    for (double lam : ev) {
        double a = nu * (-0.5 * lam + kappa);
        double em = std::expm1(a);
        s -= nu * (em + 1.0) / (em * em);
    }
    return s / double(ev.size());
}

}  // namespace bosegas
