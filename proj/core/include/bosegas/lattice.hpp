#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bosegas {

using cplx = std::complex<double>;

enum class DomainMode { lattice, circle };

struct TorusGeometry {
    int d = 1;
    int m = 1;
    DomainMode mode = DomainMode::lattice;
    double circumference = 0.0;  // circle mode only

    static TorusGeometry lattice(int d, int m);
    static TorusGeometry circle(double L);

    bool is_lattice() const { return mode == DomainMode::lattice; }
    int sites() const;
    std::array<int, 3> coords(int idx) const;
    int index(const std::array<int, 3>& c) const;
    // site index of the displacement x - y, wrapped
    int diff(int x, int y) const;
    int add(int x, int y) const;
    int neg(int x) const { return diff(0, x); }
    // neighbours along +e_i and -e_i
    int shift(int x, int axis, int step) const;
};

struct TwoBodyPotential {
    DomainMode mode = DomainMode::lattice;
    // lattice: v indexed by displacement site index
    std::vector<double> values;
    // real part of vhat(k), indexed like the wave vectors of laplacian_spectrum
    std::vector<double> fourier;
    // circle: even periodic profile on [0, L)
    std::function<double(double)> profile;
    double circumference = 0.0;
    std::string label;

    double at(int displacement) const { return values[static_cast<std::size_t>(displacement)]; }
    double operator()(const TorusGeometry& g, int x, int y) const { return values[g.diff(x, y)]; }
    double on_circle(double dx) const { return profile(dx); }
    double v0() const;
    // lattice sum of v, or the integral over the circle
    double total() const;
    Eigen::MatrixXd matrix(const TorusGeometry& g) const;

    static TwoBodyPotential zero(const TorusGeometry& g);
    static TwoBodyPotential delta(const TorusGeometry& g, double amplitude = 1.0);
    static TwoBodyPotential from_values(const TorusGeometry& g, std::vector<double> v, std::string label = "values");
    // lattice: exp(-|x|^2/(2 w^2)) with minimum-image distance; circle: periodised Gaussian
    static TwoBodyPotential gaussian(const TorusGeometry& g, double amplitude, double width);
};

struct PotentialReport {
    bool ok = true;
    double evenness_residual = 0.0;
    double min_fourier = 0.0;
    double v0 = 0.0;
    std::vector<int> offending_modes;
    std::string message;
};

PotentialReport validate_potential(const TorusGeometry& g, const TwoBodyPotential& v);

struct TimeGrid {
    double nu = 1.0;
    int n_tau = 1;
    double eps = 1.0;

    TimeGrid() = default;
    TimeGrid(double nu_, int n_tau_);
    // slice boundary index of an imaginary time, or -1 if tau is not on the grid
    int boundary_index(double tau) const;
};

enum class CouplingMode { fixed, meanfield };
enum class RhoMode { explicit_value, wick };

struct ModelParams {
    double nu = 1.0;
    double kappa0 = 1.0;
    double lambda0 = 0.0;
    double N = 1.0;
    CouplingMode coupling = CouplingMode::fixed;
    RhoMode rho_mode = RhoMode::explicit_value;
    double rho_value = 0.0;

    double lambda() const;
    void check() const;
};

std::string to_string(CouplingMode m);
std::string to_string(RhoMode m);
CouplingMode coupling_from_string(const std::string& s);
RhoMode rho_mode_from_string(const std::string& s);

// rho with the wick mode resolved to nu * [free_green]_xx
double resolve_rho(const ModelParams& p, const TorusGeometry& g);
// Wick counterterm density per site: N * rho / nu
double counterterm(const ModelParams& p, const TorusGeometry& g);
// kappa(rho) = kappa0 - lambda * N * rho * nu^-2 * sum_x v(x)
double kappa_rho(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v);

struct SpectralMode {
    double eigenvalue;
    std::array<int, 3> k;
};

std::vector<SpectralMode> laplacian_spectrum(const TorusGeometry& g);
// eigenvalues only, in the same order as laplacian_spectrum
std::vector<double> laplacian_eigenvalues(const TorusGeometry& g);
// orthonormal plane waves as columns
Eigen::MatrixXcd plane_waves(const TorusGeometry& g);
Eigen::MatrixXd laplacian_matrix(const TorusGeometry& g);

// e^{t Delta/2} as a function of displacement
std::vector<double> heat_kernel_row(const TorusGeometry& g, double t);
Eigen::MatrixXd heat_propagator(const TorusGeometry& g, double t);
// circle mode transition density
double heat_density(const TorusGeometry& g, double t, double x, double y);
// same value with the winding sum restricted to w (the sector weight)
double heat_density_winding(double L, double t, double dx, int w);

using SigmaField = Eigen::MatrixXd;  // rows: sites, cols: slices 0..n_tau-1

// time-ordered propagator over slices [j_from, j_to), Strang split
Eigen::MatrixXcd propagator(const TorusGeometry& g, const TimeGrid& grid, const SigmaField& sigma, int j_from,
                            int j_to);
Eigen::MatrixXcd monodromy(const TorusGeometry& g, const TimeGrid& grid, const SigmaField& sigma);

// reusable half-step heat factor for many monodromies on the same grid
class Monodromy {
public:
    Monodromy(const TorusGeometry& g, const TimeGrid& grid);
    Eigen::MatrixXcd operator()(const SigmaField& sigma, int j_from, int j_to) const;
    Eigen::MatrixXcd full(const SigmaField& sigma) const { return (*this)(sigma, 0, grid_.n_tau); }
    const Eigen::MatrixXd& half_step() const { return half_; }

private:
    TorusGeometry geom_;
    TimeGrid grid_;
    Eigen::MatrixXd half_;
    Eigen::MatrixXd full_;
};

// M0 (1 - M0)^{-1}, M0 = e^{-nu kappa0} e^{nu Delta/2}
Eigen::MatrixXd free_green(const TorusGeometry& g, double nu, double kappa0);
// (1/|Lambda|) sum_k (e^{nu(eps_k + kappa)} - 1)^{-1}
double ideal_occupation(const TorusGeometry& g, double nu, double kappa);
double ideal_occupation_derivative(const TorusGeometry& g, double nu, double kappa);

}  // namespace bosegas
