#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "bosegas/lattice.hpp"

namespace bosegas {

constexpr std::size_t kMaxFockStates = 200000;
constexpr std::size_t kMaxFockSector = 6000;

// Occupation vectors over (site, species) modes, mode = x * n_species + a,
// with total particle number <= n_max, in lexicographic order.
struct OccupationBasis {
    TorusGeometry geom;
    int n_species = 1;
    int n_max = 0;
    int modes = 0;
    std::vector<std::vector<std::uint8_t>> states;

    // particle number is conserved per species, so the Hamiltonian is block
    // diagonal in the tuple (n_0, n_1)
    struct Sector {
        std::vector<int> numbers;
        std::vector<int> members;  // global state indices
    };
    std::vector<Sector> sectors;
    std::vector<int> sector_of;    // per state
    std::vector<int> local_index;  // per state, position inside its sector

    std::size_t size() const { return states.size(); }
    int find(const std::vector<std::uint8_t>& occ) const;
    int find_sector(const std::vector<int>& numbers) const;
    int total(int state) const;
    int site_occupation(int state, int x) const;

private:
    friend OccupationBasis make_basis(const TorusGeometry&, int, int);
    std::unordered_map<std::uint64_t, int> lookup_;
    std::map<std::vector<int>, int> sector_lookup_;
    std::uint64_t key(const std::vector<std::uint8_t>& occ) const;
};

std::size_t basis_size(int modes, int n_max);
OccupationBasis make_basis(const TorusGeometry& g, int n_species, int n_max);

struct TruncatedOperator {
    std::string label;
    std::shared_ptr<const OccupationBasis> basis;
    std::vector<Eigen::MatrixXd> blocks;  // one per sector

    double hermiticity_residual() const;
    Eigen::MatrixXd dense() const;
};

TruncatedOperator build_hamiltonian(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v,
                                    int n_max);
TruncatedOperator number_operator(const ModelParams& p, const TorusGeometry& g, int n_max);

struct XiResult {
    double xi = 0.0;
    double xi0 = 0.0;
    double xi_rel = 0.0;
    double log_xi_rel = 0.0;
    double drift = 0.0;
    bool truncation_warning = false;
    std::size_t basis_states = 0;
    // Aitken delta^2 over the cuts n_max - 2, n_max - 1, n_max; exact for a geometric tail
    double xi_extrapolated = 0.0;
    double xi0_extrapolated = 0.0;
};

double aitken(double a, double b, double c);

// Exact diagonalisation of every sector, reused for traces and correlators.
class FockOracle {
public:
    FockOracle(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v, int n_max);

    // log of tr exp(-H) over states with total <= n
    double log_trace(int n) const;
    double log_trace() const { return log_trace(basis_->n_max); }
    // time-ordered < b_x(tau) b^dagger_x'(tau') > for species 0, Theta(0) = 0
    double duhamel(double tau, int x, double tau_prime, int x_prime) const;
    Eigen::MatrixXd gamma1() const;
    const OccupationBasis& basis() const { return *basis_; }
    double ground_energy() const { return e0_; }

private:
    ModelParams params_;
    TorusGeometry geom_;
    std::shared_ptr<const OccupationBasis> basis_;
    std::vector<Eigen::VectorXd> energies_;
    std::vector<Eigen::MatrixXd> vectors_;
    double e0_ = 0.0;
    double log_xi_ = 0.0;

    // <i| b_{x,a} |j> in the eigenbases of sector s (rows) and its +1 sector (cols)
    Eigen::MatrixXd annihilation(int s, int s_plus, int x, int a) const;
};

XiResult xi_exact(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v, int n_max,
                  double drift_tolerance = 1e-6);

double duhamel_exact(const ModelParams& p, const TorusGeometry& g, const TwoBodyPotential& v, int n_max,
                     double tau, int x, double tau_prime, int x_prime);

struct CcrResult {
    double protected_max = 0.0;  // max |[Phi,Phi*] - nu| on states n < n_max
    double top_commutator = 0.0; // <n_max|[Phi,Phi*]|n_max> = -nu n_max
    double top_deviation = 0.0;  // top_commutator - nu
};

CcrResult ccr_residual(double nu, int n_max);

}  // namespace bosegas
