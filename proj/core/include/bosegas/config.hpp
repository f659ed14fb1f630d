#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bosegas/lattice.hpp"

namespace bosegas {

inline constexpr int kConfigVersion = 1;

struct PotentialSpec {
    std::string kind = "delta";  // delta | gaussian | zero | values
    double amplitude = 1.0;
    double width = 1.0;
    std::vector<double> values;
};

struct ObservableSpec {
    // oracle: xi | xi_rel | log_xi_rel | duhamel | gamma1
    // hs, loopgas: xi_rel | duhamel;  mayer: log_xi_rel;  field: two_point | z_eta | radial
    std::string kind;
    double tau = 0.0;
    double tau_prime = 0.0;
    double x = 0.0;
    double x_prime = 0.0;
};

struct LimitSpec {
    std::string kind = "meanfield";  // classical | meanfield | largeN
    std::vector<double> nu_list;       // empty: the defaults of each sweep
    double z = 0.5;
    double circumference = 4.0;
    double eps = 1.0 / 32.0;
    std::vector<double> N_list{4.0, 64.0};
    double tolerance = 0.05;
};

struct ExperimentConfig {
    int version = kConfigVersion;
    int d = 1;
    int m = 1;
    bool circle = false;
    double circumference = 4.0;
    PotentialSpec potential;
    ModelParams model;
    int n_tau = 8;
    std::size_t samples = 4000;
    std::uint64_t seed = 1;
    int chains = 1;
    std::optional<int> n_max;
    std::optional<int> l_max;
    ObservableSpec observable;
    LimitSpec limit;
};

// yaml subset: sections of key: value pairs; unknown keys and malformed
// values raise ParseError with line and column
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// range checks; throws ValidationError
void validate_config(const ExperimentConfig& c);

TorusGeometry make_geometry(const ExperimentConfig& c);
TwoBodyPotential make_potential(const ExperimentConfig& c, const TorusGeometry& g);
TimeGrid make_grid(const ExperimentConfig& c);

// command-specific defaults for the truncations
int resolved_n_max(const ExperimentConfig& c, const std::string& command);
int resolved_l_max(const ExperimentConfig& c);
std::string resolved_observable(const ExperimentConfig& c, const std::string& command);

}  // namespace bosegas
