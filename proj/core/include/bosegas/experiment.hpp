#pragma once

#include <string>
#include <vector>

#include "bosegas/config.hpp"
#include "bosegas/limits.hpp"
#include "bosegas/record.hpp"

namespace bosegas {

struct InvariantCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

// cross-route invariants at the configured parameters
std::vector<InvariantCheck> run_invariant_suite(const ExperimentConfig& c);

struct RunOutput {
    std::vector<ExperimentRecord> chains;
    ExperimentRecord pooled;
    std::vector<InvariantCheck> checks;   // validate only
    std::string csv;                       // limit only
};

const std::vector<std::string>& command_names();

// resolved parameters as stored in records; seed and chain count excluded
Json resolved_params(const ExperimentConfig& c, const std::string& command);

// one chain of a sampling command at the given chain seed
ExperimentRecord run_chain(const std::string& command, const ExperimentConfig& c, std::uint64_t seed);

// chains run concurrently, pooled in seed order; reproducible zeroes wall times
RunOutput run_command(const std::string& command, const ExperimentConfig& c, bool reproducible = false);

std::string sweep_csv(const LimitSweep& s);

// 2 parse, 3 validation, 4 capacity, 5 merge, 1 anything else
int exit_code_for(const std::exception& e);

}  // namespace bosegas
