#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bosegas/stats.hpp"

namespace bosegas {

inline constexpr int kRecordSchemaVersion = 1;

using Json = nlohmann::ordered_json;

struct ExperimentRecord {
    int schema_version = kRecordSchemaVersion;
    std::string command;
    Json params = Json::object();   // full resolved parameters, seed excluded
    std::complex<double> estimate{0.0, 0.0};
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    std::uint64_t samples = 0;
    double ess = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> pooled_seeds;  // non-empty for merged records
    double wall_seconds = 0.0;
    bool flagged = false;
    std::string flag_reason;
    // sufficient statistics for pooling, per component
    double m2_re = 0.0;
    double m2_im = 0.0;
    Json extra = Json::object();
};

// M2 consistent with the reported standard error: se^2 n (n - 1)
ExperimentRecord make_record(const std::string& command, const Json& params, const ComplexEstimate& e,
                             std::uint64_t seed);

Json to_json(const ExperimentRecord& r);
ExperimentRecord record_from_json(const Json& j);
std::string serialize(const ExperimentRecord& r);
ExperimentRecord deserialize(const std::string& line);

// one record per line
std::vector<ExperimentRecord> read_records(const std::string& path);
void append_record(const std::string& path, const ExperimentRecord& r);

// count / mean / M2 pooling; folded in seed order so completion order does not matter
ExperimentRecord merge_chains(const std::vector<ExperimentRecord>& records);

}  // namespace bosegas
