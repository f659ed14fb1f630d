#include "bosegas/record.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

double m2_from_stderr(double se, std::uint64_t n) {
    if (n < 2) return 0.0;
    double dn = static_cast<double>(n);
    return se * se * dn * (dn - 1.0);
}

double stderr_from_m2(double m2, std::uint64_t n) {
    if (n < 2) return 0.0;
    double dn = static_cast<double>(n);
    return std::sqrt(m2 / (dn - 1.0) / dn);
}

}  // namespace

ExperimentRecord make_record(const std::string& command, const Json& params, const ComplexEstimate& e,
                             std::uint64_t seed) {
    ExperimentRecord r;
    r.command = command;
    r.params = params;
    r.estimate = e.value;
    r.stderr_re = e.stderr_re;
    r.stderr_im = e.stderr_im;
    r.samples = e.n;
    r.ess = e.ess;
    r.seed = seed;
    r.m2_re = m2_from_stderr(e.stderr_re, e.n);
    r.m2_im = m2_from_stderr(e.stderr_im, e.n);
    if (e.unreliable) {
        r.flagged = true;
        r.flag_reason = "statistical reliability";
    }
    return r;
}

Json to_json(const ExperimentRecord& r) {
    Json j;
    j["schema_version"] = r.schema_version;
    j["command"] = r.command;
    j["params"] = r.params;
    j["estimate"] = {{"re", r.estimate.real()}, {"im", r.estimate.imag()}};
    j["stderr"] = {{"re", r.stderr_re}, {"im", r.stderr_im}};
    j["samples"] = r.samples;
    j["ess"] = r.ess;
    j["seed"] = r.seed;
    if (!r.pooled_seeds.empty()) j["pooled_seeds"] = r.pooled_seeds;
    j["wall_seconds"] = r.wall_seconds;
    j["flagged"] = r.flagged;
    if (r.flagged) j["flag_reason"] = r.flag_reason;
    j["m2"] = {{"re", r.m2_re}, {"im", r.m2_im}};
    if (!r.extra.empty()) j["extra"] = r.extra;
    return j;
}

ExperimentRecord record_from_json(const Json& j) {
    ExperimentRecord r;
    try {
        r.schema_version = j.at("schema_version").get<int>();
        if (r.schema_version != kRecordSchemaVersion)
            throw ParseError("unsupported record schema version " + std::to_string(r.schema_version));
        r.command = j.at("command").get<std::string>();
        r.params = j.at("params");
        r.estimate = {j.at("estimate").at("re").get<double>(), j.at("estimate").at("im").get<double>()};
        r.stderr_re = j.at("stderr").at("re").get<double>();
        r.stderr_im = j.at("stderr").at("im").get<double>();
        r.samples = j.at("samples").get<std::uint64_t>();
        r.ess = j.at("ess").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("pooled_seeds")) r.pooled_seeds = j["pooled_seeds"].get<std::vector<std::uint64_t>>();
        r.wall_seconds = j.at("wall_seconds").get<double>();
        r.flagged = j.at("flagged").get<bool>();
        if (j.contains("flag_reason")) r.flag_reason = j["flag_reason"].get<std::string>();
        r.m2_re = j.at("m2").at("re").get<double>();
        r.m2_im = j.at("m2").at("im").get<double>();
        if (j.contains("extra")) r.extra = j["extra"];
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed record: ") + e.what());
    }
    return r;
}

std::string serialize(const ExperimentRecord& r) { return to_json(r).dump(); }

ExperimentRecord deserialize(const std::string& line) {
    Json j;
    try {
        j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("record is not valid json: ") + e.what());
    }
    return record_from_json(j);
}

std::vector<ExperimentRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open record file '" + path + "'");
    std::vector<ExperimentRecord> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(deserialize(line));
    return out;
}

void append_record(const std::string& path, const ExperimentRecord& r) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("cannot write record file '" + path + "'");
    out << serialize(r) << '\n';
}

ExperimentRecord merge_chains(const std::vector<ExperimentRecord>& records) {
    if (records.empty()) throw MergeError("nothing to merge");
    for (const auto& r : records) {
        if (r.command != records[0].command) throw MergeError("records come from different commands");
        if (r.params != records[0].params) throw MergeError("records have different resolved parameters");
    }
    auto seeds_of = [](const ExperimentRecord& r) {
        return r.pooled_seeds.empty() ? std::vector<std::uint64_t>{r.seed} : r.pooled_seeds;
    };
    std::set<std::uint64_t> seen;
    for (const auto& r : records)
        for (auto s : seeds_of(r))
            if (!seen.insert(s).second) throw MergeError("seed " + std::to_string(s) + " appears twice");

    // sort the leaves so that any bracketing of merges folds in the same order
    std::vector<const ExperimentRecord*> order;
    for (const auto& r : records) order.push_back(&r);
    std::sort(order.begin(), order.end(),
              [&](const auto* a, const auto* b) { return seeds_of(*a).front() < seeds_of(*b).front(); });

    ExperimentRecord out = *order.front();
    out.extra = Json::object();
    RunningStats re, im;
    double ess = 0.0, wall = 0.0;
    bool flagged = false;
    std::string reason;
    for (const auto* r : order) {
        RunningStats a{r->samples, r->estimate.real(), r->m2_re};
        RunningStats b{r->samples, r->estimate.imag(), r->m2_im};
        re.merge(a);
        im.merge(b);
        ess += r->ess;
        wall += r->wall_seconds;
        if (r->flagged) {
            flagged = true;
            reason = r->flag_reason;
        }
    }
    out.estimate = {re.mean, im.mean};
    out.samples = re.n;
    out.m2_re = re.m2;
    out.m2_im = im.m2;
    out.stderr_re = stderr_from_m2(re.m2, re.n);
    out.stderr_im = stderr_from_m2(im.m2, im.n);
    out.ess = ess;
    out.wall_seconds = wall;
    out.flagged = flagged;
    out.flag_reason = reason;
    out.pooled_seeds.assign(seen.begin(), seen.end());
    out.seed = out.pooled_seeds.front();
    return out;
}

}  // namespace bosegas
