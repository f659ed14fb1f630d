#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "bosegas/errors.hpp"
#include "bosegas/experiment.hpp"
#include "bosegas/record.hpp"

namespace bosegas {

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> chains;
    std::optional<long long> samples;
    std::optional<int> nmax;
    std::optional<int> lmax;
    std::optional<int> ntau;
    bool reproducible = false;
    std::vector<std::string> inputs;  // merge
};

void add_run_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "experiment config (yaml sections)");
    sub->add_option("--out", f.out, "append the record to this file");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--chains", f.chains, "independent chains, pooled");
    sub->add_option("--samples", f.samples, "samples per chain");
    sub->add_option("--nmax", f.nmax, "order / occupation truncation");
    sub->add_option("--lmax", f.lmax, "winding truncation");
    sub->add_option("--ntau", f.ntau, "imaginary-time slices");
    sub->add_flag("--reproducible", f.reproducible, "zero wall-clock fields so reruns are byte-identical");
}

ExperimentConfig resolve(const Flags& f) {
    ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    if (f.seed) c.seed = *f.seed;
    if (f.chains) {
        if (*f.chains < 1) throw ValidationError("--chains must be >= 1");
        c.chains = *f.chains;
    }
    if (f.samples) {
        if (*f.samples < 0) throw ValidationError("--samples must be >= 0");
        c.samples = static_cast<std::size_t>(*f.samples);
    }
    if (f.nmax) c.n_max = *f.nmax;
    if (f.lmax) c.l_max = *f.lmax;
    if (f.ntau) c.n_tau = *f.ntau;
    return c;
}

void print_summary(const ExperimentRecord& r, std::ostream& out) {
    out << std::setprecision(10);
    out << r.command << ": " << r.estimate.real();
    if (r.estimate.imag() != 0.0) out << (r.estimate.imag() < 0 ? " - " : " + ") << std::abs(r.estimate.imag()) << "i";
    if (r.samples > 0) out << " +/- " << r.stderr_re << " (n = " << r.samples << ", ess = " << r.ess << ")";
    out << '\n';
}

int run(const std::string& command, const Flags& f, std::ostream& out, std::ostream& err) {
    auto c = resolve(f);
    auto res = run_command(command, c, f.reproducible);
    const auto& r = res.pooled;
    if (command == "validate") {
        int failed = 0;
        for (const auto& k : res.checks) {
            out << (k.passed ? "PASS " : "FAIL ") << k.name << "  value=" << k.value << " tol=" << k.tolerance;
            if (!k.detail.empty()) out << "  [" << k.detail << "]";
            out << '\n';
            failed += !k.passed;
        }
        out << res.checks.size() - static_cast<std::size_t>(failed) << "/" << res.checks.size() << " invariants hold\n";
        if (!f.out.empty()) append_record(f.out, r);
        return failed == 0 ? 0 : 1;
    }
    print_summary(r, out);
    out << serialize(r) << '\n';
    if (r.flagged) err << "warning: record flagged: " << r.flag_reason << '\n';
    if (!f.out.empty()) {
        append_record(f.out, r);
        if (!res.csv.empty()) {
            auto path = std::filesystem::path(f.out).replace_extension(".csv");
            std::ofstream csv(path);
            if (!csv) throw Error("cannot write " + path.string());
            csv << res.csv;
        }
    }
    return 0;
}

int merge(const Flags& f, std::ostream& out) {
    std::vector<ExperimentRecord> all;
    for (const auto& p : f.inputs) {
        auto rs = read_records(p);
        all.insert(all.end(), rs.begin(), rs.end());
    }
    auto r = merge_chains(all);
    if (f.reproducible) r.wall_seconds = 0.0;
    print_summary(r, out);
    out << serialize(r) << '\n';
    if (!f.out.empty()) append_record(f.out, r);
    return 0;
}

}  // namespace

int bosegas_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"bosegas: grand-canonical Bose gas estimators on a lattice"};
    app.require_subcommand(1);
    Flags f;
    std::vector<std::pair<std::string, CLI::App*>> subs;
    const std::vector<std::pair<std::string, std::string>> help{
        {"oracle", "exact truncated Fock-space values"},
        {"hs", "auxiliary-field determinant estimator"},
        {"loopgas", "Brownian loop-gas series"},
        {"mayer", "connected cluster expansion of ln Xi_rel"},
        {"field", "classical field theory side"},
        {"limit", "limiting-regime sweeps (classical, meanfield, largeN)"},
        {"validate", "cross-route invariant suite"}};
    for (const auto& [name, text] : help) {
        auto* s = app.add_subcommand(name, text);
        add_run_flags(s, f);
        subs.emplace_back(name, s);
    }
    auto* m = app.add_subcommand("merge", "pool records with identical parameters");
    m->add_option("records", f.inputs, "record files")->required()->check(CLI::ExistingFile);
    m->add_option("--out", f.out, "append the pooled record to this file");
    m->add_flag("--reproducible", f.reproducible, "zero the wall-clock field");

    std::vector<char*> argv;
    std::vector<std::string> storage(args);
    for (auto& a : storage) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (m->parsed()) return merge(f, out);
        for (const auto& [name, s] : subs)
            if (s->parsed()) return run(name, f, out, err);
    } catch (const ParseError& e) {
        err << "error: ";
        if (!f.config.empty() && e.line() > 0) err << f.config << ":" << e.line() << ":" << e.column() << ": ";
        err << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return 1;
}

}  // namespace bosegas
