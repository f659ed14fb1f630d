#include "bosegas/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <iomanip>
#include <sstream>
#include <thread>

#include "bosegas/errors.hpp"
#include "bosegas/fock.hpp"
#include "bosegas/hs.hpp"
#include "bosegas/loopgas.hpp"
#include "bosegas/mayer.hpp"
#include "bosegas/meanfield.hpp"

namespace bosegas {

namespace {

int site(double x, const TorusGeometry& g) {
    double r = std::round(x);
    if (r != x || r < 0 || r >= g.sites()) throw ValidationError("site index out of range");
    return static_cast<int>(r);
}

void need_lattice(const TorusGeometry& g, const std::string& command) {
    if (!g.is_lattice()) throw UnsupportedModeError(command + " needs a lattice geometry");
}

ComplexEstimate exact(double value) {
    ComplexEstimate e;
    e.value = value;
    return e;
}

FieldParams field_params(const ExperimentConfig& c) {
    FieldParams f;
    f.kappa0 = c.model.kappa0;
    f.lambda0 = c.model.lambda0;
    f.N = c.model.N;
    // the Wick-ordered functional already subtracts N c, so wick mode means rho = 0 here
    f.rho = c.model.rho_mode == RhoMode::wick ? 0.0 : c.model.rho_value;
    return f;
}

Json sweep_json(const LimitSweep& s) {
    Json pts = Json::array();
    for (const auto& p : s.points)
        pts.push_back({{"parameter", p.parameter},
                       {"estimate_re", p.estimate.value.real()},
                       {"estimate_im", p.estimate.value.imag()},
                       {"stderr_re", p.estimate.stderr_re},
                       {"reference", p.reference},
                       {"reference_err", p.reference_err},
                       {"discrepancy", p.discrepancy},
                       {"discrepancy_err", p.discrepancy_err},
                       {"flagged", p.flagged}});
    return {{"parameter", s.parameter_name},
            {"points", pts},
            {"decreasing", s.decreasing},
            {"final_ok", s.final_ok},
            {"note", s.note}};
}

ExperimentRecord run_oracle(const ExperimentConfig& c, const Json& params, std::uint64_t seed) {
    auto g = make_geometry(c);
    need_lattice(g, "oracle");
    auto v = make_potential(c, g);
    int n = resolved_n_max(c, "oracle");
    std::string obs = resolved_observable(c, "oracle");
    ExperimentRecord r;
    if (obs == "xi" || obs == "xi_rel" || obs == "log_xi_rel") {
        auto x = xi_exact(c.model, g, v, n);
        double rel = x.xi_extrapolated / x.xi0_extrapolated;
        double val = obs == "xi" ? x.xi_extrapolated : obs == "xi_rel" ? rel : std::log(rel);
        r = make_record("oracle", params, exact(val), seed);
        r.extra = {{"xi_truncated", x.xi},
                   {"xi0_truncated", x.xi0},
                   {"xi_rel_truncated", x.xi_rel},
                   {"drift", x.drift},
                   {"basis_states", x.basis_states}};
        // the extrapolation covers a geometric tail; flag only when even that is doubtful
        if (x.drift > 1e-3) {
            r.flagged = true;
            r.flag_reason = "occupation truncation drift";
        }
    } else if (obs == "duhamel") {
        double val = duhamel_exact(c.model, g, v, n, c.observable.tau, site(c.observable.x, g),
                                   c.observable.tau_prime, site(c.observable.x_prime, g));
        r = make_record("oracle", params, exact(val), seed);
    } else if (obs == "gamma1") {
        FockOracle o(c.model, g, v, n);
        r = make_record("oracle", params, exact(o.gamma1()(site(c.observable.x, g), site(c.observable.x_prime, g))),
                        seed);
    } else {
        throw ValidationError("oracle does not provide '" + obs + "'");
    }
    return r;
}

ExperimentRecord run_hs(const ExperimentConfig& c, const Json& params, std::uint64_t seed) {
    auto g = make_geometry(c);
    need_lattice(g, "hs");
    auto v = make_potential(c, g);
    auto grid = make_grid(c);
    std::string obs = resolved_observable(c, "hs");
    if (obs == "xi_rel") return make_record("hs", params, estimate_xi_rel(c.model, g, grid, v, c.samples, seed), seed);
    if (obs == "duhamel" || obs == "gamma1") {
        auto e = estimate_duhamel(c.model, g, grid, v, c.observable.tau, site(c.observable.x, g),
                                  obs == "gamma1" ? c.observable.tau : c.observable.tau_prime,
                                  site(c.observable.x_prime, g), c.samples, seed);
        return make_record("hs", params, e, seed);
    }
    throw ValidationError("hs does not provide '" + obs + "'");
}

ExperimentRecord run_loopgas(const ExperimentConfig& c, const Json& params, std::uint64_t seed) {
    auto g = make_geometry(c);
    auto v = make_potential(c, g);
    auto grid = make_grid(c);
    LoopTruncation t;
    t.n_max = resolved_n_max(c, "loopgas");
    t.l_max = resolved_l_max(c);
    std::string obs = resolved_observable(c, "loopgas");
    ExperimentRecord r;
    if (obs == "xi_rel") {
        auto res = xi_rel_series(c.model, g, grid, v, t, c.samples, seed);
        r = make_record("loopgas", params, res.xi_rel, seed);
        r.extra = {{"coefficients", res.coefficients},
                   {"Q_rho", res.Q_rho},
                   {"Q0", res.Q0},
                   {"tail_orders", res.tail_orders},
                   {"tail_windings", res.tail_windings}};
        if (res.truncated) {
            r.flagged = true;
            r.flag_reason = "loop-gas truncation tail above tolerance";
        }
    } else if (obs == "duhamel") {
        auto res = duhamel_loopgas(c.model, g, grid, v, c.observable.tau, c.observable.x, c.observable.tau_prime,
                                   c.observable.x_prime, t, c.samples, seed);
        r = make_record("loopgas", params, res.value, seed);
        r.extra = {{"open_weight", res.open_weight}, {"l0_max", res.l0_max}};
        if (res.truncated) {
            r.flagged = true;
            r.flag_reason = "open-path winding sum truncated";
        }
    } else {
        throw ValidationError("loopgas does not provide '" + obs + "'");
    }
    return r;
}

ExperimentRecord run_mayer(const ExperimentConfig& c, const Json& params, std::uint64_t seed) {
    auto g = make_geometry(c);
    need_lattice(g, "mayer");
    auto v = make_potential(c, g);
    auto grid = make_grid(c);
    if (resolved_observable(c, "mayer") != "log_xi_rel") throw ValidationError("mayer provides log_xi_rel only");
    auto s = mayer_series(c.model, g, grid, v, resolved_n_max(c, "mayer"), resolved_l_max(c), c.samples, seed);
    ComplexEstimate e;
    e.value = s.log_xi_rel.back();
    e.stderr_re = s.log_xi_rel_err.back();
    e.n = c.samples;
    e.ess = static_cast<double>(c.samples);
    auto r = make_record("mayer", params, e, seed);
    Json b = Json::array(), berr = Json::array(), viol = Json::array();
    for (const auto& t : s.terms) {
        b.push_back(t.b.value.real());
        berr.push_back(t.b.stderr_re);
        viol.push_back(t.majorization_violations);
    }
    r.extra = {{"partial_sums", s.log_xi_rel},
               {"partial_sums_err", s.log_xi_rel_err},
               {"b", b},
               {"b_err", berr},
               {"majorization_violations", viol}};
    return r;
}

ExperimentRecord run_field(const ExperimentConfig& c, const Json& params, std::uint64_t seed) {
    auto g = make_geometry(c);
    need_lattice(g, "field");
    auto v = make_potential(c, g);
    auto f = field_params(c);
    std::string obs = resolved_observable(c, "field");
    if (obs == "two_point") {
        auto res = sample_gibbs_field(f, g, v, c.samples, seed, site(c.observable.x, g), site(c.observable.x_prime, g));
        auto r = make_record("field", params, res.two_point, seed);
        r.extra = {{"acceptance", res.acceptance}, {"step", res.step}, {"tau_int", res.tau_int}};
        if (res.tuning_failed) {
            r.flagged = true;
            r.flag_reason = "metropolis step tuning failed";
        }
        return r;
    }
    if (obs == "z_eta") {
        auto res = z_via_eta(f, g, v, c.samples, seed);
        auto r = make_record("field", params, res.z, seed);
        r.extra = {{"positivity_violations", res.positivity_violations},
                   {"modulus_violations", res.modulus_violations}};
        return r;
    }
    if (obs == "radial") {
        if (g.sites() != 1) throw UnsupportedModeError("radial quadrature is single-site only");
        auto q = single_site_field(f, v.at(0));
        ComplexEstimate e = exact(q.phi2);
        auto r = make_record("field", params, e, seed);
        r.extra = {{"z_rel", q.z_rel}, {"quadrature_error", q.error}};
        return r;
    }
    throw ValidationError("field does not provide '" + obs + "'");
}

ExperimentRecord run_limit(const ExperimentConfig& c, const Json& params, std::uint64_t seed, std::string* csv) {
    LimitSweep sweep;
    Json extra;
    if (c.limit.kind == "classical") {
        ClassicalSweepConfig k;
        k.z = c.limit.z;
        k.lambda0 = c.model.lambda0;
        k.L = c.limit.circumference;
        if (!c.limit.nu_list.empty()) k.nu_list = c.limit.nu_list;
        k.n_tau = c.n_tau;
        k.n_max = resolved_n_max(c, "limit");
        k.l_max = resolved_l_max(c);
        k.tolerance = c.limit.tolerance;
        ExperimentConfig circ = c;
        circ.circle = true;
        circ.circumference = k.L;
        auto g = make_geometry(circ);
        sweep = classical_limit_sweep(k, make_potential(circ, g), c.samples, seed);
    } else if (c.limit.kind == "meanfield") {
        auto g = make_geometry(c);
        need_lattice(g, "limit meanfield");
        MeanfieldSweepConfig k;
        k.kappa0 = c.model.kappa0;
        k.lambda0 = c.model.lambda0;
        if (!c.limit.nu_list.empty()) k.nu_list = c.limit.nu_list;
        k.eps = c.limit.eps;
        auto m = meanfield_sweep(k, g, make_potential(c, g), c.samples, seed);
        sweep = m.sweep;
        extra["field_lambda0"] = m.field_lambda0;
        if (std::isfinite(m.field_check)) extra["field_check"] = m.field_check;
    } else {
        auto g = make_geometry(c);
        need_lattice(g, "limit largeN");
        LargeNConfig k;
        k.N_list = c.limit.N_list;
        k.x = site(c.observable.x, g);
        k.y = site(c.observable.x_prime, g);
        auto l = largeN_check(c.model, g, make_grid(c), make_potential(c, g), k, c.samples, seed);
        sweep = l.sweep;
        extra["kappa_ren"] = l.kappa_ren;
    }
    ComplexEstimate last = sweep.points.empty() ? ComplexEstimate{} : sweep.points.back().estimate;
    auto r = make_record("limit", params, last, seed);
    extra["sweep"] = sweep_json(sweep);
    r.extra = extra;
    if (!sweep.decreasing || !sweep.final_ok) {
        r.flagged = true;
        r.flag_reason = !sweep.decreasing ? "discrepancy not decreasing beyond errors"
                                          : "final discrepancy above tolerance";
    }
    if (csv) *csv = sweep_csv(sweep);
    return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"oracle", "hs", "loopgas", "mayer", "field", "limit", "validate"};
    return names;
}

Json resolved_params(const ExperimentConfig& c, const std::string& command) {
    auto g = make_geometry(c);
    Json p;
    p["config_version"] = c.version;
    if (c.circle)
        p["geometry"] = {{"d", 1}, {"circle", c.circumference}};
    else
        p["geometry"] = {{"d", c.d}, {"m", c.m}};
    Json pot = {{"kind", c.potential.kind}, {"amplitude", c.potential.amplitude}, {"width", c.potential.width}};
    if (c.potential.kind == "values") pot["values"] = c.potential.values;
    p["potential"] = pot;
    Json model = {{"nu", c.model.nu},
                  {"kappa0", c.model.kappa0},
                  {"lambda0", c.model.lambda0},
                  {"N", c.model.N},
                  {"coupling_mode", to_string(c.model.coupling)},
                  {"rho_mode", to_string(c.model.rho_mode)},
                  {"lambda", c.model.lambda()}};
    if (g.is_lattice()) {
        model["rho"] = resolve_rho(c.model, g);
        model["kappa_rho"] = kappa_rho(c.model, g, make_potential(c, g));
    } else {
        model["rho"] = c.model.rho_value;
    }
    p["model"] = model;
    p["grid"] = {{"n_tau", c.n_tau}, {"eps", make_grid(c).eps}};
    p["truncation"] = {{"n_max", resolved_n_max(c, command)}, {"l_max", resolved_l_max(c)}};
    p["observable"] = {{"kind", resolved_observable(c, command)},
                       {"tau", c.observable.tau},
                       {"tau_prime", c.observable.tau_prime},
                       {"x", c.observable.x},
                       {"x_prime", c.observable.x_prime}};
    if (command == "limit")
        p["limit"] = {{"kind", c.limit.kind},           {"nu_list", c.limit.nu_list},
                      {"z", c.limit.z},                 {"circumference", c.limit.circumference},
                      {"eps", c.limit.eps},             {"N_list", c.limit.N_list},
                      {"tolerance", c.limit.tolerance}};
    return p;
}

ExperimentRecord run_chain(const std::string& command, const ExperimentConfig& c, std::uint64_t seed) {
    Json params = resolved_params(c, command);
    auto t0 = std::chrono::steady_clock::now();
    ExperimentRecord r;
    if (command == "oracle")
        r = run_oracle(c, params, seed);
    else if (command == "hs")
        r = run_hs(c, params, seed);
    else if (command == "loopgas")
        r = run_loopgas(c, params, seed);
    else if (command == "mayer")
        r = run_mayer(c, params, seed);
    else if (command == "field")
        r = run_field(c, params, seed);
    else if (command == "limit")
        r = run_limit(c, params, seed, nullptr);
    else
        throw ValidationError("unknown command '" + command + "'");
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

RunOutput run_command(const std::string& command, const ExperimentConfig& c, bool reproducible) {
    validate_config(c);
    RunOutput out;
    auto finish = [&](ExperimentRecord& r) {
        if (reproducible) r.wall_seconds = 0.0;
    };
    if (command == "validate") {
        auto t0 = std::chrono::steady_clock::now();
        out.checks = run_invariant_suite(c);
        int passed = 0;
        Json checks = Json::array();
        for (const auto& k : out.checks) {
            passed += k.passed;
            checks.push_back({{"name", k.name},
                              {"passed", k.passed},
                              {"value", k.value},
                              {"tolerance", k.tolerance},
                              {"detail", k.detail}});
        }
        auto r = make_record("validate", resolved_params(c, command), exact(passed), c.seed);
        r.extra = {{"checks", checks}, {"failed", static_cast<int>(out.checks.size()) - passed}};
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        finish(r);
        out.chains.push_back(r);
        out.pooled = r;
        return out;
    }
    if (command == "limit") {
        auto t0 = std::chrono::steady_clock::now();
        auto r = run_limit(c, resolved_params(c, command), chain_seed(c.seed, 0), &out.csv);
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        finish(r);
        out.chains.push_back(r);
        out.pooled = r;
        return out;
    }
    // deterministic route: one evaluation regardless of the chain count
    int chains = command == "oracle" ? 1 : c.chains;
    std::vector<std::future<ExperimentRecord>> jobs;
    unsigned width = std::max(1u, std::thread::hardware_concurrency());
    for (int k = 0; k < chains; ++k) {
        if (jobs.size() >= width) {
            out.chains.push_back(jobs.front().get());
            jobs.erase(jobs.begin());
        }
        jobs.push_back(std::async(std::launch::async, [&, k] {
            return run_chain(command, c, chain_seed(c.seed, static_cast<std::uint64_t>(k)));
        }));
    }
    for (auto& j : jobs) out.chains.push_back(j.get());
    for (auto& r : out.chains) finish(r);
    out.pooled = chains == 1 ? out.chains.front() : merge_chains(out.chains);
    return out;
}

std::string sweep_csv(const LimitSweep& s) {
    std::ostringstream o;
    o << std::setprecision(17);
    o << "parameter,estimate_re,estimate_im,stderr_re,stderr_im,n,ess\n";
    for (const auto& p : s.points)
        o << p.parameter << ',' << p.estimate.value.real() << ',' << p.estimate.value.imag() << ','
          << p.estimate.stderr_re << ',' << p.estimate.stderr_im << ',' << p.estimate.n << ',' << p.estimate.ess
          << '\n';
    return o.str();
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return 2;
    if (dynamic_cast<const CapacityError*>(&e)) return 4;
    if (dynamic_cast<const MergeError*>(&e)) return 5;
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const UnsupportedModeError*>(&e) || dynamic_cast<const PotentialError*>(&e) ||
        dynamic_cast<const ShapeError*>(&e))
        return 3;
    return 1;
}

}  // namespace bosegas
