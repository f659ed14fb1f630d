#include "bosegas/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

[[noreturn]] void fail_at(const YAML::Node& n, const std::string& msg) {
    auto m = n.Mark();
    throw ParseError(msg, m.line + 1, m.column + 1);
}

template <class T>
T read(const YAML::Node& n, const std::string& key) {
    if (!n.IsScalar()) fail_at(n, "'" + key + "' expects a scalar");
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail_at(n, "bad value '" + n.Scalar() + "' for '" + key + "'");
    }
}

std::vector<double> read_list(const YAML::Node& n, const std::string& key) {
    if (!n.IsSequence()) fail_at(n, "'" + key + "' expects a list");
    std::vector<double> out;
    for (const auto& e : n) out.push_back(read<double>(e, key));
    return out;
}

// walks one section, rejecting keys not in the allowed set
template <class F>
void section(const YAML::Node& root, const std::string& name, const std::set<std::string>& allowed, F&& f) {
    YAML::Node s = root[name];
    if (!s || s.IsNull()) return;
    if (!s.IsMap()) fail_at(s, "section '" + name + "' must be a mapping");
    for (auto it = s.begin(); it != s.end(); ++it) {
        std::string k = it->first.Scalar();
        if (!allowed.count(k)) fail_at(it->first, "unknown key '" + name + "." + k + "'");
        f(k, it->second);
    }
}

long long read_count(const YAML::Node& n, const std::string& key) { return read<long long>(n, key); }

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    ExperimentConfig c;
    if (!root || root.IsNull()) return c;
    if (!root.IsMap()) fail_at(root, "config must be a mapping of sections");

    static const std::set<std::string> sections{"version", "geometry", "potential", "model", "grid",
                                                "mc",      "truncation", "observable", "limit"};
    for (auto it = root.begin(); it != root.end(); ++it)
        if (!sections.count(it->first.Scalar())) fail_at(it->first, "unknown section '" + it->first.Scalar() + "'");

    if (root["version"]) {
        c.version = read<int>(root["version"], "version");
        if (c.version != kConfigVersion) fail_at(root["version"], "unsupported config version");
    }
    long long m = c.m, samples = static_cast<long long>(c.samples), chains = c.chains;
    section(root, "geometry", {"d", "m", "circle"}, [&](const std::string& k, const YAML::Node& n) {
        if (k == "d") c.d = read<int>(n, k);
        if (k == "m") m = read_count(n, k);
        if (k == "circle") {
            c.circle = true;
            c.circumference = read<double>(n, k);
        }
    });
    c.m = static_cast<int>(m);
    section(root, "potential", {"kind", "amplitude", "width", "values"}, [&](const std::string& k, const YAML::Node& n) {
        if (k == "kind") c.potential.kind = read<std::string>(n, k);
        if (k == "amplitude") c.potential.amplitude = read<double>(n, k);
        if (k == "width") c.potential.width = read<double>(n, k);
        if (k == "values") c.potential.values = read_list(n, k);
    });
    section(root, "model", {"nu", "kappa0", "lambda0", "N", "coupling_mode", "rho_mode", "rho"},
            [&](const std::string& k, const YAML::Node& n) {
                if (k == "nu") c.model.nu = read<double>(n, k);
                if (k == "kappa0") c.model.kappa0 = read<double>(n, k);
                if (k == "lambda0") c.model.lambda0 = read<double>(n, k);
                if (k == "N") c.model.N = read<double>(n, k);
                if (k == "rho") c.model.rho_value = read<double>(n, k);
                try {
                    if (k == "coupling_mode") c.model.coupling = coupling_from_string(read<std::string>(n, k));
                    if (k == "rho_mode") c.model.rho_mode = rho_mode_from_string(read<std::string>(n, k));
                } catch (const DomainError& e) {
                    fail_at(n, e.what());
                }
            });
    section(root, "grid", {"n_tau"}, [&](const std::string& k, const YAML::Node& n) { c.n_tau = read<int>(n, k); });
    section(root, "mc", {"samples", "seed", "chains"}, [&](const std::string& k, const YAML::Node& n) {
        if (k == "samples") samples = read_count(n, k);
        if (k == "seed") c.seed = read<std::uint64_t>(n, k);
        if (k == "chains") chains = read_count(n, k);
    });
    if (samples < 0) throw ValidationError("mc.samples must be >= 0");
    if (chains < 1 || chains > 4096) throw ValidationError("mc.chains must lie in [1, 4096]");
    c.samples = static_cast<std::size_t>(samples);
    c.chains = static_cast<int>(chains);
    section(root, "truncation", {"n_max", "l_max"}, [&](const std::string& k, const YAML::Node& n) {
        if (k == "n_max") c.n_max = read<int>(n, k);
        if (k == "l_max") c.l_max = read<int>(n, k);
    });
    section(root, "observable", {"kind", "tau", "tau_prime", "x", "x_prime"},
            [&](const std::string& k, const YAML::Node& n) {
                if (k == "kind") c.observable.kind = read<std::string>(n, k);
                if (k == "tau") c.observable.tau = read<double>(n, k);
                if (k == "tau_prime") c.observable.tau_prime = read<double>(n, k);
                if (k == "x") c.observable.x = read<double>(n, k);
                if (k == "x_prime") c.observable.x_prime = read<double>(n, k);
            });
    section(root, "limit", {"kind", "nu_list", "z", "circumference", "eps", "N_list", "tolerance"},
            [&](const std::string& k, const YAML::Node& n) {
                if (k == "kind") c.limit.kind = read<std::string>(n, k);
                if (k == "nu_list") c.limit.nu_list = read_list(n, k);
                if (k == "z") c.limit.z = read<double>(n, k);
                if (k == "circumference") c.limit.circumference = read<double>(n, k);
                if (k == "eps") c.limit.eps = read<double>(n, k);
                if (k == "N_list") c.limit.N_list = read_list(n, k);
                if (k == "tolerance") c.limit.tolerance = read<double>(n, k);
            });
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& c) {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ValidationError(msg);
    };
    need(c.d >= 1 && c.d <= 3, "geometry.d must be 1, 2 or 3");
    need(c.m >= 1 && c.m <= 64, "geometry.m must lie in [1, 64]");
    if (c.circle) {
        need(c.d == 1, "circle geometry requires d = 1");
        need(std::isfinite(c.circumference) && c.circumference > 0.0, "geometry.circle must be positive");
    }
    try {
        c.model.check();
    } catch (const DomainError& e) {
        throw ValidationError(std::string("model: ") + e.what());
    }
    need(std::isfinite(c.model.nu) && std::isfinite(c.model.kappa0) && std::isfinite(c.model.lambda0) &&
             std::isfinite(c.model.N) && std::isfinite(c.model.rho_value),
         "model parameters must be finite");
    need(c.n_tau >= 1 && c.n_tau <= 4096, "grid.n_tau must lie in [1, 4096]");
    if (c.n_max) need(*c.n_max >= 0 && *c.n_max <= 64, "truncation.n_max must lie in [0, 64]");
    if (c.l_max) need(*c.l_max >= 1 && *c.l_max <= 400, "truncation.l_max must lie in [1, 400]");
    static const std::set<std::string> kinds{"delta", "gaussian", "zero", "values"};
    need(kinds.count(c.potential.kind) > 0, "potential.kind must be delta, gaussian, zero or values");
    need(c.potential.width > 0.0, "potential.width must be positive");
    if (c.potential.kind == "values") {
        need(!c.circle, "potential.values needs a lattice geometry");
        int sites = 1;
        for (int i = 0; i < c.d; ++i) sites *= c.m;
        need(static_cast<int>(c.potential.values.size()) == sites, "potential.values needs one entry per site");
    }
    static const std::set<std::string> obs{"",          "xi",     "xi_rel", "log_xi_rel", "duhamel",
                                           "gamma1",    "two_point", "z_eta", "radial"};
    need(obs.count(c.observable.kind) > 0, "unknown observable.kind '" + c.observable.kind + "'");
    need(c.observable.tau >= 0.0 && c.observable.tau_prime >= 0.0, "observable times must be >= 0");
    static const std::set<std::string> lim{"classical", "meanfield", "largeN"};
    need(lim.count(c.limit.kind) > 0, "limit.kind must be classical, meanfield or largeN");
    for (double nu : c.limit.nu_list) need(nu > 0.0, "limit.nu_list entries must be positive");
    for (std::size_t k = 1; k < c.limit.nu_list.size(); ++k)
        need(c.limit.nu_list[k] < c.limit.nu_list[k - 1], "limit.nu_list must be strictly decreasing");
    for (double N : c.limit.N_list) need(N > 0.0, "limit.N_list entries must be positive");
    need(c.limit.z > 0.0 && c.limit.circumference > 0.0 && c.limit.eps > 0.0 && c.limit.tolerance > 0.0,
         "limit z, circumference, eps and tolerance must be positive");
}

TorusGeometry make_geometry(const ExperimentConfig& c) {
    return c.circle ? TorusGeometry::circle(c.circumference) : TorusGeometry::lattice(c.d, c.m);
}

TwoBodyPotential make_potential(const ExperimentConfig& c, const TorusGeometry& g) {
    const auto& p = c.potential;
    if (p.kind == "zero") return TwoBodyPotential::zero(g);
    if (p.kind == "gaussian") return TwoBodyPotential::gaussian(g, p.amplitude, p.width);
    if (p.kind == "values") return TwoBodyPotential::from_values(g, p.values);
    return TwoBodyPotential::delta(g, p.amplitude);
}

TimeGrid make_grid(const ExperimentConfig& c) { return TimeGrid(c.model.nu, c.n_tau); }

int resolved_n_max(const ExperimentConfig& c, const std::string& command) {
    if (c.n_max) return *c.n_max;
    if (command == "oracle") return 10;
    if (command == "mayer") return 3;
    if (command == "limit") return 8;
    return 6;
}

int resolved_l_max(const ExperimentConfig& c) { return c.l_max ? *c.l_max : 6; }

std::string resolved_observable(const ExperimentConfig& c, const std::string& command) {
    if (!c.observable.kind.empty()) return c.observable.kind;
    if (command == "oracle") return "xi";
    if (command == "mayer") return "log_xi_rel";
    if (command == "field") return "two_point";
    return "xi_rel";
}

}  // namespace bosegas
