#include "ghsv/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

#include "ghsv/errors.hpp"
#include "ghsv/io.hpp"

namespace ghsv {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key()))
            throw DomainError("config: unknown key \"" + it.key() + "\" in " + where);
}

double num_or(const json& j, const char* key, double dflt, const std::string& where) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number())
        throw DomainError("config: " + where + "." + key + " must be a number");
    return j.at(key).get<double>();
}

int int_or(const json& j, const char* key, int dflt, const std::string& where) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number_integer())
        throw DomainError("config: " + where + "." + key + " must be an integer");
    return j.at(key).get<int>();
}

bool bool_or(const json& j, const char* key, bool dflt, const std::string& where) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_boolean())
        throw DomainError("config: " + where + "." + key + " must be a boolean");
    return j.at(key).get<bool>();
}

std::string str_or(const json& j, const char* key, const std::string& dflt,
                   const std::string& where) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_string())
        throw DomainError("config: " + where + "." + key + " must be a string");
    return j.at(key).get<std::string>();
}

std::vector<double> num_array(const json& j, const char* key, const std::string& where) {
    const auto& a = j.at(key);
    if (!a.is_array()) throw DomainError("config: " + where + "." + key + " must be an array");
    std::vector<double> v;
    for (const auto& x : a) {
        if (!x.is_number())
            throw DomainError("config: " + where + "." + key + " must hold numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

ModelConfig parse_model(const json& j) {
    check_keys(j, "model",
               {"lam", "alpha", "b", "mu", "beta", "betas", "exponents", "eta"});
    ModelConfig m;
    m.lam = num_or(j, "lam", m.lam, "model");
    m.alpha = num_or(j, "alpha", m.alpha, "model");
    m.b = num_or(j, "b", m.b, "model");
    m.mu = num_or(j, "mu", m.mu, "model");
    if (j.contains("beta") && j.contains("betas"))
        throw DomainError("config: model has both beta and betas");
    if (j.contains("beta")) {
        m.betas = {num_or(j, "beta", 0.0, "model")};
    } else if (j.contains("betas")) {
        m.betas = num_array(j, "betas", "model");
        if (!j.contains("exponents"))
            throw DomainError("config: model.betas requires model.exponents");
    }
    if (j.contains("exponents")) m.exponents = num_array(j, "exponents", "model");
    if (m.betas.size() + 1 != m.exponents.size())
        throw DomainError("config: need len(exponents) = len(betas) + 1");

    // the valid (alpha, b) region of the gen-Gamma family, checked here so a
    // bad combination is a config error rather than a runtime failure
    const bool stable_side = m.alpha > 0 && m.alpha < 1 && m.b >= 0;
    const bool finite_side = m.alpha <= 0 && m.b > 0;
    if (!stable_side && !finite_side)
        throw DomainError(
            "config: invalid (alpha, b): need either 0 < alpha < 1 with b >= 0, or "
            "alpha <= 0 with b > 0");
    if (!(m.lam > 0)) throw DomainError("config: model.lam must be positive");

    if (j.contains("eta")) {
        const auto& e = j.at("eta");
        check_keys(e, "model.eta", {"kind", "mean", "sd"});
        const std::string kind = str_or(e, "kind", "const", "model.eta");
        if (kind == "const") {
            m.eta = EtaDensity::one();
            m.eta_desc = "const";
        } else if (kind == "gaussian") {
            const double mean = num_or(e, "mean", 0.0, "model.eta");
            const double sd = num_or(e, "sd", 1.0, "model.eta");
            if (!(sd > 0)) throw DomainError("config: model.eta.sd must be positive");
            EtaDensity eta;
            eta.is_const_one = false;
            eta.pdf = [mean, sd](double y) {
                const double z = (y - mean) / sd;
                return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
            };
            m.eta = eta;
            m.eta_desc = "gaussian(mean=" + format_double(mean) + ",sd=" +
                         format_double(sd) + ")";
        } else {
            throw DomainError("config: model.eta.kind must be \"const\" or \"gaussian\"");
        }
    }
    return m;
}

DataConfig parse_data(const json& j) {
    check_keys(j, "data", {"path", "delta", "n"});
    DataConfig d;
    d.path = str_or(j, "path", "", "data");
    d.delta = num_or(j, "delta", d.delta, "data");
    d.n = int_or(j, "n", d.n, "data");
    if (!(d.delta > 0)) throw DomainError("config: data.delta must be positive");
    if (d.n < 0) throw DomainError("config: data.n must be non-negative");
    return d;
}

McmcConfig parse_mcmc(const json& j) {
    check_keys(j, "mcmc",
               {"iters", "burnin", "thin", "chains", "seed", "sampler", "update",
                "steps", "priors"});
    McmcConfig m;
    m.iters = int_or(j, "iters", m.iters, "mcmc");
    m.burnin = int_or(j, "burnin", m.burnin, "mcmc");
    m.thin = int_or(j, "thin", m.thin, "mcmc");
    m.chains = int_or(j, "chains", m.chains, "mcmc");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
            throw DomainError("config: mcmc.seed must be an integer");
        m.seed = j.at("seed").get<std::uint64_t>();
    }
    const std::string s = str_or(j, "sampler", "partition", "mcmc");
    if (s == "partition")
        m.sampler = SamplerKind::partition;
    else if (s == "spath")
        m.sampler = SamplerKind::spath;
    else
        throw DomainError("config: mcmc.sampler must be \"partition\" or \"spath\"");
    if (m.iters < 1 || m.burnin < 0 || m.thin < 1 || m.chains < 1)
        throw DomainError("config: mcmc counts out of range");

    if (j.contains("update")) {
        const auto& u = j.at("update");
        check_keys(u, "mcmc.update", {"jumps", "seating", "w", "mu", "beta", "theta"});
        m.update.jumps = bool_or(u, "jumps", true, "mcmc.update");
        m.update.seating = bool_or(u, "seating", true, "mcmc.update");
        m.update.w = bool_or(u, "w", true, "mcmc.update");
        m.update.mu = bool_or(u, "mu", true, "mcmc.update");
        m.update.beta = bool_or(u, "beta", true, "mcmc.update");
        m.update.theta = bool_or(u, "theta", true, "mcmc.update");
    }
    if (j.contains("steps")) {
        const auto& st = j.at("steps");
        check_keys(st, "mcmc.steps", {"logb", "loglam", "alpha", "spath_moves"});
        m.steps.logb = num_or(st, "logb", m.steps.logb, "mcmc.steps");
        m.steps.loglam = num_or(st, "loglam", m.steps.loglam, "mcmc.steps");
        m.steps.alpha = num_or(st, "alpha", m.steps.alpha, "mcmc.steps");
        m.steps.spath_moves = int_or(st, "spath_moves", 0, "mcmc.steps");
    }
    if (j.contains("priors")) {
        const auto& p = j.at("priors");
        check_keys(p, "mcmc.priors",
                   {"mu_mean", "mu_sd", "beta_mean", "beta_sd", "logb_mean", "logb_sd",
                    "loglam_mean", "loglam_sd", "alpha_lo", "alpha_hi"});
        m.priors.mu_mean = num_or(p, "mu_mean", m.priors.mu_mean, "mcmc.priors");
        m.priors.mu_sd = num_or(p, "mu_sd", m.priors.mu_sd, "mcmc.priors");
        m.priors.beta_mean = num_or(p, "beta_mean", m.priors.beta_mean, "mcmc.priors");
        m.priors.beta_sd = num_or(p, "beta_sd", m.priors.beta_sd, "mcmc.priors");
        m.priors.logb_mean = num_or(p, "logb_mean", m.priors.logb_mean, "mcmc.priors");
        m.priors.logb_sd = num_or(p, "logb_sd", m.priors.logb_sd, "mcmc.priors");
        m.priors.loglam_mean =
            num_or(p, "loglam_mean", m.priors.loglam_mean, "mcmc.priors");
        m.priors.loglam_sd = num_or(p, "loglam_sd", m.priors.loglam_sd, "mcmc.priors");
        m.priors.alpha_lo = num_or(p, "alpha_lo", m.priors.alpha_lo, "mcmc.priors");
        m.priors.alpha_hi = num_or(p, "alpha_hi", m.priors.alpha_hi, "mcmc.priors");
        if (!(m.priors.mu_sd > 0) || !(m.priors.beta_sd > 0) ||
            !(m.priors.logb_sd > 0) || !(m.priors.loglam_sd > 0))
            throw DomainError("config: prior scales must be positive");
        if (!(m.priors.alpha_lo < m.priors.alpha_hi) || m.priors.alpha_lo <= -2 ||
            m.priors.alpha_hi >= 1)
            throw DomainError("config: alpha prior range must sit inside (-2, 1)");
    }
    return m;
}

QuadratureConfig parse_numerics(const json& j) {
    check_keys(j, "numerics", {"nodes", "init_panels", "max_panels", "abs_tol", "rel_tol"});
    QuadratureConfig q;
    q.nodes = int_or(j, "nodes", q.nodes, "numerics");
    q.init_panels = int_or(j, "init_panels", q.init_panels, "numerics");
    q.max_panels = int_or(j, "max_panels", q.max_panels, "numerics");
    q.abs_tol = num_or(j, "abs_tol", q.abs_tol, "numerics");
    q.rel_tol = num_or(j, "rel_tol", q.rel_tol, "numerics");
    if (q.nodes < 2 || q.nodes > 64 || q.init_panels < 2 || q.max_panels < q.init_panels)
        throw DomainError("config: numerics panel/node counts out of range");
    if (!(q.abs_tol > 0) || !(q.rel_tol > 0))
        throw DomainError("config: numerics tolerances must be positive");
    return q;
}

SimExtras parse_sim(const json& j) {
    check_keys(j, "sim", {"eps", "window_tol"});
    SimExtras s;
    s.eps = num_or(j, "eps", s.eps, "sim");
    s.window_tol = num_or(j, "window_tol", s.window_tol, "sim");
    if (s.eps < 0) throw DomainError("config: sim.eps must be >= 0");
    if (!(s.window_tol > 0) || !(s.window_tol < 1))
        throw DomainError("config: sim.window_tol must be in (0,1)");
    return s;
}

}  // namespace

AppConfig parse_config_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DomainError("config: " + origin + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw DomainError("config: top level must be an object");
    check_keys(j, "top level", {"schema", "model", "data", "mcmc", "numerics", "sim", "output"});
    if (!j.contains("schema") || !j.at("schema").is_number_integer() ||
        j.at("schema").get<int>() != 1)
        throw DomainError("config: requires \"schema\": 1");
    AppConfig cfg;
    if (j.contains("model")) cfg.model = parse_model(j.at("model"));
    if (j.contains("data")) cfg.data = parse_data(j.at("data"));
    if (j.contains("mcmc")) cfg.mcmc = parse_mcmc(j.at("mcmc"));
    if (j.contains("numerics")) cfg.numerics = parse_numerics(j.at("numerics"));
    if (j.contains("sim")) cfg.sim = parse_sim(j.at("sim"));
    if (j.contains("output")) {
        check_keys(j.at("output"), "output", {"dir"});
        cfg.output.dir = str_or(j.at("output"), "dir", ".", "output");
    }
    return cfg;
}

AppConfig load_config(const std::string& path) {
    return parse_config_text(read_text(path), path);
}

ReturnParams return_params(const ModelConfig& m, double delta) {
    ReturnParams p;
    p.mu = m.mu;
    p.dt = delta;
    p.betas = m.betas;
    p.exponents = m.exponents;
    p.validate();
    return p;
}

}  // namespace ghsv
