#include "ghsv/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ghsv/config.hpp"
#include "ghsv/errors.hpp"
#include "ghsv/inference.hpp"
#include "ghsv/io.hpp"
#include "ghsv/simulation.hpp"
#include "ghsv/validate.hpp"

namespace ghsv::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int fail(int code, const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return code;
}

struct GridSpec {
    double lo = 0, hi = 0;
    int count = 0;
};

GridSpec parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 3) throw DomainError("--grid expects MIN,MAX,COUNT: " + text);
    GridSpec g;
    try {
        std::size_t used = 0;
        g.lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("");
        g.hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("");
        g.count = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw DomainError("--grid expects numeric MIN,MAX,COUNT: " + text);
    }
    if (!(g.hi > g.lo)) throw DomainError("--grid needs MIN < MAX");
    if (g.count < 2) throw DomainError("--grid needs COUNT >= 2");
    return g;
}

int env_threads() {
    const char* env = std::getenv("GHSV_THREADS");
    if (env == nullptr) return 1;
    const int v = std::atoi(env);
    return v < 1 ? 1 : v;
}

double quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double h = (v.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (h - lo) * (v[lo + 1] - v[lo]);
}

json stat_block(const std::vector<std::vector<double>>& per_chain) {
    std::vector<double> pooled;
    double ess = 0;
    for (const auto& c : per_chain) {
        pooled.insert(pooled.end(), c.begin(), c.end());
        ess += effective_sample_size(c);
    }
    const std::size_t N = pooled.size();
    double mean = 0;
    for (double x : pooled) mean += x;
    mean /= N;
    double var = 0;
    for (double x : pooled) var += (x - mean) * (x - mean);
    const double sd = N > 1 ? std::sqrt(var / (N - 1.0)) : 0.0;
    json j;
    j["mean"] = mean;
    j["sd"] = sd;
    j["q05"] = quantile(pooled, 0.05);
    j["q50"] = quantile(pooled, 0.50);
    j["q95"] = quantile(pooled, 0.95);
    j["ess"] = ess;
    return j;
}

struct CommonArgs {
    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool has_seed = false;
};

// --- simulate -------------------------------------------------------------

int cmd_simulate(const CommonArgs& a) {
    AppConfig cfg;
    SimConfig sc;
    fs::path dir;
    std::uint64_t seed = 0;
    try {
        cfg = load_config(a.config_path);
        if (a.has_seed) cfg.mcmc.seed = a.seed;
        seed = cfg.mcmc.seed;
        if (cfg.data.n < 1)
            throw DomainError("simulate requires data.n >= 1 in the config");
        if (cfg.model.alpha >= 0 && !(cfg.sim.eps > 0))
            throw DomainError(
                "simulate: families with alpha >= 0 have infinitely many small jumps; "
                "set sim.eps > 0");
        sc.n = cfg.data.n;
        sc.delta = cfg.data.delta;
        sc.lam = cfg.model.lam;
        sc.family = std::make_shared<GenGammaFamily>(cfg.model.alpha, cfg.model.b);
        sc.eta = cfg.model.eta;
        sc.ret = return_params(cfg.model, cfg.data.delta);
        sc.eps = cfg.sim.eps;
        sc.window_tol = cfg.sim.window_tol;
        dir = a.out_dir.empty() ? cfg.output.dir : a.out_dir;
        fs::create_directories(dir);
    } catch (const std::exception& e) {
        return fail(2, e.what());
    }

    try {
        RandomSource rng(seed, 0);
        const SimOutput so = simulate_dataset(sc, rng);

        std::vector<std::vector<double>> rows;
        rows.reserve(sc.n);
        for (int i = 0; i < sc.n; ++i)
            rows.push_back({(i + 1) * sc.delta, so.x[static_cast<std::size_t>(i)]});
        atomic_write_text((dir / "returns.csv").string(), csv_text({"t", "x"}, rows));

        std::string lat = "kind,index,value1,value2\n";
        for (std::size_t j = 0; j < so.jump_size.size(); ++j)
            lat += "jump," + std::to_string(j + 1) + "," + format_double(so.jump_loc[j]) +
                   "," + format_double(so.jump_size[j]) + "\n";
        for (int i = 0; i < sc.n; ++i)
            lat += "interval," + std::to_string(i + 1) + "," +
                   format_double(so.tau[static_cast<std::size_t>(i)]) + ",0\n";
        lat += "v0,0," + format_double(so.v0) + "," + format_double(so.window) + "\n";
        atomic_write_text((dir / "latents.csv").string(), lat);

        json man;
        man["schema"] = 1;
        man["command"] = "simulate";
        man["seed"] = seed;
        man["n"] = sc.n;
        man["delta"] = sc.delta;
        man["lam"] = sc.lam;
        man["alpha"] = cfg.model.alpha;
        man["b"] = cfg.model.b;
        man["eta"] = cfg.model.eta_desc;
        man["mu"] = cfg.model.mu;
        man["betas"] = cfg.model.betas;
        man["exponents"] = cfg.model.exponents;
        man["eps"] = sc.eps;
        man["window"] = so.window;
        man["window_tol"] = sc.window_tol;
        man["neglected_mean_mass"] = so.neglected_mean_mass;
        man["v0"] = so.v0;
        atomic_write_text((dir / "manifest.json").string(), man.dump(2) + "\n");

        std::cout << "simulate: n=" << sc.n << ", " << so.jump_size.size()
                  << " jumps, outputs in " << dir.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(3, e.what());
    }
}

// --- fit ------------------------------------------------------------------

int cmd_fit(const CommonArgs& a, const std::string& data_override) {
    AppConfig cfg;
    RunConfig rc;
    std::vector<double> X;
    fs::path dir;
    try {
        cfg = load_config(a.config_path);
        if (a.has_seed) cfg.mcmc.seed = a.seed;
        const std::string data_path =
            data_override.empty() ? cfg.data.path : data_override;
        if (data_path.empty())
            throw DomainError("fit needs a returns file: set data.path or pass --data");
        X = csv_column(read_csv(data_path), "x");
        if (X.empty()) throw DomainError("returns file has no rows: " + data_path);

        rc.ret = return_params(cfg.model, cfg.data.delta);
        if (!rc.ret.is_standard())
            throw DomainError(
                "fit supports the standard return parameterization only "
                "(exponents [0.5, 1] with a single beta)");
        rc.theta0.alpha = cfg.model.alpha;
        rc.theta0.b = cfg.model.b;
        rc.theta0.lam = cfg.model.lam;
        rc.theta0.validate();
        if (!(rc.theta0.b > 0))
            throw DomainError("fit requires b > 0 (the sampler needs a finite mean "
                              "jump size at zero tilt)");
        rc.ctx.n = static_cast<int>(X.size());
        rc.ctx.delta = cfg.data.delta;
        rc.ctx.eta = cfg.model.eta;
        rc.ctx.quad = cfg.numerics;
        rc.priors = cfg.mcmc.priors;
        rc.update = cfg.mcmc.update;
        rc.steps = cfg.mcmc.steps;
        rc.sampler = cfg.mcmc.sampler;
        rc.iters = cfg.mcmc.iters;
        rc.burnin = cfg.mcmc.burnin;
        rc.thin = cfg.mcmc.thin;
        rc.chains = cfg.mcmc.chains;
        rc.seed = cfg.mcmc.seed;
        dir = a.out_dir.empty() ? cfg.output.dir : a.out_dir;
        fs::create_directories(dir);
    } catch (const std::exception& e) {
        return fail(2, e.what());
    }

    try {
        const int chains = rc.chains;
        const int threads = std::min(env_threads(), chains);
        std::vector<ChainTrace> traces(chains);
        std::vector<std::string> errors(chains);
        auto work = [&](int first) {
            for (int k = first; k < chains; k += threads) {
                try {
                    traces[k] = run_chain(X, rc, k);
                } catch (const std::exception& e) {
                    errors[k] = "chain " + std::to_string(k + 1) + ": " + e.what();
                }
            }
        };
        if (threads <= 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(threads);
            for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
            for (auto& th : pool) th.join();
        }
        for (const auto& e : errors)
            if (!e.empty()) return fail(3, e);

        const std::vector<std::string> trace_header = {
            "iter", "mu",      "beta",   "alpha",  "b",
            "lam",  "n_cells", "loglik", "acc_w",  "acc_move",
            "acc_theta"};
        const char* stat_names[7] = {"mu", "beta", "alpha", "b",
                                     "lam", "n_cells", "loglik"};
        std::vector<std::vector<std::vector<double>>> series(
            7, std::vector<std::vector<double>>(chains));
        double acc_w = 0, acc_move = 0, acc_theta = 0;
        std::size_t rows_total = 0;

        for (int k = 0; k < chains; ++k) {
            const ChainTrace& tr = traces[k];
            std::vector<std::vector<double>> rows;
            std::string jsonl;
            rows.reserve(tr.rows.size());
            for (std::size_t i = 0; i < tr.rows.size(); ++i) {
                const TraceRow& r = tr.rows[i];
                const double iter =
                    static_cast<double>(rc.burnin + static_cast<int>(i) * rc.thin);
                rows.push_back({iter, r.mu, r.beta, r.alpha, r.b, r.lam,
                                static_cast<double>(r.n_cells), r.loglik, r.acc_w,
                                r.acc_move, static_cast<double>(r.acc_theta)});
                const double vals[7] = {r.mu, r.beta, r.alpha, r.b, r.lam,
                                        static_cast<double>(r.n_cells), r.loglik};
                for (int s = 0; s < 7; ++s) series[s][k].push_back(vals[s]);
                acc_w += r.acc_w;
                acc_move += r.acc_move;
                acc_theta += r.acc_theta;
                ++rows_total;

                const LatentDraw& d = tr.latents[i];
                json L;
                L["iter"] = iter;
                L["mu"] = d.mu;
                L["beta"] = d.beta;
                L["alpha"] = d.theta.alpha;
                L["b"] = d.theta.b;
                L["lam"] = d.theta.lam;
                L["w"] = d.w;
                L["cell_min"] = d.cell_min;
                L["cell_size"] = d.cell_size;
                L["jump_size"] = d.jump_size;
                L["jump_loc"] = d.jump_loc;
                jsonl += L.dump() + "\n";
            }
            const std::string tag = std::to_string(k + 1);
            atomic_write_text((dir / ("trace_chain" + tag + ".csv")).string(),
                              csv_text(trace_header, rows));
            atomic_write_text((dir / ("latents_chain" + tag + ".jsonl")).string(),
                              jsonl);
        }

        json summ;
        summ["schema"] = 1;
        summ["command"] = "fit";
        summ["sampler"] = rc.sampler == SamplerKind::partition ? "partition" : "spath";
        summ["chains"] = chains;
        summ["iters"] = rc.iters;
        summ["burnin"] = rc.burnin;
        summ["thin"] = rc.thin;
        summ["seed"] = rc.seed;
        summ["n"] = rc.ctx.n;
        summ["delta"] = rc.ctx.delta;
        json params;
        for (int s = 0; s < 7; ++s) params[stat_names[s]] = stat_block(series[s]);
        summ["params"] = params;
        json acc;
        acc["w"] = acc_w / rows_total;
        acc["move"] = acc_move / rows_total;
        acc["theta"] = acc_theta / rows_total;
        summ["acceptance"] = acc;
        summ["n_cells_mean"] = params["n_cells"]["mean"];
        atomic_write_text((dir / "summary.json").string(), summ.dump(2) + "\n");

        std::cout << "fit: " << chains << " chain(s) x " << rc.iters
                  << " kept draws, outputs in " << dir.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(3, e.what());
    }
}

// --- predict ----------------------------------------------------------------

LatentDraw draw_from_json(const json& j, std::size_t line_no) {
    auto need = [&](const char* key) -> const json& {
        auto it = j.find(key);
        if (it == j.end())
            throw DomainError("trace line " + std::to_string(line_no) +
                              ": missing field \"" + key + "\"");
        return *it;
    };
    LatentDraw d;
    d.mu = need("mu").get<double>();
    d.beta = need("beta").get<double>();
    d.theta.alpha = need("alpha").get<double>();
    d.theta.b = need("b").get<double>();
    d.theta.lam = need("lam").get<double>();
    d.w = need("w").get<std::vector<double>>();
    d.cell_min = need("cell_min").get<std::vector<int>>();
    d.cell_size = need("cell_size").get<std::vector<int>>();
    d.jump_size = need("jump_size").get<std::vector<double>>();
    d.jump_loc = need("jump_loc").get<std::vector<double>>();
    return d;
}

int cmd_predict(const CommonArgs& a, const std::string& trace_path,
                const std::string& grid_text, double horizon) {
    AppConfig cfg;
    RunConfig rc;
    std::vector<LatentDraw> draws;
    GridSpec grid;
    fs::path dir;
    try {
        cfg = load_config(a.config_path);
        grid = parse_grid(grid_text);
        if (horizon == 0) horizon = cfg.data.delta;
        if (!(horizon > 0)) throw DomainError("--horizon must be positive");

        std::size_t line_no = 0;
        for (const std::string& line : read_text_lines(trace_path)) {
            ++line_no;
            if (line.empty()) continue;
            draws.push_back(draw_from_json(json::parse(line), line_no));
        }
        if (draws.empty()) throw DomainError("empty trace: " + trace_path);
        const std::size_t n = draws[0].w.size();
        for (std::size_t r = 0; r < draws.size(); ++r) {
            const LatentDraw& d = draws[r];
            if (d.w.size() != n)
                throw DomainError("trace line " + std::to_string(r + 1) +
                                  ": inconsistent series length");
            if (d.cell_min.size() != d.cell_size.size() ||
                d.jump_size.size() != d.jump_loc.size())
                throw DomainError("trace line " + std::to_string(r + 1) +
                                  ": mismatched latent arrays");
            if (!(d.theta.b > 0))
                throw DomainError("trace line " + std::to_string(r + 1) +
                                  ": prediction needs b > 0");
        }
        rc.ctx.n = static_cast<int>(n);
        rc.ctx.delta = cfg.data.delta;
        rc.ctx.eta = cfg.model.eta;
        rc.ctx.quad = cfg.numerics;
        rc.ret = return_params(cfg.model, cfg.data.delta);
        dir = a.out_dir.empty() ? cfg.output.dir : a.out_dir;
        fs::create_directories(dir);
    } catch (const std::exception& e) {
        return fail(2, e.what());
    }

    try {
        const PredictiveResult res =
            predictive_density(draws, rc, grid.lo, grid.hi, grid.count, horizon);
        std::vector<std::vector<double>> rows;
        rows.reserve(res.x.size());
        for (std::size_t q = 0; q < res.x.size(); ++q)
            rows.push_back({res.x[q], res.density[q], res.se[q]});
        const std::string footer = "# grid_integral=" + format_double(res.grid_integral);
        atomic_write_text((dir / "predictive.csv").string(),
                          csv_text({"x", "density", "mc_se"}, rows, {footer}));
        std::cout << "predict: " << draws.size() << " draws, grid integral "
                  << format_double(res.grid_integral) << ", outputs in " << dir.string()
                  << "\n";
        return 0;
    } catch (const UnsupportedError& e) {
        return fail(2, e.what());
    } catch (const std::exception& e) {
        return fail(3, e.what());
    }
}

// --- validate ---------------------------------------------------------------

int cmd_validate(const CommonArgs& a, const std::string& suite, int n) {
    std::vector<CheckResult> results;
    try {
        std::uint64_t seed = 1;
        if (!a.config_path.empty()) seed = load_config(a.config_path).mcmc.seed;
        if (a.has_seed) seed = a.seed;
        results = run_validate_suite(suite, n, seed);
    } catch (const QuadratureError& e) {
        return fail(3, e.what());
    } catch (const std::exception& e) {
        return fail(2, e.what());
    }

    std::size_t passed = 0;
    for (const CheckResult& r : results) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-4s  %-46s observed %-12.4g tol %-10.4g %s",
                      r.pass ? "PASS" : "FAIL", r.name.c_str(), r.observed, r.tolerance,
                      r.detail.c_str());
        std::cout << buf << "\n";
        if (r.pass) ++passed;
    }
    std::cout << "suite " << suite << ": " << passed << "/" << results.size()
              << " checks passed\n";
    return passed == results.size() ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"latent-jump stochastic volatility toolkit"};
    app.require_subcommand(1);

    CommonArgs sim_a, fit_a, pre_a, val_a;
    std::string fit_data, pre_trace, pre_grid, val_suite;
    double pre_horizon = 0;
    int val_n = 0;

    auto attach = [](CLI::App* cmd, CommonArgs& c, bool config_required) {
        auto* opt = cmd->add_option("--config", c.config_path,
                                    "JSON run configuration (schema 1)");
        if (config_required) opt->required();
        cmd->add_option("--out-dir", c.out_dir, "output directory (overrides config)");
        cmd->add_option("--seed", c.seed, "RNG seed (overrides config)");
    };

    CLI::App* sim = app.add_subcommand("simulate",
                                       "generate a synthetic returns dataset");
    attach(sim, sim_a, true);

    CLI::App* fit = app.add_subcommand("fit", "run the posterior sampler on returns");
    attach(fit, fit_a, true);
    fit->add_option("--data", fit_data, "returns CSV (overrides config data.path)");

    CLI::App* pre = app.add_subcommand("predict",
                                       "posterior predictive density from a trace");
    attach(pre, pre_a, true);
    pre->add_option("--trace", pre_trace, "latents JSONL written by fit")->required();
    pre->add_option("--grid", pre_grid, "evaluation grid MIN,MAX,COUNT")->required();
    pre->add_option("--horizon", pre_horizon,
                    "prediction interval length (default: data.delta)");

    CLI::App* val = app.add_subcommand("validate", "run a numerical check suite");
    attach(val, val_a, false);
    val->add_option("--suite", val_suite, "suite name")->required();
    val->add_option("--n", val_n, "series length where the suite accepts one");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    sim_a.has_seed = sim->count("--seed") > 0;
    fit_a.has_seed = fit->count("--seed") > 0;
    pre_a.has_seed = pre->count("--seed") > 0;
    val_a.has_seed = val->count("--seed") > 0;

    if (sim->parsed()) return cmd_simulate(sim_a);
    if (fit->parsed()) return cmd_fit(fit_a, fit_data);
    if (pre->parsed()) return cmd_predict(pre_a, pre_trace, pre_grid, pre_horizon);
    if (val->parsed()) return cmd_validate(val_a, val_suite, val_n);
    return 2;
}

int run(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.emplace_back("ghsv");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const auto& s : full) argv.push_back(s.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ghsv::cli
