#include "ghsv/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ghsv/errors.hpp"

namespace ghsv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int uniform_index(RandomSource& rng, int n) {
    const int k = static_cast<int>(rng.uniform() * n);
    return std::min(k, n - 1);
}

double reflect_into(double x, double lo, double hi) {
    const double range = hi - lo;
    if (!(range > 0)) return lo;
    double t = std::fmod(x - lo, 2 * range);
    if (t < 0) t += 2 * range;
    return t <= range ? lo + t : lo + 2 * range - t;
}

int cell_min(const std::vector<int>& cell) {
    return *std::min_element(cell.begin(), cell.end());
}

// one instantiated jump: the cell it carries (minimum index and size) plus
// its (size, location) pair
struct ActiveCell {
    int istar;
    int e;
    double J;
    double Y;
};

// log joint factor of theta given everything else. Collecting the cell
// factors J^e e^{-J Omega(Y)} rho(J) a(C) shape(Y) eta(Y), the theta-bearing
// parts are rho, Omega, shape, and the a factors, whose product over cells
// telescopes to a_total regardless of the grouping; J^e and eta are free.
double theta_logtarget(const ChainContext& ctx, const ThetaParams& th,
                       const std::vector<double>& w,
                       const std::vector<ActiveCell>& act, const Priors& pr) {
    if (th.alpha < pr.alpha_lo || th.alpha > pr.alpha_hi) return kNegInf;
    const OuKernel K = ctx.make_kernel(th);
    const auto r = K.r_weights(w);
    double lp = normal_logpdf(std::log(th.b), pr.logb_mean, pr.logb_sd * pr.logb_sd) +
                normal_logpdf(std::log(th.lam), pr.loglam_mean, pr.loglam_sd * pr.loglam_sd);
    lp -= K.laplace(w);
    lp += K.log_a_total();
    const double lg1a = std::lgamma(1.0 - th.alpha);
    for (const auto& a : act) {
        lp += -(th.alpha + 1.0) * std::log(a.J) - th.b * a.J - lg1a;
        lp += -a.J * K.omega(a.Y, w, r);
        const double s = K.cell_logshape(a.istar, a.e, a.Y);
        if (!std::isfinite(s)) return kNegInf;
        lp += s;
    }
    return lp;
}

// shared theta random-walk step; returns true on acceptance
bool theta_mh_step(ThetaParams& theta, const ChainContext& ctx,
                   const std::vector<double>& w, const std::vector<ActiveCell>& act,
                   const Priors& pr, const StepSizes& step, RandomSource& rng) {
    ThetaParams prop = theta;
    prop.alpha = reflect_into(theta.alpha + step.alpha * rng.normal(), pr.alpha_lo,
                              pr.alpha_hi);
    prop.b = std::exp(std::log(theta.b) + step.logb * rng.normal());
    prop.lam = std::exp(std::log(theta.lam) + step.loglam * rng.normal());
    const double cur = theta_logtarget(ctx, theta, w, act, pr);
    const double nxt = theta_logtarget(ctx, prop, w, act, pr);
    if (std::log(rng.uniform()) < nxt - cur) {
        theta = prop;
        return true;
    }
    return false;
}

// Metropolis scan over the mixing weights. Proposal is the exact
// jump-conditional GIG(3/2, |beta|, sqrt(A_i^2 + 2 T_i)); the remaining
// factor is the Laplace functional, so acceptance is exp(-delta Lambda),
// with only pieces 0..i affected by coordinate i.
double w_mh_scan(std::vector<double>& w, const std::vector<double>& X, double mu,
                 double beta, const OuKernel& K,
                 const std::vector<ActiveCell>& act, RandomSource& rng) {
    const int n = K.n;
    auto parts = K.laplace_decomposed(w);
    int accepted = 0;
    std::vector<double> wprop_vec = w;
    for (int i = 1; i <= n; ++i) {
        double T = 0;
        for (const auto& a : act) T += a.J * K.g_weight(i, a.Y);
        const double A = X[i - 1] - mu * K.delta;
        const double v = std::sqrt(A * A + 2.0 * T);
        const double wprop = gig_sample(rng, 1.5, std::fabs(beta), v);
        wprop_vec[i - 1] = wprop;
        const auto rnew = K.r_weights(wprop_vec);
        const double phi0_new = K.phi0_piece(rnew[0]);
        double d_new = phi0_new, d_old = parts.phi0;
        std::vector<double> phi_new(i);
        for (int k = 1; k <= i; ++k) {
            phi_new[k - 1] = K.phi_piece(k, wprop_vec, rnew);
            d_new += phi_new[k - 1];
            d_old += parts.phi[k - 1];
        }
        if (std::log(rng.uniform()) < -(d_new - d_old)) {
            w[i - 1] = wprop;
            parts.phi0 = phi0_new;
            for (int k = 1; k <= i; ++k) parts.phi[k - 1] = phi_new[k - 1];
            ++accepted;
        } else {
            wprop_vec[i - 1] = w[i - 1];
        }
    }
    return n > 0 ? static_cast<double>(accepted) / n : 0.0;
}

void conjugate_mu_beta(double& mu, double& beta, const std::vector<double>& X,
                       const std::vector<double>& w, double delta, const Priors& pr,
                       bool do_mu, bool do_beta, RandomSource& rng) {
    const int n = static_cast<int>(X.size());
    if (do_beta) {
        double prec = 1.0 / (pr.beta_sd * pr.beta_sd);
        double num = pr.beta_mean * prec;
        for (int i = 0; i < n; ++i) {
            prec += 1.0 / w[i];
            num += X[i] - mu * delta;
        }
        beta = num / prec + rng.normal() / std::sqrt(prec);
    }
    if (do_mu) {
        double prec = 1.0 / (pr.mu_sd * pr.mu_sd);
        double num = pr.mu_mean * prec;
        for (int i = 0; i < n; ++i) {
            prec += delta * delta * w[i];
            num += delta * (w[i] * X[i] - beta);
        }
        mu = num / prec + rng.normal() / std::sqrt(prec);
    }
}

double conditional_data_loglik(const std::vector<double>& X, const std::vector<double>& w,
                               double mu, double beta, double delta) {
    const ReturnParams p = ReturnParams::standard(mu, beta, delta);
    double total = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double m, v;
        conditional_moments(p, w[i], m, v);
        total += normal_logpdf(X[i], m, v);
    }
    return total;
}

}  // namespace

void ThetaParams::validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(b) || !std::isfinite(lam))
        throw DomainError("ThetaParams: non-finite value");
    if (!(lam > 0)) throw DomainError("ThetaParams: lam must be positive");
    if (!(alpha < 1)) throw DomainError("ThetaParams: alpha must be < 1");
    if (b < 0 || (alpha <= 0 && !(b > 0)))
        throw DomainError("ThetaParams: b out of range for the jump family");
}

OuKernel ChainContext::make_kernel(const ThetaParams& th) const {
    th.validate();
    return OuKernel(th.lam, delta, n, std::make_shared<GenGammaFamily>(th.alpha, th.b),
                    eta, quad);
}

double loglik_partition_sum(const std::vector<double>& X, const std::vector<double>& w,
                            const ReturnParams& ret, const OuKernel& K) {
    const int n = K.n;
    if (static_cast<int>(X.size()) != n || static_cast<int>(w.size()) != n)
        throw DomainError("loglik_partition_sum: size mismatch");
    if (n > 8) throw DomainError("loglik_partition_sum: enumeration limited to n <= 8");
    OuTable tab(K, w);
    const auto parts = enumerate_partitions(n);
    std::vector<double> terms;
    terms.reserve(parts.size());
    for (const auto& p : parts) {
        double t = 0;
        for (const auto& cell : p) t += tab.log_theta(cell);
        terms.push_back(t);
    }
    double total = log_sum_exp(terms) - K.laplace(w);
    for (int i = 0; i < n; ++i) {
        double m, v;
        conditional_moments(ret, w[i], m, v);
        total += normal_logpdf(X[i], m, v);
    }
    return total;
}

double loglik_spath_sum(const std::vector<double>& X, const std::vector<double>& w,
                        const ReturnParams& ret, const OuKernel& K) {
    const int n = K.n;
    if (static_cast<int>(X.size()) != n || static_cast<int>(w.size()) != n)
        throw DomainError("loglik_spath_sum: size mismatch");
    OuTable tab(K, w);
    const auto paths = enumerate_spaths(n);
    std::vector<double> terms;
    terms.reserve(paths.size());
    for (const auto& m : paths) {
        double t = std::log(spath_preimage_count(m));
        for (int i = 0; i < n; ++i)
            if (m[i] > 0) t += tab.log_phi(i + 1, m[i]);
        terms.push_back(t);
    }
    double total = K.log_a_total() + log_sum_exp(terms) - K.laplace(w);
    for (int i = 0; i < n; ++i) {
        double m, v;
        conditional_moments(ret, w[i], m, v);
        total += normal_logpdf(X[i], m, v);
    }
    return total;
}

std::vector<double> crp_seat_logweights(OuTable& tab, const Partition& cells, int idx) {
    const OuKernel& K = tab.kernel();
    K.validate_index(idx);
    std::vector<double> lw(cells.size() + 1);
    lw[0] = K.log_a1(idx) + tab.log_phi(idx, 1);
    for (std::size_t j = 0; j < cells.size(); ++j) {
        const int mn = cell_min(cells[j]);
        const int e = static_cast<int>(cells[j].size());
        lw[j + 1] =
            K.log_a1(idx) + tab.log_phi(std::min(mn, idx), e + 1) - tab.log_phi(mn, e);
    }
    return lw;
}

SweepStats gibbs_sweep(GibbsState& st, const std::vector<double>& X,
                       const ChainContext& ctx, const Priors& pr, const UpdateFlags& up,
                       const StepSizes& step, RandomSource& rng) {
    const int n = ctx.n;
    if (static_cast<int>(X.size()) != n || static_cast<int>(st.w.size()) != n)
        throw DomainError("gibbs_sweep: size mismatch");
    const OuKernel K = ctx.make_kernel(st.theta);
    OuTable tab(K, st.w);
    SweepStats stats;

    auto redraw_cell = [&](std::size_t j) {
        const int istar = cell_min(st.cells[j]);
        const int e = static_cast<int>(st.cells[j].size());
        const double y = tab.sample_location(rng, istar, e);
        st.jump_loc[j] = y;
        st.jump_size[j] = rng.gamma(e - st.theta.alpha,
                                    st.theta.b + K.omega(y, st.w, tab.r()));
    };

    if (up.jumps)
        for (std::size_t j = 0; j < st.cells.size(); ++j) redraw_cell(j);

    if (up.seating) {
        std::vector<char> dirty(st.cells.size(), 0);
        for (int idx = 1; idx <= n; ++idx) {
            for (std::size_t j = 0; j < st.cells.size(); ++j) {
                auto& cell = st.cells[j];
                auto it = std::find(cell.begin(), cell.end(), idx);
                if (it == cell.end()) continue;
                cell.erase(it);
                if (cell.empty()) {
                    st.cells.erase(st.cells.begin() + j);
                    st.jump_size.erase(st.jump_size.begin() + j);
                    st.jump_loc.erase(st.jump_loc.begin() + j);
                    dirty.erase(dirty.begin() + j);
                } else {
                    dirty[j] = 1;
                }
                break;
            }
            auto lw = crp_seat_logweights(tab, st.cells, idx);
            const double mx = *std::max_element(lw.begin(), lw.end());
            std::vector<double> weights(lw.size());
            for (std::size_t k = 0; k < lw.size(); ++k) weights[k] = std::exp(lw[k] - mx);
            const std::size_t pick = rng.discrete(weights);
            if (pick == 0) {
                st.cells.push_back({idx});
                st.jump_size.push_back(0);
                st.jump_loc.push_back(0);
                dirty.push_back(1);
            } else {
                st.cells[pick - 1].push_back(idx);
                dirty[pick - 1] = 1;
            }
        }
        // membership changed under these cells; refresh their jumps from the
        // exact conditional so the instantiated state is coherent again
        for (std::size_t j = 0; j < st.cells.size(); ++j)
            if (dirty[j]) redraw_cell(j);
    }

    std::vector<ActiveCell> act;
    act.reserve(st.cells.size());
    for (std::size_t j = 0; j < st.cells.size(); ++j)
        act.push_back({cell_min(st.cells[j]), static_cast<int>(st.cells[j].size()),
                       st.jump_size[j], st.jump_loc[j]});

    if (up.w) stats.w_accept = w_mh_scan(st.w, X, st.mu, st.beta, K, act, rng);
    conjugate_mu_beta(st.mu, st.beta, X, st.w, K.delta, pr, up.mu, up.beta, rng);
    if (up.theta)
        stats.theta_accept = theta_mh_step(st.theta, ctx, st.w, act, pr, step, rng);
    return stats;
}

std::optional<std::pair<SPath, double>> spath_mh_move(const SPath& m, int i_from,
                                                      int i_to, OuTable& tab) {
    const int n = static_cast<int>(m.size());
    if (i_from < 1 || i_from > n || i_to < 1 || i_to > n || i_from == i_to)
        throw DomainError("spath_mh_move: bad index pair");
    if (m[i_from - 1] == 0) return std::nullopt;
    SPath prop = m;
    --prop[i_from - 1];
    ++prop[i_to - 1];
    if (!is_valid_spath(prop)) return std::nullopt;
    const double ratio = tab.log_phi(i_from, prop[i_from - 1]) +
                         tab.log_phi(i_to, prop[i_to - 1]) -
                         tab.log_phi(i_from, m[i_from - 1]) -
                         tab.log_phi(i_to, m[i_to - 1]);
    return std::make_pair(std::move(prop), ratio);
}

SweepStats spath_sweep(SPathState& st, const std::vector<double>& X,
                       const ChainContext& ctx, const Priors& pr, const UpdateFlags& up,
                       const StepSizes& step, RandomSource& rng) {
    const int n = ctx.n;
    if (static_cast<int>(X.size()) != n || static_cast<int>(st.w.size()) != n ||
        static_cast<int>(st.m.size()) != n)
        throw DomainError("spath_sweep: size mismatch");
    if (!is_valid_spath(st.m)) throw DomainError("spath_sweep: invalid path state");
    const OuKernel K = ctx.make_kernel(st.theta);
    OuTable tab(K, st.w);
    SweepStats stats;

    auto redraw_interval = [&](int i) {
        if (st.m[i - 1] > 0) {
            const double y = tab.sample_location(rng, i, st.m[i - 1]);
            st.jump_loc[i - 1] = y;
            st.jump_size[i - 1] = rng.gamma(st.m[i - 1] - st.theta.alpha,
                                            st.theta.b + K.omega(y, st.w, tab.r()));
        } else {
            st.jump_loc[i - 1] = 0;
            st.jump_size[i - 1] = 0;
        }
    };

    if (up.jumps)
        for (int i = 1; i <= n; ++i) redraw_interval(i);

    if (up.seating && n > 1) {
        const int n_moves = step.spath_moves > 0 ? step.spath_moves : 2 * n;
        std::vector<char> dirty(n, 0);
        int accepted = 0;
        for (int t = 0; t < n_moves; ++t) {
            const int i_from = 1 + uniform_index(rng, n);
            int i_to = i_from;
            while (i_to == i_from) i_to = 1 + uniform_index(rng, n);
            auto prop = spath_mh_move(st.m, i_from, i_to, tab);
            if (!prop) continue;
            if (std::log(rng.uniform()) < prop->second) {
                st.m = std::move(prop->first);
                dirty[i_from - 1] = dirty[i_to - 1] = 1;
                ++accepted;
            }
        }
        stats.move_accept = static_cast<double>(accepted) / n_moves;
        for (int i = 1; i <= n; ++i)
            if (dirty[i - 1]) redraw_interval(i);
    }

    std::vector<ActiveCell> act;
    for (int i = 1; i <= n; ++i)
        if (st.m[i - 1] > 0)
            act.push_back({i, st.m[i - 1], st.jump_size[i - 1], st.jump_loc[i - 1]});

    if (up.w) stats.w_accept = w_mh_scan(st.w, X, st.mu, st.beta, K, act, rng);
    conjugate_mu_beta(st.mu, st.beta, X, st.w, K.delta, pr, up.mu, up.beta, rng);
    if (up.theta)
        stats.theta_accept = theta_mh_step(st.theta, ctx, st.w, act, pr, step, rng);
    return stats;
}

namespace {

// tag numerical failures with the sweep they happened in
[[noreturn]] void rethrow_at_sweep(int t) {
    try {
        throw;
    } catch (const QuadratureError& e) {
        throw QuadratureError("sweep " + std::to_string(t) + ": " + e.what(),
                              e.last_estimate, e.error_bound);
    } catch (const DomainError& e) {
        throw DomainError("sweep " + std::to_string(t) + ": " + e.what());
    }
}

}  // namespace

ChainTrace run_chain(const std::vector<double>& X, const RunConfig& cfg, int chain_index) {
    const int n = cfg.ctx.n;
    if (static_cast<int>(X.size()) != n) throw DomainError("run_chain: data length != n");
    cfg.ret.validate();
    if (!cfg.ret.is_standard())
        throw UnsupportedError("run_chain: sampler requires the standard exponent pair");
    if (std::fabs(cfg.ret.dt - cfg.ctx.delta) > 1e-12 * std::max(1.0, cfg.ctx.delta))
        throw DomainError("run_chain: return dt must equal the interval width");
    cfg.theta0.validate();
    if (!(cfg.theta0.b > 0)) throw UnsupportedError("run_chain: sampler requires b > 0");
    if (cfg.iters < 1 || cfg.burnin < 0 || cfg.thin < 1)
        throw DomainError("run_chain: bad iteration counts");

    RandomSource rng(cfg.seed, 1 + static_cast<std::uint64_t>(chain_index));
    const int total = cfg.burnin + cfg.iters * cfg.thin;
    ChainTrace out;
    out.rows.reserve(cfg.iters);
    out.latents.reserve(cfg.iters);

    UpdateFlags init_only;
    init_only.jumps = true;
    init_only.seating = init_only.w = init_only.mu = init_only.beta = init_only.theta =
        false;

    auto record = [&](double mu, double beta, const ThetaParams& th,
                      const std::vector<double>& w, int n_cells, const SweepStats& s,
                      LatentDraw&& draw) {
        TraceRow row;
        row.mu = mu;
        row.beta = beta;
        row.alpha = th.alpha;
        row.b = th.b;
        row.lam = th.lam;
        row.n_cells = n_cells;
        row.loglik = conditional_data_loglik(X, w, mu, beta, cfg.ctx.delta);
        row.acc_w = s.w_accept;
        row.acc_move = s.move_accept;
        row.acc_theta = s.theta_accept ? 1 : 0;
        out.rows.push_back(row);
        out.latents.push_back(std::move(draw));
    };

    if (cfg.sampler == SamplerKind::partition) {
        GibbsState st;
        st.w.assign(n, 1.0);
        st.cells.resize(n);
        for (int i = 1; i <= n; ++i) st.cells[i - 1] = {i};
        st.jump_size.assign(n, 0.0);
        st.jump_loc.assign(n, 0.0);
        st.theta = cfg.theta0;
        gibbs_sweep(st, X, cfg.ctx, cfg.priors, init_only, cfg.steps, rng);
        for (int t = 0; t < total; ++t) {
            SweepStats s;
            try {
                s = gibbs_sweep(st, X, cfg.ctx, cfg.priors, cfg.update, cfg.steps, rng);
            } catch (...) {
                rethrow_at_sweep(t);
            }
            if (t < cfg.burnin || (t - cfg.burnin) % cfg.thin != 0) continue;
            LatentDraw d;
            d.w = st.w;
            for (std::size_t j = 0; j < st.cells.size(); ++j) {
                d.cell_min.push_back(cell_min(st.cells[j]));
                d.cell_size.push_back(static_cast<int>(st.cells[j].size()));
            }
            d.jump_size = st.jump_size;
            d.jump_loc = st.jump_loc;
            d.mu = st.mu;
            d.beta = st.beta;
            d.theta = st.theta;
            record(st.mu, st.beta, st.theta, st.w,
                   static_cast<int>(st.cells.size()), s, std::move(d));
        }
    } else {
        SPathState st;
        st.w.assign(n, 1.0);
        st.m.assign(n, 1);
        st.jump_size.assign(n, 0.0);
        st.jump_loc.assign(n, 0.0);
        st.theta = cfg.theta0;
        spath_sweep(st, X, cfg.ctx, cfg.priors, init_only, cfg.steps, rng);
        for (int t = 0; t < total; ++t) {
            SweepStats s;
            try {
                s = spath_sweep(st, X, cfg.ctx, cfg.priors, cfg.update, cfg.steps, rng);
            } catch (...) {
                rethrow_at_sweep(t);
            }
            if (t < cfg.burnin || (t - cfg.burnin) % cfg.thin != 0) continue;
            LatentDraw d;
            d.w = st.w;
            int actives = 0;
            for (int i = 1; i <= n; ++i) {
                if (st.m[i - 1] == 0) continue;
                ++actives;
                d.cell_min.push_back(i);
                d.cell_size.push_back(st.m[i - 1]);
                d.jump_size.push_back(st.jump_size[i - 1]);
                d.jump_loc.push_back(st.jump_loc[i - 1]);
            }
            d.mu = st.mu;
            d.beta = st.beta;
            d.theta = st.theta;
            record(st.mu, st.beta, st.theta, st.w, actives, s, std::move(d));
        }
    }
    return out;
}

namespace {

// fixed quadrature nodes of the location integrals entering prediction and
// volatility summaries: weight (with eta and any jacobian), Omega, a kernel
// value g, and psi(Omega) precomputed
struct LocNode {
    double W, om, g, psi_om;
};

template <class GFun>
void append_y_nodes(std::vector<LocNode>& out, const OuKernel& K,
                    const std::vector<double>& w, const std::vector<double>& r,
                    double a, double b, int panels, int order, GFun&& gfun) {
    const auto mesh = detail::graded_mesh(a, b, panels);
    const auto& [xs, ws] = gauss_legendre_nodes(order);
    for (std::size_t p = 0; p + 1 < mesh.size(); ++p) {
        const double c = 0.5 * (mesh[p] + mesh[p + 1]);
        const double h = 0.5 * (mesh[p + 1] - mesh[p]);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double y = c + h * xs[k];
            const double et = K.eta(y);
            if (!(et > 0)) continue;
            LocNode nd;
            nd.W = h * ws[k] * et;
            nd.om = K.omega(y, w, r);
            nd.g = gfun(y);
            nd.psi_om = K.family->psi(nd.om);
            out.push_back(nd);
        }
    }
}

// tail y <= 0 through u = e^y; g there is gcoef * e^y
void append_tail_nodes(std::vector<LocNode>& out, const OuKernel& K, double r1,
                       double gcoef, int panels, int order) {
    const auto mesh = detail::graded_mesh(0.0, 1.0, panels);
    const auto& [xs, ws] = gauss_legendre_nodes(order);
    for (std::size_t p = 0; p + 1 < mesh.size(); ++p) {
        const double c = 0.5 * (mesh[p] + mesh[p + 1]);
        const double h = 0.5 * (mesh[p + 1] - mesh[p]);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double u = c + h * xs[k];
            const double et = K.eta(std::log(u));
            if (!(et > 0)) continue;
            LocNode nd;
            nd.W = h * ws[k] * et / u;
            nd.om = r1 * u;
            nd.g = gcoef * u;
            nd.psi_om = K.family->psi(nd.om);
            out.push_back(nd);
        }
    }
}

void check_draw(const LatentDraw& d, int n) {
    if (static_cast<int>(d.w.size()) != n)
        throw DomainError("latent draw: weight vector length mismatch");
    if (d.jump_size.size() != d.jump_loc.size())
        throw DomainError("latent draw: jump arrays misaligned");
    if (!(d.theta.b > 0))
        throw UnsupportedError("posterior summaries require b > 0");
}

}  // namespace

PredictiveResult predictive_density(const std::vector<LatentDraw>& draws,
                                    const RunConfig& cfg, double x_lo, double x_hi,
                                    int count, double horizon) {
    if (draws.empty()) throw DomainError("predictive_density: no draws");
    if (count < 2 || !(x_hi > x_lo)) throw DomainError("predictive_density: bad grid");
    if (!(horizon > 0)) throw DomainError("predictive_density: bad horizon");
    const int n = cfg.ctx.n;
    const int D = static_cast<int>(draws.size());

    PredictiveResult res;
    res.x.resize(count);
    for (int q = 0; q < count; ++q)
        res.x[q] = x_lo + (x_hi - x_lo) * q / (count - 1.0);
    std::vector<double> sum(count, 0.0), sumsq(count, 0.0);

    for (const auto& d : draws) {
        check_draw(d, n);
        const OuKernel K = cfg.ctx.make_kernel(d.theta);
        const double span = n * K.delta;
        const auto r = K.r_weights(d.w);
        auto gfwd = [&](double y) { return K.g_forward(horizon, y); };
        const double gcoef =
            std::exp(-K.lam * span) * (-std::expm1(-K.lam * horizon)) / K.lam;

        double T = 0;
        for (std::size_t j = 0; j < d.jump_size.size(); ++j)
            T += d.jump_size[j] * gfwd(d.jump_loc[j]);

        std::vector<LocNode> nodes;
        append_tail_nodes(nodes, K, r[0], gcoef, 8, 12);
        for (int k = 1; k <= n; ++k)
            append_y_nodes(nodes, K, d.w, r, (k - 1) * K.delta, k * K.delta, 4, 12, gfwd);
        append_y_nodes(nodes, K, d.w, r, span, span + horizon, 4, 12, gfwd);

        // density of the forward mixing profile at w: the next interval's
        // volatility rate is kappa_1-tilted around the posterior field, and
        // the compensating exponential keeps the total mass at one
        auto profile = [&](double wv) {
            double cint = 0, dl = 0;
            for (const auto& nd : nodes) {
                const double s = nd.om + wv * nd.g;
                cint += nd.W * nd.g * K.family->tilted_kappa(1, s);
                dl += nd.W * (K.family->psi(s) - nd.psi_om);
            }
            return (cint + T) * std::exp(-wv * T - dl);
        };

        double wpk = 1.0, best = -1.0;
        for (int k = 0; k <= 50; ++k) {
            const double wv = std::exp(-10.0 + 0.4 * k);
            const double p = profile(wv);
            if (p > best) {
                best = p;
                wpk = wv;
            }
        }

        struct WNode {
            double w, mass;
        };
        std::vector<WNode> wn;
        const auto& [xs, ws] = gauss_legendre_nodes(16);
        auto add_seg = [&](double a, double b) {
            const double c = 0.5 * (a + b), h = 0.5 * (b - a);
            double m = 0;
            for (std::size_t k = 0; k < xs.size(); ++k) {
                const double wv = c + h * xs[k];
                const double mass = h * ws[k] * profile(wv);
                wn.push_back({wv, mass});
                m += mass;
            }
            return m;
        };
        double total = 0, lo = wpk, hi = wpk;
        for (int k = 0; k < 48; ++k) {
            const double seg = add_seg(lo / 2, lo);
            total += seg;
            lo /= 2;
            if (k >= 4 && seg < 1e-4 * total) break;
        }
        total += add_seg(0.0, lo);
        for (int k = 0; k < 60; ++k) {
            const double seg = add_seg(hi, 2 * hi);
            total += seg;
            hi *= 2;
            if (k >= 4 && seg < 1e-4 * total) break;
        }

        const ReturnParams ph = ReturnParams::standard(d.mu, d.beta, horizon);
        for (int q = 0; q < count; ++q) {
            double dens = 0;
            for (const auto& node : wn) {
                double mean, var;
                conditional_moments(ph, node.w, mean, var);
                dens += node.mass * std::exp(normal_logpdf(res.x[q], mean, var));
            }
            sum[q] += dens;
            sumsq[q] += dens * dens;
        }
    }

    res.density.resize(count);
    res.se.resize(count);
    for (int q = 0; q < count; ++q) {
        const double m = sum[q] / D;
        res.density[q] = m;
        res.se[q] = D > 1 ? std::sqrt(std::max(0.0, (sumsq[q] / D - m * m) / (D - 1.0)))
                          : 0.0;
    }
    double integral = 0;
    for (int q = 0; q + 1 < count; ++q)
        integral += 0.5 * (res.density[q] + res.density[q + 1]) * (res.x[q + 1] - res.x[q]);
    res.grid_integral = integral;
    return res;
}

TauMeanResult posterior_tau_mean(const std::vector<LatentDraw>& draws,
                                 const RunConfig& cfg, double t) {
    if (draws.empty()) throw DomainError("posterior_tau_mean: no draws");
    if (!(t > 0)) throw DomainError("posterior_tau_mean: t must be positive");
    const int n = cfg.ctx.n;
    double sum = 0, sumsq = 0;
    for (const auto& d : draws) {
        check_draw(d, n);
        const OuKernel K = cfg.ctx.make_kernel(d.theta);
        const auto r = K.r_weights(d.w);
        // tail: g_cumulative(t, ln u) = (1 - e^{-lam t}) u / lam cancels the
        // 1/u jacobian, leaving a smooth integrand in u
        const double tail_coef = -std::expm1(-K.lam * t) / K.lam;
        double val =
            integrate_1d(
                [&](double u) {
                    const double et = K.eta(std::log(u));
                    if (!(et > 0)) return 0.0;
                    return tail_coef * K.family->tilted_kappa(1, r[0] * u) * et;
                },
                0.0, 1.0, K.quad)
                .value;
        for (int k = 1; (k - 1) * K.delta < t; ++k) {
            const double a = (k - 1) * K.delta;
            const double b = std::min(static_cast<double>(k) * K.delta, t);
            val += integrate_1d(
                       [&](double y) {
                           const double et = K.eta(y);
                           if (!(et > 0)) return 0.0;
                           return K.g_cumulative(t, y) *
                                  K.family->tilted_kappa(1, K.omega(y, d.w, r)) * et;
                       },
                       a, b, K.piece_quad)
                       .value;
        }
        for (std::size_t j = 0; j < d.jump_size.size(); ++j)
            val += d.jump_size[j] * K.g_cumulative(t, d.jump_loc[j]);
        sum += val;
        sumsq += val * val;
    }
    const int D = static_cast<int>(draws.size());
    TauMeanResult res;
    res.mean = sum / D;
    res.se = D > 1 ? std::sqrt(std::max(0.0, (sumsq / D - res.mean * res.mean) / (D - 1.0)))
                   : 0.0;
    return res;
}

double effective_sample_size(const std::vector<double>& series) {
    const int N = static_cast<int>(series.size());
    if (N < 8) return static_cast<double>(N);
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / N;
    auto gamma_k = [&](int k) {
        double s = 0;
        for (int t = 0; t + k < N; ++t)
            s += (series[t] - mean) * (series[t + k] - mean);
        return s / N;
    };
    const double g0 = gamma_k(0);
    if (!(g0 > 0)) return static_cast<double>(N);
    double tau = g0, prev_pair = std::numeric_limits<double>::infinity();
    for (int k = 1; k + 1 < N; k += 2) {
        double pair = gamma_k(k) + gamma_k(k + 1);
        if (pair <= 0) break;
        pair = std::min(pair, prev_pair);  // initial monotone sequence
        tau += 2 * pair;
        prev_pair = pair;
    }
    return std::clamp(N * g0 / tau, 1.0, static_cast<double>(N));
}

}  // namespace ghsv
