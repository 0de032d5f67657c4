#include "stochpe/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <thread>

#include "stochpe/rng.hpp"
#include "stochpe/spectral.hpp"

namespace stochpe {

Moment moment(const std::vector<double>& x) {
    Moment m;
    m.n = x.size();
    if (x.empty()) return m;
    double s = 0.0;
    for (double v : x) s += v;
    m.mean = s / static_cast<double>(x.size());
    if (x.size() > 1) {
        double q = 0.0;
        for (double v : x) q += (v - m.mean) * (v - m.mean);
        m.se = std::sqrt(q / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
    }
    return m;
}

BlowupResult blowup_functional(const Trajectory& tr) {
    BlowupResult r;
    r.aborted = tr.blew_up;
    if (!tr.records.empty()) r.value = functional_value(tr.records.back(), "N");
    if (tr.blew_up) r.value = std::numeric_limits<double>::infinity();
    return r;
}

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads; fn must only touch slot i.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct PathSummary {
    std::vector<double> sup;
    std::vector<double> final;
    std::map<std::string, std::optional<double>> hits;
    bool blew_up = false;
};

}  // namespace

EnsembleReport run_ensemble(const SolverConfig& cfg, const InitialCondition& ic, const EnsembleOptions& opt,
                            const std::function<void(std::uint32_t, const Trajectory&)>& per_path) {
    if (opt.paths == 0) throw std::invalid_argument("ensemble needs at least one path");
    cfg.validate();
    std::vector<PathSummary> out(opt.paths);
    std::vector<Trajectory> keep(per_path ? opt.paths : 0);
    parallel_for(opt.paths, opt.workers, [&](std::size_t i) {
        SolverConfig c = cfg;
        c.path = opt.first_path + static_cast<std::uint32_t>(i);
        auto tr = run_trajectory(c, ic(c.path));
        PathSummary s;
        const std::size_t nc = DiagnosticRecord::columns().size();
        s.sup.assign(nc, -std::numeric_limits<double>::infinity());
        for (const auto& r : tr.records) {
            const auto v = r.values();
            for (std::size_t j = 0; j < nc; ++j) s.sup[j] = std::max(s.sup[j], v[j]);
        }
        s.final = tr.records.back().values();
        s.hits = tr.hits;
        s.blew_up = tr.blew_up;
        out[i] = std::move(s);
        if (per_path) keep[i] = std::move(tr);
    });
    if (per_path)
        for (std::size_t i = 0; i < opt.paths; ++i) per_path(opt.first_path + static_cast<std::uint32_t>(i), keep[i]);

    EnsembleReport rep;
    rep.paths = opt.paths;
    const auto& cols = DiagnosticRecord::columns();
    for (std::size_t j = 0; j < cols.size(); ++j) {
        std::vector<double> a, b;
        for (const auto& s : out) {
            a.push_back(s.sup[j]);
            b.push_back(s.final[j]);
        }
        rep.sup[cols[j]] = moment(a);
        rep.final[cols[j]] = moment(b);
    }
    std::map<std::string, std::vector<double>> times;
    for (const auto& s : out) {
        if (s.blew_up) ++rep.blowups;
        for (const auto& [name, t] : s.hits) {
            rep.hit_count[name] += t.has_value() ? 1 : 0;
            if (t) times[name].push_back(*t);
        }
    }
    for (const auto& [name, count] : rep.hit_count) rep.hit_time[name] = moment(times[name]);
    return rep;
}

double apriori_functional(const Trajectory& tr, double p) {
    double sup = 0.0, integral = 0.0;
    for (std::size_t i = 0; i < tr.records.size(); ++i) {
        const auto& r = tr.records[i];
        sup = std::max(sup, std::pow(r.V2, 0.5 * p));
        if (i > 0) {
            const auto& q = tr.records[i - 1];
            integral += 0.5 * (r.t - q.t) *
                        (q.DA2 * std::pow(q.V2, 0.5 * p - 1.0) + r.DA2 * std::pow(r.V2, 0.5 * p - 1.0));
        }
    }
    return sup + integral;
}

AprioriReport apriori_sweep(const SolverConfig& cfg, const InitialCondition& ic, const std::vector<std::size_t>& n_values,
                            double p, const EnsembleOptions& opt, double band_lo, double band_hi) {
    if (opt.paths < 30) throw std::invalid_argument("apriori_sweep: ensemble too small (< 30 paths)");
    if (n_values.size() < 2) throw std::invalid_argument("apriori_sweep: need at least two n values");
    if (!(p >= 2.0)) throw std::invalid_argument("apriori_sweep: p must be >= 2");
    AprioriReport rep;
    rep.p = p;
    rep.n_values = n_values;
    rep.band_lo = band_lo;
    rep.band_hi = band_hi;
    for (std::size_t n : n_values) {
        SolverConfig c = cfg;
        c.n_galerkin = n;
        std::vector<double> vals(opt.paths);
        run_ensemble(c, ic, opt, [&](std::uint32_t path, const Trajectory& tr) {
            vals[path - opt.first_path] = tr.blew_up ? std::numeric_limits<double>::infinity() : apriori_functional(tr, p);
        });
        rep.estimates.push_back(moment(vals));
    }
    rep.pass = true;
    for (std::size_t i = 1; i < rep.estimates.size(); ++i) {
        const double r = rep.estimates[i].mean / rep.estimates[i - 1].mean;
        rep.ratios.push_back(r);
        rep.pass = rep.pass && std::isfinite(r) && r >= band_lo && r <= band_hi;
    }
    return rep;
}

ItoReport ito_isometry_check(const SolverConfig& cfg, const InitialCondition& ic, const EnsembleOptions& opt) {
    SolverConfig c = cfg;
    c.track_stochastic_integral = true;
    std::vector<double> lhs(opt.paths), rhs(opt.paths);
    run_ensemble(c, ic, opt, [&](std::uint32_t path, const Trajectory& tr) {
        const double n = tr.stochastic_integral.coeffs().empty() ? 0.0 : norm_H(tr.stochastic_integral);
        lhs[path - opt.first_path] = n * n;
        rhs[path - opt.first_path] = tr.ito_integrand;
    });
    ItoReport rep;
    rep.lhs = moment(lhs);
    rep.rhs = moment(rhs);
    if (rep.rhs.mean > 0.0) {
        rep.relative_error = std::abs(rep.lhs.mean - rep.rhs.mean) / rep.rhs.mean;
    } else {
        rep.relative_error = rep.lhs.mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return rep;
}

UniquenessReport uniqueness_experiment(const SolverConfig& cfg, const SpectralState& u0, double delta,
                                       std::uint64_t direction_seed) {
    if (!(delta >= 0.0)) throw std::invalid_argument("uniqueness_experiment: delta must be >= 0");
    const GalerkinSystem sys(cfg);
    GaussianStream g(direction_seed, 0x554E);
    auto e = sys.project(random_state(cfg.domain, g));
    e = leray_project(e);
    e *= 1.0 / norm_V(e);

    SolverConfig c = cfg;
    c.store_states = true;
    auto u1 = u0;
    u1.axpy(delta, e);
    const auto a = run_trajectory(c, u0);
    const auto b = run_trajectory(c, u1);

    UniquenessReport rep;
    rep.delta = delta;
    rep.identical = a.states.size() == b.states.size();
    const std::size_t n = std::min(a.states.size(), b.states.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = a.states[i].coeffs();
        const auto y = b.states[i].coeffs();
        if (rep.identical && std::memcmp(x.data(), y.data(), x.size_bytes()) != 0) rep.identical = false;
        rep.sup_divergence = std::max(rep.sup_divergence, norm_V(a.states[i] - b.states[i]));
    }
    rep.factor = delta > 0.0 ? rep.sup_divergence / delta : 0.0;
    return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GronwallReport gronwall_envelope(const SolverConfig& cfg, const InitialCondition& ic, const EnsembleOptions& opt) {
    double sigma0 = 0.0;
    if (cfg.noise && cfg.noise->K() > 0) {
        const GalerkinSystem sys(cfg);
        auto cols = cfg.noise->columns(SpectralState(cfg.domain));
        for (auto& c : cols) c = sys.project(c);
        sigma0 = hs_norm2(cols, NormSpace::H);
    }
    auto measure = [&](const SolverConfig& c) {
        std::vector<double> sup(opt.paths), x0(opt.paths);
        run_ensemble(c, ic, opt, [&](std::uint32_t path, const Trajectory& tr) {
            double s = 0.0;
            for (const auto& r : tr.records) s = std::max(s, r.H2);
            sup[path - opt.first_path] = s;
            x0[path - opt.first_path] = tr.records.front().H2;
        });
        const double denom = moment(x0).mean + c.t_end * sigma0;
        return denom > 0.0 ? moment(sup).mean / denom : 0.0;
    };
    GronwallReport rep;
    rep.C_dt = measure(cfg);
    SolverConfig half = cfg;
    half.dt = 0.5 * cfg.dt;
    half.stride = cfg.stride * 2;
    rep.C_half = measure(half);
    rep.ratio = rep.C_dt > 0.0 ? rep.C_half / rep.C_dt : 0.0;
    return rep;
}

ConvergenceReport strong_convergence(const SolverConfig& cfg, const InitialCondition& ic, std::vector<double> dts,
                                     std::size_t paths, std::uint32_t refine, std::size_t workers) {
    if (dts.size() < 3) throw std::invalid_argument("convergence study needs at least three step sizes");
    if (paths == 0) throw std::invalid_argument("convergence study needs at least one path");
    if (refine == 0 || (refine & (refine - 1)) != 0) throw std::invalid_argument("refine must be a power of two");
    std::sort(dts.begin(), dts.end());
    const double dt_min = dts.front();
    std::vector<std::uint32_t> ratio;
    for (double dt : dts) {
        const double q = dt / dt_min;
        const auto r = static_cast<std::uint32_t>(std::llround(q));
        if (std::abs(q - r) > 1e-9 * q || (r & (r - 1)) != 0) {
            throw std::invalid_argument("step sizes are not nested (each dt / dt_min must be a power of two)");
        }
        ratio.push_back(r);
    }
    ConvergenceReport rep;
    rep.dts = dts;
    rep.dt_ref = dt_min / refine;
    rep.paths = paths;

    std::vector<std::vector<double>> err2(dts.size(), std::vector<double>(paths));
    parallel_for(paths, workers, [&](std::size_t i) {
        const auto path = static_cast<std::uint32_t>(i);
        SolverConfig ref = cfg;
        ref.path = path;
        ref.dt = rep.dt_ref;
        ref.noise_substeps = 1;
        ref.stride = std::numeric_limits<std::size_t>::max() / 2;
        const auto u0 = ic(path);
        const auto uref = run_trajectory(ref, u0).final_state;
        for (std::size_t j = 0; j < dts.size(); ++j) {
            SolverConfig c = ref;
            c.dt = dts[j];
            c.noise_substeps = ratio[j] * refine;
            const auto u = run_trajectory(c, u0).final_state;
            const double e = norm_H(u - uref);
            err2[j][i] = e * e;
        }
    });
    for (std::size_t j = 0; j < dts.size(); ++j) {
        const auto m = moment(err2[j]);
        rep.errors.push_back(std::sqrt(m.mean));
        rep.error_se.push_back(m.mean > 0.0 ? 0.5 * m.se / std::sqrt(m.mean) : 0.0);
    }
    rep.order = loglog_slope(rep.dts, rep.errors);
    return rep;
}

SpatialReport spatial_convergence(const SolverConfig& cfg, const InitialCondition& ic, std::vector<std::size_t> n_values,
                                  std::size_t paths, std::size_t workers) {
    std::sort(n_values.begin(), n_values.end());
    n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
    if (n_values.size() < 3) throw std::invalid_argument("spatial study needs at least three distinct n values");
    if (paths == 0) throw std::invalid_argument("spatial study needs at least one path");
    SpatialReport rep;
    rep.n_values = n_values;
    rep.paths = paths;
    for (std::size_t n : n_values) {
        SolverConfig c = cfg;
        c.n_galerkin = n;
        rep.n_effective.push_back(GalerkinSystem(c).n_effective());
    }
    rep.projection_errors = projection_errors(ic(0), n_values);

    std::vector<std::vector<double>> err2(n_values.size(), std::vector<double>(paths));
    parallel_for(paths, workers, [&](std::size_t i) {
        SolverConfig c = cfg;
        c.path = static_cast<std::uint32_t>(i);
        c.stride = std::numeric_limits<std::size_t>::max() / 2;
        const auto u0 = ic(c.path);
        c.n_galerkin = n_values.back();
        const auto uref = run_trajectory(c, u0).final_state;
        for (std::size_t j = 0; j < n_values.size(); ++j) {
            c.n_galerkin = n_values[j];
            const double e = norm_H(run_trajectory(c, u0).final_state - uref);
            err2[j][i] = e * e;
        }
    });
    for (const auto& e : err2) {
        const auto m = moment(e);
        rep.errors.push_back(std::sqrt(m.mean));
        rep.error_se.push_back(m.mean > 0.0 ? 0.5 * m.se / std::sqrt(m.mean) : 0.0);
    }
    return rep;
}

double ou_mean_square(const SolverConfig& cfg, const SpectralState& u0, double t) {
    const GalerkinSystem sys(cfg);
    const double mean = norm_H(sys.ustar(u0, t));
    if (!cfg.noise || cfg.noise->K() == 0) return mean * mean;
    GaussianStream g(5, 0x4F55);
    const auto probe = random_state(cfg.domain, g);
    for (const auto& c : cfg.noise->linear_columns(probe)) {
        if (norm_H(c) != 0.0) throw std::invalid_argument("ou_mean_square: noise depends on the state");
    }
    const auto& d = cfg.domain;
    double var = 0.0;
    for (auto col : cfg.noise->columns(SpectralState(d))) {
        col = sys.project(col);
        for (int c = 0; c < kComponents; ++c)
            for (int m = 0; m <= d.M; ++m)
                for (int ky = -d.N2; ky <= d.N2; ++ky)
                    for (int kx = -d.N1; kx <= d.N1; ++kx) {
                        const double l = d.lambda(kx, ky, m);
                        const double f = l > 0.0 ? -std::expm1(-2.0 * l * t) / (2.0 * l) : t;
                        col.at(static_cast<Component>(c), kx, ky, m) *= std::sqrt(f);
                    }
        const double n = norm_H(col);
        var += n * n;
    }
    return mean * mean + var;
}

std::size_t hitting_time_violations(const std::vector<DiagnosticRecord>& series, const std::string& name,
                                    const std::vector<double>& levels) {
    auto ks = levels;
    std::sort(ks.begin(), ks.end());
    std::size_t bad = 0;
    for (std::size_t i = 0; i < ks.size(); ++i)
        for (std::size_t j = i + 1; j < ks.size(); ++j) {
            const auto a = detect_stopping(series, name, ks[i]);
            const auto b = detect_stopping(series, name, ks[j]);
            if (b && (!a || *a > *b)) ++bad;
        }
    return bad;
}

std::vector<double> projection_errors(const SpectralState& u0, const std::vector<std::size_t>& n_values) {
    const Basis basis(u0.domain());
    std::vector<double> out;
    for (std::size_t n : n_values) out.push_back(norm_H(complement_q(u0, basis, n)));
    return out;
}

}  // namespace stochpe
