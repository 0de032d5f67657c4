#include "stochpe/noise.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "checkpoint_json.hpp"
#include "kinematics.hpp"
#include "stochpe/operators.hpp"
#include "stochpe/spectral.hpp"
#include "stochpe/transform.hpp"

namespace stochpe {

using detail::Evaluated;

const char* to_string(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::Zero: return "zero";
        case NoiseFamily::Example1: return "example1";
        case NoiseFamily::Example2: return "example2";
    }
    return "?";
}

NoiseFamily noise_family_from_string(const std::string& s) {
    if (s == "zero") return NoiseFamily::Zero;
    if (s == "example1") return NoiseFamily::Example1;
    if (s == "example2") return NoiseFamily::Example2;
    throw std::invalid_argument("unknown noise family '" + s + "'");
}

namespace {

bool is_zero_component(const SpectralState& s, Component c) {
    for (auto v : s.component(c))
        if (v != cplx{}) return false;
    return true;
}

// Unit-amplitude real mode cos(2 pi (kx x/L1 + ky y/L2)) cos(m pi z/h).
void add_cos_mode(SpectralState& s, Component c, int kx, int ky, int m, double amp) {
    const auto& d = s.domain();
    if (std::abs(kx) > d.N1 || std::abs(ky) > d.N2 || m < 0 || m > d.M) {
        throw std::invalid_argument("noise preset mode (" + std::to_string(kx) + "," + std::to_string(ky) + "," +
                                    std::to_string(m) + ") is not resolved");
    }
    if (kx == 0 && ky == 0) {
        s.at(c, 0, 0, m) += amp;
    } else {
        s.at(c, kx, ky, m) += 0.5 * amp;
        s.at(c, -kx, -ky, m) += 0.5 * amp;
    }
}

struct PhysicalCoeffs {
    PhysicalField phi1, phi2, psi;
};

}  // namespace

void NoiseSpec::validate() const {
    domain.validate();
    if (phi.size() != K || chi.size() != K || alpha.size() != K) {
        throw std::invalid_argument("noise: phi, chi and alpha must each have K entries");
    }
    for (std::size_t k = 0; k < K; ++k) {
        if (!(phi[k].domain() == domain) || !(chi[k].domain() == domain)) {
            throw std::invalid_argument("noise: coefficient field on a foreign domain");
        }
        if (!(alpha[k] >= 0.0) || !std::isfinite(alpha[k])) throw std::invalid_argument("noise: alpha_k must be >= 0");
        if (!phi[k].all_finite() || !chi[k].all_finite()) throw std::invalid_argument("noise: non-finite coefficients");
    }
    if (family == NoiseFamily::Example2) {
        for (std::size_t k = 0; k < K; ++k) {
            if (!is_zero_component(phi[k], Component::T)) {
                throw std::invalid_argument("noise: example2 does not take psi_k");
            }
            for (int c = 0; c < 2; ++c)
                for (int m = 1; m <= domain.M; ++m)
                    for (int ky = -domain.N2; ky <= domain.N2; ++ky)
                        for (int kx = -domain.N1; kx <= domain.N1; ++kx)
                            if (phi[k].at(static_cast<Component>(c), kx, ky, m) != cplx{}) {
                                throw std::invalid_argument("noise: example2 requires z-independent phi_k");
                            }
        }
    }
}

NoiseConstants NoiseSpec::constants() const {
    validate();
    NoiseConstants out;
    const auto& t = transformer(domain, GridKind::Dealiased);
    double t0 = 0.0, t1 = 0.0, ka = 0.0, al = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const auto ev = detail::evaluate(phi[k], t);
        const std::size_t n = t.shape().size();
        double sup_phi = 0.0, sup_psi = 0.0, sup_gphi = 0.0, sup_gpsi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double p2 = 0.0, g2 = 0.0;
            for (int c = 0; c < 2; ++c) {
                p2 += ev.val[c].values[i] * ev.val[c].values[i];
                g2 += ev.dx[c].values[i] * ev.dx[c].values[i] + ev.dy[c].values[i] * ev.dy[c].values[i] +
                      ev.dz[c].values[i] * ev.dz[c].values[i];
            }
            const double s = ev.val[2].values[i];
            const double gs = ev.dx[2].values[i] * ev.dx[2].values[i] + ev.dy[2].values[i] * ev.dy[2].values[i] +
                              ev.dz[2].values[i] * ev.dz[2].values[i];
            sup_phi = std::max(sup_phi, p2);
            sup_psi = std::max(sup_psi, s * s);
            sup_gphi = std::max(sup_gphi, g2);
            sup_gpsi = std::max(sup_gpsi, gs);
        }
        t0 += sup_phi + sup_psi;
        t1 += sup_gphi + sup_gpsi;
        const double cv = norm_V(chi[k]);
        ka += cv * cv;
        al += alpha[k] * alpha[k];
    }
    out.theta0 = std::sqrt(t0);
    out.theta1 = std::sqrt(t1);
    out.kappa = std::sqrt(ka);
    out.alpha = std::sqrt(al);
    return out;
}

NoiseSpec make_noise(const DomainSpec& d, const NoisePreset& p) {
    d.validate();
    NoiseSpec s;
    s.family = p.family;
    s.domain = d;
    s.K = p.K;
    s.temperature = p.temperature;
    if (p.wave < 0) throw std::invalid_argument("noise preset: wave must be >= 0");
    const int wave = std::max(1, p.wave);
    for (std::size_t k = 0; k < p.K; ++k) {
        const double dk = std::pow(p.decay, static_cast<double>(k));
        const double ak = kPi * static_cast<double>(k) / static_cast<double>(p.K);
        const int jk = 1 + static_cast<int>(k % static_cast<std::size_t>(wave));
        SpectralState phi(d), chi(d);
        if (p.phi_const != 0.0) {
            add_cos_mode(phi, Component::V1, 0, 0, 0, dk * p.phi_const * std::cos(ak));
            add_cos_mode(phi, Component::V2, 0, 0, 0, dk * p.phi_const * std::sin(ak));
        }
        if (p.phi_wave_amp != 0.0) {
            add_cos_mode(phi, Component::V1, 0, jk, p.phi_wave_m, dk * p.phi_wave_amp);
            add_cos_mode(phi, Component::V2, jk, 0, p.phi_wave_m, dk * p.phi_wave_amp);
        }
        if (p.psi_const != 0.0) add_cos_mode(phi, Component::T, 0, 0, 0, dk * p.psi_const);
        if (p.psi_wave_amp != 0.0) add_cos_mode(phi, Component::T, jk, 0, 1, dk * p.psi_wave_amp);
        if (k == 0 && p.chi_amp != 0.0) add_cos_mode(chi, p.chi_field, p.chi_kx, p.chi_ky, p.chi_m, p.chi_amp);
        s.phi.push_back(std::move(phi));
        s.chi.push_back(std::move(chi));
        s.alpha.push_back(p.alpha * dk);
    }
    s.validate();
    return s;
}

NoiseSpec load_noise_fields(const std::string& path, const DomainSpec& d) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    const auto j = nlohmann::json::parse(is);
    NoiseSpec s;
    s.family = noise_family_from_string(j.at("family").get<std::string>());
    s.domain = d;
    s.K = j.at("K").get<std::size_t>();
    s.temperature = j.value("temperature", true);
    s.alpha = j.at("alpha").get<std::vector<double>>();
    for (const auto& e : j.at("phi")) s.phi.push_back(detail::state_from_json(e));
    for (const auto& e : j.at("chi")) s.chi.push_back(detail::state_from_json(e));
    s.validate();
    return s;
}

void save_noise_fields(const std::string& path, const NoiseSpec& spec) {
    spec.validate();
    nlohmann::json j{{"family", to_string(spec.family)},
                     {"K", spec.K},
                     {"temperature", spec.temperature},
                     {"alpha", spec.alpha}};
    j["phi"] = nlohmann::json::array();
    j["chi"] = nlohmann::json::array();
    for (const auto& p : spec.phi) j["phi"].push_back(detail::state_to_json(p));
    for (const auto& c : spec.chi) j["chi"].push_back(detail::state_to_json(c));
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << j.dump(1) << '\n';
}

struct NoiseOperator::Cache {
    std::vector<PhysicalCoeffs> coeffs;
    bool any_psi = false;
    bool zero = true;
};

NoiseOperator::NoiseOperator(NoiseSpec spec) : spec_(std::move(spec)), cache_(std::make_unique<Cache>()) {
    spec_.validate();
    const auto& t = transformer(spec_.domain, GridKind::Dealiased);
    for (std::size_t k = 0; k < spec_.K; ++k) {
        PhysicalCoeffs pc;
        pc.phi1 = t.synthesize(modal_component(spec_.phi[k], Component::V1));
        pc.phi2 = t.synthesize(modal_component(spec_.phi[k], Component::V2));
        pc.psi = t.synthesize(modal_component(spec_.phi[k], Component::T));
        cache_->any_psi = cache_->any_psi || !is_zero_component(spec_.phi[k], Component::T);
        cache_->coeffs.push_back(std::move(pc));
    }
    if (spec_.family != NoiseFamily::Zero) {
        for (std::size_t k = 0; k < spec_.K && cache_->zero; ++k) {
            for (auto v : spec_.phi[k].coeffs())
                if (v != cplx{}) cache_->zero = false;
            for (auto v : spec_.chi[k].coeffs())
                if (v != cplx{}) cache_->zero = false;
            if (spec_.alpha[k] != 0.0) cache_->zero = false;
        }
    }
}

NoiseOperator::~NoiseOperator() = default;
NoiseOperator::NoiseOperator(NoiseOperator&&) noexcept = default;
NoiseOperator& NoiseOperator::operator=(NoiseOperator&&) noexcept = default;

bool NoiseOperator::is_zero() const { return cache_->zero; }

namespace {

// Velocity transport target: v itself (Example1) or its depth average (Example2); T is always transported as is.
SpectralState transport_target(const NoiseSpec& spec, const SpectralState& u) {
    if (spec.family != NoiseFamily::Example2) return u;
    SpectralState t = u;
    const auto bar = average_A3(u);
    for (int c = 0; c < 2; ++c) {
        const auto comp = static_cast<Component>(c);
        std::copy(bar.component(comp).begin(), bar.component(comp).end(), t.component(comp).begin());
    }
    return t;
}

}  // namespace

SpectralState NoiseOperator::combine(const SpectralState& u, const std::vector<double>& w, bool additive) const {
    if (!(u.domain() == spec_.domain)) throw std::invalid_argument("NoiseOperator: state on a foreign domain");
    if (w.size() != spec_.K) throw std::invalid_argument("NoiseOperator: weight count must equal K");
    SpectralState out(u.domain(), u.time);
    if (spec_.family == NoiseFamily::Zero) return out;

    const auto& d = spec_.domain;
    const auto& t = transformer(d, GridKind::Dealiased);
    const GridShape sh = t.shape();
    PhysicalField P1(sh), P2(sh), S(sh);
    double a = 0.0;
    bool any_phi = false, any_psi = false;
    for (std::size_t k = 0; k < spec_.K; ++k) {
        if (w[k] == 0.0) continue;
        const auto& pc = cache_->coeffs[k];
        for (std::size_t i = 0; i < sh.size(); ++i) {
            P1.values[i] += w[k] * pc.phi1.values[i];
            P2.values[i] += w[k] * pc.phi2.values[i];
            S.values[i] += w[k] * pc.psi.values[i];
        }
        any_phi = true;
        any_psi = any_psi || cache_->any_psi;
        a += w[k] * spec_.alpha[k];
    }

    const int nc = spec_.temperature ? kComponents : 2;
    if (any_phi) {
        const auto target = transport_target(spec_, u);
        const Evaluated ev = detail::evaluate(target, t, {.values = false, .gradients = true,
                                                          .temperature = spec_.temperature});
        for (int c = 0; c < nc; ++c) {
            PhysicalField cosp(sh);
            for (std::size_t i = 0; i < sh.size(); ++i) {
                cosp.values[i] = P1.values[i] * ev.dx[c].values[i] + P2.values[i] * ev.dy[c].values[i];
            }
            auto dst = out.component(static_cast<Component>(c));
            const auto mc = t.analyze(cosp);
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += mc.c[i];
            const bool transport_dz = any_psi && (c == 2 || spec_.family == NoiseFamily::Example1);
            if (transport_dz) {
                PhysicalField sinp(sh);
                for (std::size_t i = 0; i < sh.size(); ++i) sinp.values[i] = S.values[i] * ev.dz[c].values[i];
                const auto ms = t.analyze(sinp, VerticalKind::Sin);
                for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += ms.c[i];
            }
        }
    }
    if (a != 0.0) {
        for (int c = 0; c < nc; ++c) {
            auto dst = out.component(static_cast<Component>(c));
            auto src = u.component(static_cast<Component>(c));
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += a * src[i];
        }
    }
    if (additive) {
        for (std::size_t k = 0; k < spec_.K; ++k)
            if (w[k] != 0.0) out.axpy(w[k], spec_.chi[k]);
    }
    out = leray_project(out);
    out.enforce_reality();
    return out;
}

std::vector<SpectralState> NoiseOperator::columns(const SpectralState& u) const {
    std::vector<SpectralState> cols;
    cols.reserve(spec_.K);
    std::vector<double> e(spec_.K, 0.0);
    for (std::size_t k = 0; k < spec_.K; ++k) {
        e[k] = 1.0;
        cols.push_back(combine(u, e, true));
        e[k] = 0.0;
    }
    return cols;
}

SpectralState NoiseOperator::apply(const SpectralState& u, const std::vector<double>& dW) const {
    return combine(u, dW, true);
}

std::vector<SpectralState> NoiseOperator::linear_columns(const SpectralState& u) const {
    std::vector<SpectralState> cols;
    cols.reserve(spec_.K);
    std::vector<double> e(spec_.K, 0.0);
    for (std::size_t k = 0; k < spec_.K; ++k) {
        e[k] = 1.0;
        cols.push_back(combine(u, e, false));
        e[k] = 0.0;
    }
    return cols;
}

double hs_norm2(const std::vector<SpectralState>& columns, NormSpace space) {
    return hs_tail2(columns, 0, space);
}

double hs_tail2(const std::vector<SpectralState>& columns, std::size_t k0, NormSpace space) {
    double s = 0.0;
    for (std::size_t k = k0; k < columns.size(); ++k) {
        const double n = space == NormSpace::H ? norm_H(columns[k]) : norm_V(columns[k]);
        s += n * n;
    }
    return s;
}

EnvelopeFit fit_envelope(const std::vector<double>& y, const std::vector<double>& x1, const std::vector<double>& x2,
                         double quantile) {
    const std::size_t n = y.size();
    if (x1.size() != n || x2.size() != n || n == 0) throw std::invalid_argument("fit_envelope: size mismatch");
    if (!(quantile > 0.0 && quantile <= 1.0)) throw std::invalid_argument("fit_envelope: quantile must lie in (0, 1]");
    if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) return {};
    if (std::all_of(x2.begin(), x2.end(), [&](double v) { return v == x2.front(); })) {
        throw std::domain_error("fit_envelope: x2 does not vary across samples");
    }

    // Weighted NNLS (relative residuals) for the slope guess.
    double s11 = 0.0, s12 = 0.0, s22 = 0.0, r1 = 0.0, r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (y[i] <= 0.0) continue;
        const double w = 1.0 / (y[i] * y[i]);
        s11 += w * x1[i] * x1[i];
        s12 += w * x1[i] * x2[i];
        s22 += w * x2[i] * x2[i];
        r1 += w * x1[i] * y[i];
        r2 += w * x2[i] * y[i];
    }
    double a0 = 0.0;
    const double det = s11 * s22 - s12 * s12;
    if (det > 0.0) {
        const double b_ls = (r1 * s22 - r2 * s12) / det;
        const double a_ls = (s11 * r2 - s12 * r1) / det;
        if (b_ls >= 0.0 && a_ls >= 0.0) {
            a0 = a_ls;
        } else {
            // Best one-variable fit on the boundary of the positive quadrant.
            const double bb = s11 > 0.0 ? std::max(0.0, r1 / s11) : 0.0;
            const double aa = s22 > 0.0 ? std::max(0.0, r2 / s22) : 0.0;
            const double cost_b = -2.0 * bb * r1 + bb * bb * s11;
            const double cost_a = -2.0 * aa * r2 + aa * aa * s22;
            a0 = cost_a < cost_b ? aa : 0.0;
        }
    } else if (s22 > 0.0) {
        a0 = std::max(0.0, r2 / s22);
    }

    std::vector<double> ratio;
    ratio.reserve(n);
    double b_floor = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (x1[i] <= 0.0) continue;
        ratio.push_back((y[i] - a0 * x2[i]) / x1[i]);
        if (x2[i] <= 0.0) b_floor = std::max(b_floor, y[i] / x1[i]);
    }
    EnvelopeFit fit;
    if (!ratio.empty()) {
        std::sort(ratio.begin(), ratio.end());
        const auto idx = static_cast<std::size_t>(std::ceil(quantile * ratio.size())) - 1;
        fit.b = std::max(0.0, ratio[std::min(idx, ratio.size() - 1)]);
    }
    fit.b = std::max(fit.b, b_floor);
    for (std::size_t i = 0; i < n; ++i) {
        if (x2[i] > 0.0) fit.a = std::max(fit.a, (y[i] - fit.b * x1[i]) / x2[i]);
    }
    return fit;
}

void apply_thresholds(HypothesisReport& r, double mu, double nu) {
    const double c2 = r.C_BDG * r.C_BDG;
    r.eta1_bound = std::min(1.0 / (r.p * (1.0 + c2) - 1.0), std::pow(10.0, 2.0 / r.p - 1.0));
    r.gamma_bound = 2.0 / c2;
    r.eta0_bound = 2.0 / (3.0 + 2.0 * c2);
    r.eta2_bound = 1.0 / (c2 + 1.5);
    r.eta3_bound = std::min(mu, nu) / (2.0 * c2);
    r.eta1_pass = r.eta1 < r.eta1_bound;
    r.gamma_pass = r.gamma < r.gamma_bound;
    r.eta0_pass = r.eta0 < r.eta0_bound;
    r.eta2_pass = r.eta2 < r.eta2_bound;
    r.eta3_pass = r.eta3 < r.eta3_bound;
}

namespace {

double uniform_in(GaussianStream& g, double lo, double hi) { return lo + (hi - lo) * g.uniform(); }

SpectralState sample_state(const DomainSpec& d, GaussianStream& g, const EstimatorOptions& opt) {
    const double lam_lo = std::min(d.mu * std::pow(2.0 * kPi / std::max(d.L1, d.L2), 2), d.nu * std::pow(kPi / d.h, 2));
    const double lam_hi = d.lambda(d.N1, d.N2, d.M);
    RandomStateOptions ro;
    ro.lambda_max = std::exp(uniform_in(g, std::log(lam_lo), std::log(lam_hi))) * 1.0000001;
    ro.decay = 1.5 * g.uniform();
    ro.divergence_free = true;
    auto u = random_state(d, g, ro);
    double nh = norm_H(u);
    if (nh == 0.0) {
        ro.lambda_max = std::numeric_limits<double>::infinity();
        u = random_state(d, g, ro);
        nh = norm_H(u);
    }
    const double amp = std::pow(10.0, uniform_in(g, opt.log_amp_min, opt.log_amp_max));
    u *= amp / nh;
    return u;
}

// area * sum_k mu |k|^2 |c(k, 0)|^2 over the velocity components: squared V-bar norm of the depth average.
double vbar_V2(const SpectralState& u) {
    const auto& d = u.domain();
    double s = 0.0;
    for (int c = 0; c < 2; ++c)
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx)
                s += d.mu * d.k2(kx, ky) * std::norm(u.at(static_cast<Component>(c), kx, ky, 0));
    return d.area() * s;
}

// |A_S A_2 v|^2 over the horizontal torus.
double vbar_AS2(const SpectralState& u) {
    const auto& d = u.domain();
    double s = 0.0;
    for (int c = 0; c < 2; ++c)
        for (int ky = -d.N2; ky <= d.N2; ++ky)
            for (int kx = -d.N1; kx <= d.N1; ++kx) {
                const double l = d.mu * d.k2(kx, ky);
                s += l * l * std::norm(u.at(static_cast<Component>(c), kx, ky, 0));
            }
    return d.area() * s;
}

}  // namespace

HypothesisReport estimate_growth_constants(const NoiseOperator& op, std::size_t sample_count, double p,
                                           const EstimatorOptions& opt) {
    if (sample_count < 2) throw std::invalid_argument("estimate_growth_constants: need at least 2 samples");
    if (!(p >= 2.0)) throw std::invalid_argument("estimate_growth_constants: p must be >= 2");
    if (!(opt.C_BDG > 0.0)) throw std::invalid_argument("estimate_growth_constants: C_BDG must be > 0");
    const auto& d = op.spec().domain;
    HypothesisReport r;
    r.p = p;
    r.C_BDG = opt.C_BDG;
    r.samples = sample_count;

    std::vector<double> y0, y1, y2, y3v, y3t, yg;
    std::vector<double> xH, xV, xA, xAS, xdzv, xdzt, xD, xAD;
    GaussianStream g(opt.seed, 0x6E6F);
    for (std::size_t i = 0; i < sample_count; ++i) {
        const auto u = sample_state(d, g, opt);
        // sigma(U) - sigma(0) is homogeneous in U; the additive part only enters the constant.
        const auto cols = op.linear_columns(u);
        const double h = norm_H(u), v = norm_V(u), a = norm_DA(u);
        y0.push_back(hs_norm2(cols, NormSpace::H));
        y1.push_back(hs_norm2(cols, NormSpace::V));
        double s2 = 0.0, sv = 0.0, st = 0.0;
        for (const auto& c : cols) {
            s2 += vbar_V2(c);
            sv += dz_norm2(c, Component::V1) + dz_norm2(c, Component::V2);
            st += dz_norm2(c, Component::T);
        }
        y2.push_back(s2);
        y3v.push_back(sv);
        y3t.push_back(st);
        xH.push_back(h * h);
        xV.push_back(v * v);
        xA.push_back(a * a);
        xAS.push_back(vbar_AS2(u));
        xdzv.push_back(grad3_dz_norm2(u, Component::V1) + grad3_dz_norm2(u, Component::V2));
        xdzt.push_back(grad3_dz_norm2(u, Component::T));

        const auto dlt = sample_state(d, g, opt);
        const auto cols2 = op.linear_columns(u + dlt);
        double diff = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double n = norm_V(cols2[k] - cols[k]);
            diff += n * n;
        }
        const double dv = norm_V(dlt), da = norm_DA(dlt);
        yg.push_back(diff);
        xD.push_back(dv * dv);
        xAD.push_back(da * da);
    }

    const auto f0 = fit_envelope(y0, xH, xV, opt.quantile);
    const auto f1 = fit_envelope(y1, xV, xA, opt.quantile);
    const auto f2 = fit_envelope(y2, xV, xAS, opt.quantile);
    const auto f3v = fit_envelope(y3v, xV, xdzv, opt.quantile);
    const auto f3t = fit_envelope(y3t, xV, xdzt, opt.quantile);
    const auto fg = fit_envelope(yg, xD, xAD, opt.quantile);
    r.eta0 = f0.a;
    r.b0 = f0.b;
    r.eta1 = f1.a;
    r.b1 = f1.b;
    r.eta2 = f2.a;
    r.b2 = f2.b;
    r.eta3 = std::max(f3v.a, f3t.a);
    r.b3 = std::max(f3v.b, f3t.b);
    r.gamma = fg.a;
    r.bgamma = fg.b;
    apply_thresholds(r, d.mu, d.nu);
    return r;
}

}  // namespace stochpe
