#include "stochpe/transform.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace stochpe {
namespace {

// FFTW's planner is not thread-safe; execution on new arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

inline int wrap(int k, int n) { return ((k % n) + n) % n; }

}  // namespace

GridShape grid_shape(const DomainSpec& d, GridKind kind) {
    GridShape s;
    if (kind == GridKind::Base) {
        s.nx = 2 * d.N1 + 1;
        s.ny = 2 * d.N2 + 1;
        s.nz = d.M + 1;
    } else if (kind == GridKind::Sextic) {
        s.nx = 6 * d.N1 + 1;
        s.ny = 6 * d.N2 + 1;
        s.nz = 3 * d.M + 1;
    } else {
        s.nx = 3 * d.N1 + 1;
        s.ny = 3 * d.N2 + 1;
        // 2M+1 intervals: cosine products of degree 3M and sine-type products
        // of degree 2M (needed by analyze_sin) are both integrated exactly.
        s.nz = 2 * d.M + 1;
    }
    return s;
}

ModalField modal_component(const SpectralState& s, Component c) {
    ModalField f;
    f.kind = VerticalKind::Cos;
    const auto comp = s.component(c);
    f.c.assign(comp.begin(), comp.end());
    return f;
}

struct Transformer::Plans {
    fftw_plan backward = nullptr;
    fftw_plan forward = nullptr;
};

Transformer::Transformer(const DomainSpec& domain, GridKind kind)
    : domain_(domain), shape_(grid_shape(domain, kind)), plans_(std::make_unique<Plans>()) {
    domain_.validate();
    const int nzp = shape_.nzp();
    const int nm = domain_.nm();
    cos_table_.resize(static_cast<std::size_t>(nzp) * nm);
    sin_table_.resize(static_cast<std::size_t>(nzp) * nm);
    analysis_.resize(static_cast<std::size_t>(nm) * nzp);
    zweights_.resize(nzp);
    const double dz = domain_.h / shape_.nz;
    for (int j = 0; j < nzp; ++j) {
        zweights_[j] = (j == 0 || j == shape_.nz) ? 0.5 * dz : dz;
    }
    for (int j = 0; j < nzp; ++j) {
        const double zj = z(j);
        for (int m = 0; m < nm; ++m) {
            cos_table_[static_cast<std::size_t>(j) * nm + m] = std::cos(kPi * m * zj / domain_.h);
            // sin(m pi z / h) vanishes exactly at both ends of the column.
            const bool end = (j == 0 || j == shape_.nz);
            sin_table_[static_cast<std::size_t>(j) * nm + m] = end ? 0.0 : std::sin(kPi * m * zj / domain_.h);
        }
    }
    for (int m = 0; m < nm; ++m) {
        const double norm = (m == 0 ? 1.0 : 2.0) / domain_.h;
        for (int j = 0; j < nzp; ++j) {
            analysis_[static_cast<std::size_t>(m) * nzp + j] =
                norm * zweights_[j] * cos_table_[static_cast<std::size_t>(j) * nm + m];
        }
    }

    // Sine-type products: sine coefficients q = 1..2M by trapezoid (exact on
    // this grid for the Dealiased kind), then mapped onto cosines with the
    // closed-form integrals of sin(q pi z/h) cos(n pi z/h) over (-h, 0).
    analysis_sin_.assign(static_cast<std::size_t>(nm) * nzp, 0.0);
    const int qmax = 2 * domain_.M;
    for (int q = 1; q <= qmax; ++q) {
        for (int n = 0; n < nm; ++n) {
            auto term = [](int k) {
                if (k == 0) return 0.0;
                const double sgn = (std::abs(k) % 2 == 0) ? 1.0 : -1.0;
                return (sgn - 1.0) / k;
            };
            const double I = 0.5 * (term(q + n) + term(q - n));
            const double s2c = (n == 0 ? 1.0 : 2.0) / domain_.h * (domain_.h / kPi) * I;
            if (s2c == 0.0) continue;
            for (int j = 0; j < nzp; ++j) {
                const bool end = (j == 0 || j == shape_.nz);
                const double sq = end ? 0.0 : std::sin(kPi * q * z(j) / domain_.h);
                analysis_sin_[static_cast<std::size_t>(n) * nzp + j] += s2c * (2.0 / domain_.h) * zweights_[j] * sq;
            }
        }
    }

    std::vector<fftw_complex> scratch(shape_.size());
    int n[2] = {shape_.ny, shape_.nx};
    const int dist = static_cast<int>(shape_.plane());
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->backward = fftw_plan_many_dft(2, n, nzp, scratch.data(), nullptr, 1, dist, scratch.data(), nullptr, 1,
                                          dist, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->forward = fftw_plan_many_dft(2, n, nzp, scratch.data(), nullptr, 1, dist, scratch.data(), nullptr, 1,
                                         dist, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plans_->backward || !plans_->forward) throw std::runtime_error("FFTW planning failed");
}

Transformer::~Transformer() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plans_->backward) fftw_destroy_plan(plans_->backward);
    if (plans_->forward) fftw_destroy_plan(plans_->forward);
}

PhysicalField Transformer::synthesize(const ModalField& f) const {
    const auto& d = domain_;
    if (f.c.size() != d.component_modes()) throw std::invalid_argument("synthesize: coefficient shape mismatch");
    const bool has_lin = !f.lin.empty();
    if (has_lin && f.lin.size() != d.horizontal_modes()) throw std::invalid_argument("synthesize: linear term shape");
    const int nzp = shape_.nzp();
    const int nm = d.nm();
    const auto& table = (f.kind == VerticalKind::Cos) ? cos_table_ : sin_table_;
    const std::size_t plane = shape_.plane();

    std::vector<cplx> buf(shape_.size(), cplx{});
    const std::size_t hm = d.horizontal_modes();
    for (int ky = -d.N2; ky <= d.N2; ++ky) {
        for (int kx = -d.N1; kx <= d.N1; ++kx) {
            const std::size_t h = static_cast<std::size_t>(ky + d.N2) * d.nkx() + (kx + d.N1);
            bool any = has_lin && f.lin[h] != cplx{};
            for (int m = 0; m < nm && !any; ++m) any = f.c[m * hm + h] != cplx{};
            if (!any) continue;
            const std::size_t pos = static_cast<std::size_t>(wrap(ky, shape_.ny)) * shape_.nx + wrap(kx, shape_.nx);
            for (int j = 0; j < nzp; ++j) {
                cplx acc{};
                const double* row = &table[static_cast<std::size_t>(j) * nm];
                for (int m = 0; m < nm; ++m) acc += f.c[m * hm + h] * row[m];
                if (has_lin) acc += f.lin[h] * (z(j) + d.h);
                buf[j * plane + pos] += acc;
            }
        }
    }
    fftw_execute_dft(plans_->backward, reinterpret_cast<fftw_complex*>(buf.data()),
                     reinterpret_cast<fftw_complex*>(buf.data()));
    PhysicalField out(shape_);
    for (std::size_t i = 0; i < buf.size(); ++i) out.values[i] = buf[i].real();
    return out;
}

ModalField Transformer::analyze(const PhysicalField& f, VerticalKind kind) const {
    if (!(f.shape == shape_)) throw std::invalid_argument("analyze: grid shape mismatch");
    const auto& table = (kind == VerticalKind::Cos) ? analysis_ : analysis_sin_;
    const auto& d = domain_;
    const int nzp = shape_.nzp();
    const int nm = d.nm();
    const std::size_t plane = shape_.plane();
    std::vector<cplx> buf(f.values.begin(), f.values.end());
    fftw_execute_dft(plans_->forward, reinterpret_cast<fftw_complex*>(buf.data()),
                     reinterpret_cast<fftw_complex*>(buf.data()));
    const double scale = 1.0 / static_cast<double>(plane);
    ModalField out(d, VerticalKind::Cos);
    const std::size_t hm = d.horizontal_modes();
    for (int ky = -d.N2; ky <= d.N2; ++ky) {
        for (int kx = -d.N1; kx <= d.N1; ++kx) {
            const std::size_t h = static_cast<std::size_t>(ky + d.N2) * d.nkx() + (kx + d.N1);
            const std::size_t pos = static_cast<std::size_t>(wrap(ky, shape_.ny)) * shape_.nx + wrap(kx, shape_.nx);
            for (int m = 0; m < nm; ++m) {
                cplx acc{};
                const double* row = &table[static_cast<std::size_t>(m) * nzp];
                for (int j = 0; j < nzp; ++j) acc += buf[j * plane + pos] * row[j];
                out.c[m * hm + h] = acc * scale;
            }
        }
    }
    return out;
}

double Transformer::integrate(const PhysicalField& f) const {
    if (!(f.shape == shape_)) throw std::invalid_argument("integrate: grid shape mismatch");
    const std::size_t plane = shape_.plane();
    const double dA = domain_.area() / static_cast<double>(plane);
    double total = 0.0;
    for (int j = 0; j < shape_.nzp(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < plane; ++i) s += f.values[j * plane + i];
        total += zweights_[j] * s;
    }
    return total * dA;
}

double Transformer::integrate_top(const PhysicalField& f) const {
    if (!(f.shape == shape_)) throw std::invalid_argument("integrate_top: grid shape mismatch");
    const std::size_t plane = shape_.plane();
    double s = 0.0;
    const std::size_t off = static_cast<std::size_t>(shape_.nz) * plane;
    for (std::size_t i = 0; i < plane; ++i) s += f.values[off + i];
    return s * domain_.area() / static_cast<double>(plane);
}

const Transformer& transformer(const DomainSpec& domain, GridKind kind) {
    using Key = std::tuple<double, double, double, int, int, int, double, double, int>;
    static std::mutex cache_mutex;
    static std::map<Key, std::unique_ptr<Transformer>> cache;
    const Key key{domain.L1, domain.L2, domain.h, domain.N1, domain.N2, domain.M, domain.mu, domain.nu,
                  static_cast<int>(kind)};
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<Transformer>(domain, kind)).first;
    return *it->second;
}

PhysicalTriple to_physical(const SpectralState& state, bool dealias) {
    const auto& t = transformer(state.domain(), dealias ? GridKind::Dealiased : GridKind::Base);
    PhysicalTriple out;
    for (int c = 0; c < kComponents; ++c) out[c] = t.synthesize(modal_component(state, static_cast<Component>(c)));
    return out;
}

SpectralState to_spectral(const PhysicalTriple& fields, const DomainSpec& domain, double time) {
    GridKind kind;
    if (fields[0].shape == grid_shape(domain, GridKind::Base)) {
        kind = GridKind::Base;
    } else if (fields[0].shape == grid_shape(domain, GridKind::Dealiased)) {
        kind = GridKind::Dealiased;
    } else {
        throw std::invalid_argument("to_spectral: field shape matches no grid of this domain");
    }
    const auto& t = transformer(domain, kind);
    SpectralState out(domain, time);
    for (int c = 0; c < kComponents; ++c) {
        if (!(fields[c].shape == fields[0].shape)) throw std::invalid_argument("to_spectral: inconsistent shapes");
        const auto mf = t.analyze(fields[c]);
        auto dst = out.component(static_cast<Component>(c));
        std::copy(mf.c.begin(), mf.c.end(), dst.begin());
    }
    return out;
}

}  // namespace stochpe
