#pragma once

#include <array>
#include <memory>
#include <vector>

#include "stochpe/state.hpp"

namespace stochpe {

/// Which physical grid a transform targets.
///
/// Base: smallest grid on which to_spectral(to_physical(U)) == U exactly.
/// Dealiased: padded grid (3N+1 points per horizontal axis, 2M+1 vertical
/// intervals) on which the projection of any quadratic product onto the
/// resolved modes, and the integral of any triple product, is exact.
/// Sextic: 6N+1 points per horizontal axis and 3M+1 vertical intervals, on
/// which integrals of sixth-degree products (L6 norms, |grad u|^2 |u|^4) are exact.
enum class GridKind { Base, Dealiased, Sextic };

/// Tensor grid: nx * ny uniform horizontal points, nz + 1 uniform vertical
/// points z_j = -h + j h / nz (endpoints included, trapezoid weights).
struct GridShape {
    int nx = 1;
    int ny = 1;
    int nz = 1;  // number of vertical intervals

    int nzp() const { return nz + 1; }
    std::size_t plane() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t size() const { return plane() * nzp(); }
    bool operator==(const GridShape&) const = default;
};

GridShape grid_shape(const DomainSpec& d, GridKind kind);

/// Real samples on a GridShape, laid out [z][y][x].
struct PhysicalField {
    GridShape shape{};
    std::vector<double> values;

    PhysicalField() = default;
    explicit PhysicalField(const GridShape& s, double fill = 0.0) : shape(s), values(s.size(), fill) {}

    double& at(int ix, int iy, int iz) { return values[(static_cast<std::size_t>(iz) * shape.ny + iy) * shape.nx + ix]; }
    double at(int ix, int iy, int iz) const {
        return values[(static_cast<std::size_t>(iz) * shape.ny + iy) * shape.nx + ix];
    }
};

using PhysicalTriple = std::array<PhysicalField, kComponents>;

/// Vertical profile family of a modal field.
enum class VerticalKind {
    Cos,  // cos(m pi z / h)
    Sin,  // sin(m pi z / h)
};

/// Coefficients of one scalar field c(k, m) exp(i k.x) phi_m(z), optionally
/// plus lin(k) (z + h) exp(i k.x). The linear term carries the part of w(v)
/// driven by a barotropic divergence and of int_z^0 T dz'.
struct ModalField {
    VerticalKind kind = VerticalKind::Cos;
    std::vector<cplx> c;    // [m][ky][kx]
    std::vector<cplx> lin;  // [ky][kx]; empty when absent

    ModalField() = default;
    ModalField(const DomainSpec& d, VerticalKind k) : kind(k), c(d.component_modes()) {}
};

/// Copy of one state component as a cosine modal field.
ModalField modal_component(const SpectralState& s, Component c);

/// Spectral <-> physical transforms for one (domain, grid) pair. Horizontal
/// transforms go through FFTW; vertical ones through dense cos/sin tables.
/// Immutable after construction, so one instance can be shared across threads.
class Transformer {
  public:
    Transformer(const DomainSpec& domain, GridKind kind);
    ~Transformer();
    Transformer(const Transformer&) = delete;
    Transformer& operator=(const Transformer&) = delete;

    const DomainSpec& domain() const { return domain_; }
    const GridShape& shape() const { return shape_; }

    double x(int ix) const { return domain_.L1 * ix / shape_.nx; }
    double y(int iy) const { return domain_.L2 * iy / shape_.ny; }
    double z(int iz) const { return -domain_.h + domain_.h * iz / shape_.nz; }

    PhysicalField synthesize(const ModalField& f) const;
    /// Cosine projection of a physical field onto the resolved modes. The
    /// forward horizontal transform carries the 1/(nx ny) factor.
    ///
    /// With kind = Sin the field is taken to be a sine series in z of degree
    /// <= 2M (e.g. a cosine field times a z-derivative); its cosine projection
    /// is then exact on the Dealiased grid, where the plain trapezoid rule is not.
    ModalField analyze(const PhysicalField& f, VerticalKind kind = VerticalKind::Cos) const;

    /// Trapezoid-rule integral over the domain.
    double integrate(const PhysicalField& f) const;
    /// Integral of the top (z = 0) plane over the horizontal torus.
    double integrate_top(const PhysicalField& f) const;

  private:
    struct Plans;

    DomainSpec domain_;
    GridShape shape_;
    std::vector<double> cos_table_;  // [j][m]
    std::vector<double> sin_table_;  // [j][m]
    std::vector<double> analysis_;      // [m][j]
    std::vector<double> analysis_sin_;  // [m][j], sine-type input
    std::vector<double> zweights_;   // [j]
    std::unique_ptr<Plans> plans_;
};

/// Shared transformer for (domain, kind); created on first use.
const Transformer& transformer(const DomainSpec& domain, GridKind kind);

PhysicalTriple to_physical(const SpectralState& state, bool dealias = false);
/// Inverse of to_physical. The grid kind is deduced from the field shape.
SpectralState to_spectral(const PhysicalTriple& fields, const DomainSpec& domain, double time = 0.0);

}  // namespace stochpe
