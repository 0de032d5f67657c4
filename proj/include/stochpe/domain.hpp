#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace stochpe {

inline constexpr double kPi = 3.14159265358979323846;

/// Prognostic component of U = (v1, v2, T).
enum class Component : int { V1 = 0, V2 = 1, T = 2 };

inline constexpr int kComponents = 3;

const char* to_string(Component c);

/// Periodic horizontal torus [0,L1)x[0,L2) times the water column (-h, 0).
///
/// Horizontal wavenumbers run over [-N1, N1] x [-N2, N2]; the vertical basis is
/// cos(m pi z / h) for m = 0..M, which encodes d_z U = 0 at top and bottom.
struct DomainSpec {
    double L1 = 2.0 * kPi;
    double L2 = 2.0 * kPi;
    double h = 1.0;
    int N1 = 4;
    int N2 = 4;
    int M = 4;
    double mu = 1.0;  // horizontal viscosity / diffusivity
    double nu = 1.0;  // vertical viscosity / diffusivity

    /// Throws std::invalid_argument on a violated invariant.
    void validate() const;

    int nkx() const { return 2 * N1 + 1; }
    int nky() const { return 2 * N2 + 1; }
    int nm() const { return M + 1; }
    std::size_t horizontal_modes() const { return static_cast<std::size_t>(nkx()) * nky(); }
    std::size_t component_modes() const { return horizontal_modes() * nm(); }
    std::size_t total_modes() const { return component_modes() * kComponents; }

    double kx_phys(int kx) const { return 2.0 * kPi * kx / L1; }
    double ky_phys(int ky) const { return 2.0 * kPi * ky / L2; }
    double kz_phys(int m) const { return kPi * m / h; }
    double k2(int kx, int ky) const {
        const double a = kx_phys(kx);
        const double b = ky_phys(ky);
        return a * a + b * b;
    }

    /// Eigenvalue of A on cos(m pi z/h) exp(i k.x).
    double lambda(int kx, int ky, int m) const;

    double volume() const { return L1 * L2 * h; }
    double area() const { return L1 * L2; }

    /// Storage offset of (component, kx, ky, m) in a coefficient array laid out
    /// as [component][m][ky + N2][kx + N1].
    std::size_t index(Component c, int kx, int ky, int m) const {
        return ((static_cast<std::size_t>(c) * nm() + m) * nky() + (ky + N2)) * nkx() + (kx + N1);
    }
    /// Offset inside one component block ([m][ky][kx]).
    std::size_t local_index(int kx, int ky, int m) const {
        return (static_cast<std::size_t>(m) * nky() + (ky + N2)) * nkx() + (kx + N1);
    }

    bool operator==(const DomainSpec&) const = default;
};

/// One basis mode of A with its eigenvalue.
struct BasisIndex {
    int kx = 0;
    int ky = 0;
    int m = 0;
    Component field = Component::V1;
    double lambda = 0.0;

    bool operator==(const BasisIndex&) const = default;
};

/// Version tag of the mode ordering written into checkpoints.
inline constexpr const char* kBasisOrderingTag = "lambda-asc;abs(kx),abs(ky),m,field,sign(kx),sign(ky);v1";

/// All (2N1+1)(2N2+1)(M+1)*3 modes sorted by increasing lambda, ties broken
/// lexicographically on (|kx|, |ky|, m, field, sign kx, sign ky).
std::vector<BasisIndex> build_basis(const DomainSpec& spec);

/// Ordered eigenbasis with rank <-> storage lookups, shared by the projection
/// operators and the Galerkin solver.
class Basis {
  public:
    explicit Basis(const DomainSpec& spec);

    const DomainSpec& domain() const { return spec_; }
    const std::vector<BasisIndex>& modes() const { return modes_; }
    std::size_t size() const { return modes_.size(); }

    /// Storage offset of the mode with the given rank.
    std::size_t storage(std::size_t rank) const { return storage_[rank]; }
    /// Rank of the mode at the given storage offset.
    std::size_t rank(std::size_t storage_offset) const { return rank_[storage_offset]; }

    /// lambda_n: eigenvalue of the n-th mode (1-based, n >= 1).
    double lambda_n(std::size_t n) const;

    /// Smallest n' >= n whose leading set contains every mode sharing
    /// (|kx|, |ky|, m) with a retained mode. Such sets are closed under complex
    /// conjugation and under the hydrostatic Leray projection.
    std::size_t closed_count(std::size_t n) const;

    /// Storage mask (1 = retained) of the n lowest modes.
    std::vector<std::uint8_t> mask(std::size_t n) const;

  private:
    DomainSpec spec_;
    std::vector<BasisIndex> modes_;
    std::vector<std::size_t> storage_;
    std::vector<std::size_t> rank_;
};

}  // namespace stochpe
