#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stochpe/state.hpp"

namespace stochpe {

enum class NoiseFamily { Zero, Example1, Example2 };

const char* to_string(NoiseFamily f);
NoiseFamily noise_family_from_string(const std::string& s);

/// Derived size constants of a noise specification.
struct NoiseConstants {
    double theta0 = 0.0;  // sqrt(sum |phi_k|_inf^2 + |psi_k|_inf^2)
    double theta1 = 0.0;  // sqrt(sum |grad_3 phi_k|_inf^2 + |grad_3 psi_k|_inf^2)
    double kappa = 0.0;   // sqrt(sum ||chi_k||^2)
    double alpha = 0.0;   // sqrt(sum alpha_k^2)
};

/// Gradient-dependent noise sigma(U) e_k for k = 1..K.
///
/// Coefficient fields are stored as states on the simulation domain:
/// phi[k] carries phi_k in its v1/v2 slots and psi_k in its T slot; chi[k] is
/// the additive field (all three components).
///
///   Example1: v-column (phi_k.grad) v + psi_k d_z v + alpha_k v + chi_k
///   Example2: v-column (phi_k.grad) A_3 v + alpha_k v + chi_k   (phi_k z-independent, psi_k = 0)
///   T-column (if temperature): (phi_k.grad) T + psi_k d_z T + alpha_k T + chi_k,T
///
/// and each column is projected by P_H. The temperature column has no example
/// of its own and mirrors the velocity structure of Example 1.
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::Zero;
    DomainSpec domain{};
    std::size_t K = 0;
    std::vector<SpectralState> phi;
    std::vector<SpectralState> chi;
    std::vector<double> alpha;
    bool temperature = true;

    /// Throws std::invalid_argument on inconsistent sizes, a foreign domain, a
    /// negative alpha, or (Example2) a z-dependent phi_k or nonzero psi_k.
    void validate() const;

    /// Recomputed from the stored fields; L-infinity norms are maxima over the
    /// dealiased grid.
    NoiseConstants constants() const;
};

/// Closed-form coefficient families. With d_k = decay^(k-1), a_k = pi (k-1)/K
/// and j_k = 1 + (k-1) mod max(1, wave):
///
///   phi_k = d_k [ phi_const (cos a_k, sin a_k)
///               + phi_wave_amp (cos(2 pi j_k y/L2), cos(2 pi j_k x/L1)) cos(phi_wave_m pi z/h) ]
///   psi_k = d_k [ psi_const + psi_wave_amp cos(2 pi j_k x/L1) cos(pi z/h) ]
///   alpha_k = alpha d_k
///   chi_1 = chi_amp cos(2 pi (chi_kx x/L1 + chi_ky y/L2)) cos(chi_m pi z/h) in chi_field, chi_k = 0 for k > 1
struct NoisePreset {
    NoiseFamily family = NoiseFamily::Zero;
    std::size_t K = 0;
    double decay = 0.5;
    double phi_const = 0.0;
    double phi_wave_amp = 0.0;
    int wave = 1;
    int phi_wave_m = 0;
    double psi_const = 0.0;
    double psi_wave_amp = 0.0;
    double alpha = 0.0;
    double chi_amp = 0.0;
    int chi_kx = 1;
    int chi_ky = 0;
    int chi_m = 0;
    Component chi_field = Component::T;
    bool temperature = true;
};

NoiseSpec make_noise(const DomainSpec& d, const NoisePreset& p);

/// Per-k fields from a JSON file: {"family", "K", "alpha": [..], "temperature",
/// "phi": [checkpoint, ..], "chi": [checkpoint, ..]} (see docs/formats.md).
NoiseSpec load_noise_fields(const std::string& path, const DomainSpec& d);
void save_noise_fields(const std::string& path, const NoiseSpec& spec);

/// Evaluates sigma. Physical coefficient fields are cached at construction, so
/// one operator can be shared read-only between threads.
class NoiseOperator {
  public:
    explicit NoiseOperator(NoiseSpec spec);
    ~NoiseOperator();
    NoiseOperator(NoiseOperator&&) noexcept;
    NoiseOperator& operator=(NoiseOperator&&) noexcept;

    const NoiseSpec& spec() const { return spec_; }
    std::size_t K() const { return spec_.K; }
    bool is_zero() const;

    /// sigma(U) e_k for k = 0..K-1.
    std::vector<SpectralState> columns(const SpectralState& u) const;
    /// sum_k sigma(U) e_k dW_k, with transport products combined before a
    /// single projection.
    SpectralState apply(const SpectralState& u, const std::vector<double>& dW) const;
    /// Linear part only (chi dropped): sigma(U) - sigma(0).
    std::vector<SpectralState> linear_columns(const SpectralState& u) const;

  private:
    struct Cache;
    SpectralState combine(const SpectralState& u, const std::vector<double>& w, bool additive) const;

    NoiseSpec spec_;
    std::unique_ptr<Cache> cache_;
};

enum class NormSpace { H, V };

/// sum_k |column_k|^2 in H or V.
double hs_norm2(const std::vector<SpectralState>& columns, NormSpace space);
inline double hs_norm(const std::vector<SpectralState>& columns, NormSpace space) {
    return std::sqrt(hs_norm2(columns, space));
}
/// sum_{k >= k0} |column_k|_V^2, the truncation tail.
double hs_tail2(const std::vector<SpectralState>& columns, std::size_t k0, NormSpace space);

/// Empirical growth constants and the smallness thresholds they are held to.
struct HypothesisReport {
    double p = 4.0;
    double C_BDG = 2.0;
    std::size_t samples = 0;

    double eta0 = 0.0, eta1 = 0.0, eta2 = 0.0, eta3 = 0.0, gamma = 0.0;
    // additive constants of the fitted envelopes
    double b0 = 0.0, b1 = 0.0, b2 = 0.0, b3 = 0.0, bgamma = 0.0;

    double eta1_bound = 0.0;  // min(1/(p(1+C^2)-1), 10^(2/p-1))
    double gamma_bound = 0.0; // 2/C^2
    double eta0_bound = 0.0;  // 2/(3+2C^2)
    double eta2_bound = 0.0;  // 1/(C^2+3/2)
    double eta3_bound = 0.0;  // min(mu, nu)/(2C^2)

    bool eta1_pass = false, gamma_pass = false, eta0_pass = false, eta2_pass = false, eta3_pass = false;

    /// Hypothesis H_p (maximal existence): eta1 and gamma.
    bool maximal_pass() const { return eta1_pass && gamma_pass; }
    /// Additional global-existence conditions.
    bool global_pass() const { return maximal_pass() && eta0_pass && eta2_pass && eta3_pass; }
};

struct EstimatorOptions {
    double C_BDG = 2.0;
    std::uint64_t seed = 12345;
    /// Quantile used to fix the additive constant before the slope is certified.
    double quantile = 0.9;
    /// log10 range of sample amplitudes.
    double log_amp_min = -2.0;
    double log_amp_max = 2.0;
};

/// Fit y <= b x1 + a x2 over the samples: weighted nonnegative least squares
/// for a first guess, b from the quantile of (y - a x2)/x1, then the smallest
/// a that makes the envelope hold for every sample. Throws std::domain_error
/// when all x2 coincide.
struct EnvelopeFit {
    double b = 0.0;
    double a = 0.0;
};
EnvelopeFit fit_envelope(const std::vector<double>& y, const std::vector<double>& x1, const std::vector<double>& x2,
                         double quantile = 0.9);

/// Fill eta/bound/pass fields for the given p, C_BDG and viscosities.
void apply_thresholds(HypothesisReport& r, double mu, double nu);

/// Fits run on the linear part sigma(U) - sigma(0) against homogeneous norms of
/// U (e.g. |sigma(U) - sigma(0)|^2_V <= b |U|_V^2 + eta1 |AU|^2); the additive
/// part chi only changes the constant C.
HypothesisReport estimate_growth_constants(const NoiseOperator& op, std::size_t sample_count, double p,
                                           const EstimatorOptions& opt = {});

}  // namespace stochpe
