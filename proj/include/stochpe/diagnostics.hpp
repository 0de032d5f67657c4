#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "stochpe/state.hpp"

namespace stochpe {

enum class DiagnosticLevel {
    Basic,  // spectral functionals only
    Full,   // plus the L6-type quadratures on the sextic grid
};

/// Monitored functionals at one stored time plus their running time integrals.
/// Norm conventions: |.| is the H norm, ||.|| the V norm; vbar = A_2 v and
/// vtilde = R v; A_S = -mu Lap on the 2D torus.
struct DiagnosticRecord {
    double t = 0.0;

    double H2 = 0.0;           // |U|^2
    double V2 = 0.0;           // ||U||^2
    double DA2 = 0.0;          // |AU|^2
    double L6_vtilde6 = 0.0;   // |vtilde|_6^6
    double grad3vt2_vt4 = 0.0; // int |grad_3 vtilde|^2 |vtilde|^4
    double Vbar_H1_4 = 0.0;    // ||vbar||_{H^1}^4
    double vbarV2_AS2 = 0.0;   // ||vbar||^2 |A_S vbar|^2
    double dz_v2 = 0.0;        // |d_z v|^2
    double dz_v4 = 0.0;        // |d_z v|^4
    double grad3_dz_v2 = 0.0;  // |grad_3 d_z v|^2
    double L6_T6 = 0.0;        // |T|_6^6
    double dz_T2 = 0.0;        // |d_z T|^2
    double dz_T4 = 0.0;        // |d_z T|^4
    double grad3_dz_T2 = 0.0;  // |grad_3 d_z T|^2
    double top_T6 = 0.0;       // int_{z=0} |T|^6
    double top_dzT2 = 0.0;     // |d_z T|^2 on z = 0 (zero for the cosine basis)
    double theta = 1.0;        // cutoff value theta(||U - U*||)
    double dist_to_Ustar = 0.0;

    // running maxima and trapezoid integrals from t0
    double sup_V2 = 0.0;
    double int_V2 = 0.0;
    double int_DA2 = 0.0;
    double int_H2V2 = 0.0;   // int |U|^2 ||U||^2
    double int_DA2V2 = 0.0;  // int |AU|^2 ||U||^2
    double int_w = 0.0;      // int |U|^2 ||U||^2 + ||U||^2 + |F_U|^2
    double int_vt = 0.0;     // int |vtilde|_6^6 + int |grad_3 vtilde|^2 |vtilde|^4
    double int_vbar_H1_4 = 0.0;
    double int_vbar_AS = 0.0;  // int ||vbar||^2 |A_S vbar|^2
    double int_dzv = 0.0;      // int |grad_3 d_z v|^2 + |d_z v|^2 |grad_3 d_z v|^2
    double int_T = 0.0;        // int |T|_6^6 + |d_z T|^2 |grad_3 d_z T|^2

    /// CSV column names in output order.
    static const std::vector<std::string>& columns();
    std::vector<double> values() const;
};

/// Instantaneous functionals of u. ustar may be null (dist = 0); kappa <= 0
/// leaves theta at 1. Cumulative fields are zero.
DiagnosticRecord record(const SpectralState& u, const SpectralState* ustar, double kappa,
                        DiagnosticLevel level = DiagnosticLevel::Full);

/// Fill the cumulative fields of next from prev by the trapezoid rule.
/// forcing_H2 = |F_U|^2 (constant forcing).
void accumulate(DiagnosticRecord& next, const DiagnosticRecord& prev, double forcing_H2 = 0.0);
/// Cumulative fields of the first record of a series.
void start_accumulation(DiagnosticRecord& first);

/// Names of the stopping functionals: "N" (sup ||U||^2 + int |AU|^2), "w",
/// "vt", "gradvb", "dzv", "T".
const std::vector<std::string>& stopping_functionals();
/// Value of a stopping functional at a record; throws std::invalid_argument
/// for an unknown name.
double functional_value(const DiagnosticRecord& r, const std::string& name);

/// First time the functional reaches K, linearly interpolated between the
/// bracketing records; nullopt if it never does.
std::optional<double> detect_stopping(const std::vector<DiagnosticRecord>& series, const std::string& name, double K);

/// Write series as CSV (header line, then one row per record, 17 significant digits).
std::string diagnostics_csv(const std::vector<DiagnosticRecord>& series);

}  // namespace stochpe
