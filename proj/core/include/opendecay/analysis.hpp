// analysis.hpp: Checks on computed dynamics: positivity, complete positivity,
// trace behaviour, long-time limits, mixedness and the amplitude-damping Kraus pair.

#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "opendecay/evolution.hpp"
#include "opendecay/linalg.hpp"
#include "opendecay/model.hpp"

namespace opendecay::analysis {

using linalg::ComplexMatrix;

enum class Status { pass, fail, not_applicable };

// `measured` is oriented so that the check fails iff measured > tolerance.
struct VerificationReport {
    std::string name;
    Status status = Status::fail;
    double measured = 0.0;
    double tolerance = 0.0;
    std::size_t samples = 0;
    double t_begin = 0.0;
    double t_end = 0.0;
    std::string detail;

    bool passed() const noexcept { return status == Status::pass; }
};

// Builds a report with status derived from measured vs tolerance.
VerificationReport make_report(std::string name, double measured, double tolerance,
                               const evolution::Trajectory* traj = nullptr);

/// Smallest eigenvalue of rho(t), rho_ss(t) and rho_ff(t) over all samples must
/// be >= -tol. measured = -(smallest eigenvalue seen). Throws NotHermitianError
/// on non-hermitian samples.
VerificationReport check_positivity(const evolution::Trajectory& traj, double tol);

/// max_t |Tr rho(t) - 1|.
VerificationReport check_trace(const evolution::Trajectory& traj, double tol);

struct ChoiMatrix {
    ComplexMatrix C; // (d_in * d_out) x (d_in * d_out)
    std::size_t d = 0; // input dimension
    double t = 0.0;
};

using LinearMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

/// C = sum_ij E_ij (x) map(E_ij). The map is only ever evaluated on hermitian
/// inputs: E_ii, (E_ij + E_ji)/2 and (E_ij - E_ji)/(2i); the images of the
/// matrix units are recovered by linearity.
ChoiMatrix choi_matrix(const LinearMap& map_eval, std::size_t d, double t = 0.0);

/// V_t of the enlarged master equation on d_tot x d_tot inputs, evaluated by the
/// exact propagator or by rk4 with a step close to `dt`.
LinearMap enlarged_map(const model::EnlargedModel& model, double t, evolution::Method method, double dt);

/// Restriction of V_t to H_s: rho_ss(0) -> rho_ss(t), starting from diag(rho_ss(0), 0).
LinearMap restricted_map(const model::EnlargedModel& model, double t, evolution::Method method, double dt);

/// Passes iff the smallest eigenvalue of C is >= -tol; measured = -(smallest eigenvalue).
VerificationReport check_cp(const ChoiMatrix& choi, double tol);

/// Tr(rho^2). Throws NotHermitianError when rho is not hermitian within 1e-10.
double mixedness(const ComplexMatrix& rho);

struct AsymptoticMeasures {
    double gamma0 = 0.0;          // smallest eigenvalue of Gamma
    double bound_excess = 0.0;    // max_t [Tr rho_ss(t) - Tr rho_ss(0) e^{-gamma0 t}]
    double t_final = 0.0;
    double rho_ss_norm = 0.0;     // ||rho_ss(t_final)||_F
    double rho_sf_norm = 0.0;     // ||rho_sf(t_final)||_F
    double trace_ff_error = 0.0;  // |Tr rho_ff(t_final) - 1|
    bool horizon_reached = false; // t_final >= 20 / gamma0
};

inline constexpr double kAsymptoticHorizon = 20.0;   // in units of 1/gamma0
inline constexpr double kAsymptoticBoundSlack = 1e-8;
inline constexpr double kAsymptoticLimitTolerance = 1e-7;

// Raw numbers behind asymptotics_check. Requires n0 == 0 (throws ValidationError otherwise).
AsymptoticMeasures measure_asymptotics(const evolution::Trajectory& traj,
                                       const model::GammaDecomposition& dec);

/// Non-singular decay matrix only (status not_applicable otherwise). Passes when
/// Tr rho_ss(t) <= Tr rho_ss(0) e^{-gamma0 t} + 1e-8 at every sample and, at a
/// final time >= 20/gamma0, ||rho_ss||_F, ||rho_sf||_F and |Tr rho_ff - 1| are all
/// <= 1e-7. measured is the worst of these, each divided by its tolerance, so
/// the reported tolerance is 1.
VerificationReport asymptotics_check(const evolution::Trajectory& traj,
                                     const model::GammaDecomposition& dec,
                                     const model::SystemSpec& spec);

struct KrausPair {
    ComplexMatrix M0;
    ComplexMatrix M1;
    double p = 0.0;
};

/// Amplitude damping with p(t) = 1 - e^{-Gamma t}:
/// M0 = diag(sqrt(1 - p), 1), M1 = sqrt(p) |f><s|.
KrausPair kraus_amplitude_damping(double gamma, double t);

// M0 rho M0^dag + M1 rho M1^dag
ComplexMatrix apply_kraus(const ComplexMatrix& rho0, const KrausPair& pair);

} // namespace opendecay::analysis
