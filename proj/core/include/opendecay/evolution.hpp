// evolution.hpp: Right-hand sides, integrators and closed forms for the
// non-hermitian master equation and its probability-conserving enlargement.

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "opendecay/linalg.hpp"
#include "opendecay/model.hpp"

namespace opendecay::evolution {

using linalg::ComplexMatrix;

// Density matrix on H_s (+) H_f split into its four blocks.
struct BlockDensity {
    ComplexMatrix rho_ss;
    ComplexMatrix rho_sf;
    ComplexMatrix rho_fs;
    ComplexMatrix rho_ff;

    double total_trace() const;
};

BlockDensity split_blocks(const ComplexMatrix& rho, std::size_t d_s);
ComplexMatrix assemble_blocks(const BlockDensity& blocks);
// diag(rho_ss, 0_{d_f})
ComplexMatrix embed_system_state(const ComplexMatrix& rho_ss, std::size_t d_f);

// Sampled solution. `d_s` is the extent of the system block inside each
// state; for runs on H_s alone it equals the state dimension.
struct Trajectory {
    std::vector<double> times;
    std::vector<ComplexMatrix> states;
    std::size_t d_s = 0;

    std::size_t size() const noexcept { return times.size(); }
    BlockDensity blocks(std::size_t i) const { return split_blocks(states.at(i), d_s); }
    ComplexMatrix system_block(std::size_t i) const;
};

enum class Method { rk4, exact };

struct IntegratorConfig {
    double dt = 1e-3;
    double t_max = 1.0;
    std::size_t sample_stride = 1;
    Method method = Method::rk4;

    // Throws ValidationError on dt <= 0, t_max < 0, dt > t_max (t_max > 0) or
    // a zero stride.
    void validate() const;
    // Number of fixed steps; the actual step is t_max / step_count().
    std::size_t step_count() const;
    double step() const;

    friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

using Rhs = std::function<ComplexMatrix(const ComplexMatrix&)>;

// Largest absolute row sum of the generator; dt * scale <= 0.1 is the
// recommended operating range for rk4.
double generator_scale(const model::Liouvillian& L);
bool step_within_recommendation(const IntegratorConfig& cfg, double scale);

/// d rho/dt = -i H_eff rho + i rho H_eff^dagger - D[rho] on H_s.
ComplexMatrix rhs_wwa(const ComplexMatrix& rho, const model::SystemSpec& spec);

/// d rho/dt = -i[calH, rho] - calD[rho] on H_s (+) H_f, with the decay jump included.
ComplexMatrix rhs_enlarged(const ComplexMatrix& rho, const model::EnlargedModel& model);

/// Block form of the enlarged equation:
///   ss: -i[H, rho_ss] - 1/2 {B^dag B, rho_ss} - D_A[rho_ss]
///   sf: -i H rho_sf - 1/2 (B^dag B + sum A^dag A) rho_sf
///   fs: +i rho_fs H - 1/2 rho_fs (B^dag B + sum A^dag A)
///   ff: B rho_ss B^dag
BlockDensity rhs_blocks(const BlockDensity& blocks, const model::SystemSpec& spec,
                        const model::DecayOperator& decay);

/// Classical fixed-step RK4. Samples at t = 0, every `sample_stride` steps and
/// at t_max. Hermitian initial states are re-symmetrized after each step; if
/// the pre-symmetrization defect exceeds 1e-9 * max(1, ||rho||_F) the run
/// aborts with NumericalError.
Trajectory integrate_rk4(const Rhs& rhs, const ComplexMatrix& rho0, const IntegratorConfig& cfg);

/// Same sampling grid as integrate_rk4, stepping with expm(L * dt).
Trajectory integrate_exact(const model::Liouvillian& L, const ComplexMatrix& rho0,
                           const IntegratorConfig& cfg);

/// unvec(expm(L t) vec(rho0)).
ComplexMatrix propagate_exact(const model::Liouvillian& L, const ComplexMatrix& rho0, double t);

// Enlarged-space run from `rho0` (d_tot x d_tot) using cfg.method.
Trajectory evolve_enlarged(const model::EnlargedModel& model, const ComplexMatrix& rho0,
                           const IntegratorConfig& cfg);
// Non-hermitian run on H_s from `rho_ss0` using cfg.method.
Trajectory evolve_wwa(const model::SystemSpec& spec, const ComplexMatrix& rho_ss0,
                      const IntegratorConfig& cfg);

/// rho_ff(t) = B (int_0^t rho_ss) B^dagger with rho_ff(0) = 0, by the composite
/// trapezoid rule over the trajectory samples. Throws GridError unless the
/// sample spacing is uniform.
std::vector<ComplexMatrix> rho_ff_quadrature(const model::DecayOperator& decay, const Trajectory& traj);

/// d_s = d_f = 1, A = 0, rho(0) = diag(1, 0): rho(t) = diag(e^{-Gamma t}, 1 - e^{-Gamma t}).
/// The mass term drops out.
BlockDensity closed_form_1d(double m, double gamma, double t);

} // namespace opendecay::evolution
