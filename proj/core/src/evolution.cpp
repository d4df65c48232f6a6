// evolution.cpp: Master-equation right-hand sides and integrators

#include "opendecay/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opendecay/errors.hpp"

namespace opendecay::evolution {

using linalg::Complex;
using linalg::adjoint;

namespace {

constexpr Complex kI{0.0, 1.0};

void require_dim(const ComplexMatrix& rho, std::size_t d, const char* what)
{
    if (rho.rows() != d || rho.cols() != d) {
        throw DimensionError(std::string(what) + ": state has shape " + std::to_string(rho.rows()) +
                             "x" + std::to_string(rho.cols()) + ", expected " + std::to_string(d) +
                             "x" + std::to_string(d));
    }
}

// sum_j A_j^dag A_j, zero when there are no jump operators.
ComplexMatrix jump_gram(const std::vector<ComplexMatrix>& ops, std::size_t d)
{
    ComplexMatrix sum(d, d);
    for (const auto& a : ops) sum += adjoint(a) * a;
    return sum;
}

// 1/2 sum_K (K^dag K rho + rho K^dag K - 2 K rho K^dag)
ComplexMatrix dissipator(const ComplexMatrix& rho, const std::vector<ComplexMatrix>& ops)
{
    ComplexMatrix out(rho.rows(), rho.cols());
    for (const auto& k : ops) {
        const ComplexMatrix kd = adjoint(k);
        const ComplexMatrix kdk = kd * k;
        out += 0.5 * (kdk * rho + rho * kdk);
        out -= k * rho * kd;
    }
    return out;
}

std::vector<std::size_t> sample_steps(const IntegratorConfig& cfg)
{
    const std::size_t n = cfg.step_count();
    std::vector<std::size_t> steps;
    for (std::size_t k = 0; k <= n; k += cfg.sample_stride) steps.push_back(k);
    if (steps.back() != n) steps.push_back(n);
    return steps;
}

bool is_hermitian_start(const ComplexMatrix& rho)
{
    return linalg::hermiticity_defect(rho) <= 1e-12 * std::max(1.0, linalg::frobenius_norm(rho));
}

} // namespace

double BlockDensity::total_trace() const
{
    return linalg::trace(rho_ss).real() + linalg::trace(rho_ff).real();
}

BlockDensity split_blocks(const ComplexMatrix& rho, std::size_t d_s)
{
    if (!rho.is_square() || d_s > rho.rows()) {
        throw DimensionError("split_blocks: system block larger than state");
    }
    const std::size_t d_f = rho.rows() - d_s;
    return {rho.block(0, 0, d_s, d_s), rho.block(0, d_s, d_s, d_f), rho.block(d_s, 0, d_f, d_s),
            rho.block(d_s, d_s, d_f, d_f)};
}

ComplexMatrix assemble_blocks(const BlockDensity& b)
{
    const std::size_t d_s = b.rho_ss.rows();
    const std::size_t d_f = b.rho_ff.rows();
    if (!b.rho_ss.is_square() || !b.rho_ff.is_square() || b.rho_sf.rows() != d_s ||
        b.rho_sf.cols() != d_f || b.rho_fs.rows() != d_f || b.rho_fs.cols() != d_s) {
        throw DimensionError("assemble_blocks: inconsistent block shapes");
    }
    ComplexMatrix rho(d_s + d_f, d_s + d_f);
    rho.set_block(0, 0, b.rho_ss);
    rho.set_block(0, d_s, b.rho_sf);
    rho.set_block(d_s, 0, b.rho_fs);
    rho.set_block(d_s, d_s, b.rho_ff);
    return rho;
}

ComplexMatrix embed_system_state(const ComplexMatrix& rho_ss, std::size_t d_f)
{
    if (!rho_ss.is_square()) throw DimensionError("embed_system_state: rho_ss must be square");
    ComplexMatrix rho(rho_ss.rows() + d_f, rho_ss.rows() + d_f);
    rho.set_block(0, 0, rho_ss);
    return rho;
}

ComplexMatrix Trajectory::system_block(std::size_t i) const
{
    return states.at(i).block(0, 0, d_s, d_s);
}

void IntegratorConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be a positive finite number");
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be finite and >= 0");
    if (t_max > 0.0 && dt > t_max) throw ValidationError("dt must not exceed t_max");
    if (sample_stride == 0) throw ValidationError("sample_stride must be positive");
}

std::size_t IntegratorConfig::step_count() const
{
    if (t_max == 0.0) return 0;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t_max / dt)));
}

double IntegratorConfig::step() const
{
    const std::size_t n = step_count();
    return n == 0 ? 0.0 : t_max / static_cast<double>(n);
}

double generator_scale(const model::Liouvillian& L)
{
    return linalg::inf_norm(L.L);
}

bool step_within_recommendation(const IntegratorConfig& cfg, double scale)
{
    return cfg.method != Method::rk4 || cfg.dt * scale <= 0.1;
}

ComplexMatrix rhs_wwa(const ComplexMatrix& rho, const model::SystemSpec& spec)
{
    require_dim(rho, spec.d_s, "rhs_wwa");
    const ComplexMatrix heff = model::effective_hamiltonian(spec);
    ComplexMatrix out = (-kI) * (heff * rho) + kI * (rho * adjoint(heff));
    out -= dissipator(rho, spec.lindblad);
    return out;
}

ComplexMatrix rhs_enlarged(const ComplexMatrix& rho, const model::EnlargedModel& model)
{
    require_dim(rho, model.d_tot, "rhs_enlarged");
    ComplexMatrix out = (-kI) * (model.calH * rho - rho * model.calH);
    out -= dissipator(rho, model.calA);
    const ComplexMatrix bd = adjoint(model.calB);
    const ComplexMatrix bdb = bd * model.calB;
    out -= 0.5 * (bdb * rho + rho * bdb);
    out += model.calB * rho * bd;
    return out;
}

BlockDensity rhs_blocks(const BlockDensity& b, const model::SystemSpec& spec,
                        const model::DecayOperator& decay)
{
    const std::size_t d_s = spec.d_s;
    const std::size_t d_f = spec.d_f;
    require_dim(b.rho_ss, d_s, "rhs_blocks (rho_ss)");
    require_dim(b.rho_ff, d_f, "rhs_blocks (rho_ff)");
    if (b.rho_sf.rows() != d_s || b.rho_sf.cols() != d_f || b.rho_fs.rows() != d_f ||
        b.rho_fs.cols() != d_s) {
        throw DimensionError("rhs_blocks: off-diagonal blocks have inconsistent shapes");
    }
    if (decay.B.rows() != d_f || decay.B.cols() != d_s) {
        throw DimensionError("rhs_blocks: decay operator has the wrong shape");
    }

    const ComplexMatrix& H = spec.H;
    const ComplexMatrix& B = decay.B;
    const ComplexMatrix bdb = adjoint(B) * B;
    const ComplexMatrix damping = bdb + jump_gram(spec.lindblad, d_s);

    BlockDensity d;
    d.rho_ss = (-kI) * (H * b.rho_ss - b.rho_ss * H) - 0.5 * (bdb * b.rho_ss + b.rho_ss * bdb) -
               dissipator(b.rho_ss, spec.lindblad);
    d.rho_sf = (-kI) * (H * b.rho_sf) - 0.5 * (damping * b.rho_sf);
    d.rho_fs = kI * (b.rho_fs * H) - 0.5 * (b.rho_fs * damping);
    d.rho_ff = B * b.rho_ss * adjoint(B);
    return d;
}

Trajectory integrate_rk4(const Rhs& rhs, const ComplexMatrix& rho0, const IntegratorConfig& cfg)
{
    cfg.validate();
    linalg::require_finite(rho0, "integrate_rk4 initial state");
    const std::size_t n = cfg.step_count();
    const double h = cfg.step();
    const bool symmetrize = rho0.is_square() && is_hermitian_start(rho0);

    Trajectory traj;
    traj.d_s = rho0.rows();
    const auto samples = sample_steps(cfg);
    traj.times.reserve(samples.size());
    traj.states.reserve(samples.size());

    ComplexMatrix rho = rho0;
    std::size_t next = 0;
    for (std::size_t k = 0;; ++k) {
        if (next < samples.size() && samples[next] == k) {
            traj.times.push_back(static_cast<double>(k) * h);
            traj.states.push_back(rho);
            ++next;
        }
        if (k == n) break;

        const ComplexMatrix k1 = rhs(rho);
        const ComplexMatrix k2 = rhs(rho + (0.5 * h) * k1);
        const ComplexMatrix k3 = rhs(rho + (0.5 * h) * k2);
        const ComplexMatrix k4 = rhs(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (!linalg::all_finite(rho)) {
            throw NumericalError("integrate_rk4: state diverged at t = " +
                                 std::to_string(static_cast<double>(k + 1) * h));
        }
        if (symmetrize) {
            const double drift = linalg::hermiticity_defect(rho);
            if (drift > 1e-9 * std::max(1.0, linalg::frobenius_norm(rho))) {
                throw NumericalError("integrate_rk4: hermiticity drift " + std::to_string(drift) +
                                     " in a single step");
            }
            rho = linalg::hermitian_part(rho);
        }
    }
    return traj;
}

Trajectory integrate_exact(const model::Liouvillian& L, const ComplexMatrix& rho0,
                           const IntegratorConfig& cfg)
{
    cfg.validate();
    require_dim(rho0, L.d, "integrate_exact");
    linalg::require_finite(rho0, "integrate_exact initial state");
    const std::size_t n = cfg.step_count();
    const double h = cfg.step();
    const ComplexMatrix step = linalg::expm(h * L.L);

    Trajectory traj;
    traj.d_s = rho0.rows();
    const auto samples = sample_steps(cfg);
    ComplexMatrix v = linalg::vec(rho0);
    std::size_t next = 0;
    for (std::size_t k = 0;; ++k) {
        if (next < samples.size() && samples[next] == k) {
            traj.times.push_back(static_cast<double>(k) * h);
            traj.states.push_back(linalg::unvec(v, L.d, L.d));
            ++next;
        }
        if (k == n) break;
        v = step * v;
    }
    return traj;
}

ComplexMatrix propagate_exact(const model::Liouvillian& L, const ComplexMatrix& rho0, double t)
{
    require_dim(rho0, L.d, "propagate_exact");
    if (t < 0.0) throw ValidationError("propagate_exact: t must be non-negative");
    if (t == 0.0) return rho0;
    return linalg::unvec(linalg::expm(t * L.L) * linalg::vec(rho0), L.d, L.d);
}

Trajectory evolve_enlarged(const model::EnlargedModel& model, const ComplexMatrix& rho0,
                           const IntegratorConfig& cfg)
{
    require_dim(rho0, model.d_tot, "evolve_enlarged");
    Trajectory traj = cfg.method == Method::exact
                          ? integrate_exact(model::assemble_liouvillian(model), rho0, cfg)
                          : integrate_rk4([&](const ComplexMatrix& r) { return rhs_enlarged(r, model); },
                                          rho0, cfg);
    traj.d_s = model.d_s;
    return traj;
}

Trajectory evolve_wwa(const model::SystemSpec& spec, const ComplexMatrix& rho_ss0,
                      const IntegratorConfig& cfg)
{
    require_dim(rho_ss0, spec.d_s, "evolve_wwa");
    if (cfg.method == Method::exact) {
        return integrate_exact(model::assemble_liouvillian_wwa(spec), rho_ss0, cfg);
    }
    return integrate_rk4([&](const ComplexMatrix& r) { return rhs_wwa(r, spec); }, rho_ss0, cfg);
}

std::vector<ComplexMatrix> rho_ff_quadrature(const model::DecayOperator& decay, const Trajectory& traj)
{
    std::vector<ComplexMatrix> out;
    if (traj.size() == 0) return out;
    if (traj.size() != traj.states.size()) throw DimensionError("rho_ff_quadrature: malformed trajectory");

    if (traj.size() > 2) {
        const double h0 = traj.times[1] - traj.times[0];
        for (std::size_t i = 2; i < traj.size(); ++i) {
            const double hi = traj.times[i] - traj.times[i - 1];
            if (std::abs(hi - h0) > 1e-9 * std::max(h0, 1e-300)) {
                throw GridError("rho_ff_quadrature: sample spacing is not uniform (" +
                                std::to_string(h0) + " vs " + std::to_string(hi) + ")");
            }
        }
    }

    const ComplexMatrix& B = decay.B;
    const ComplexMatrix bd = adjoint(B);
    ComplexMatrix previous = B * traj.system_block(0) * bd;
    ComplexMatrix acc(B.rows(), B.rows());
    out.push_back(acc);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const ComplexMatrix current = B * traj.system_block(i) * bd;
        const double h = traj.times[i] - traj.times[i - 1];
        acc += (0.5 * h) * (previous + current);
        out.push_back(acc);
        previous = current;
    }
    return out;
}

BlockDensity closed_form_1d(double /*m*/, double gamma, double t)
{
    if (t < 0.0) throw ValidationError("closed_form_1d: t must be non-negative");
    const double survival = std::exp(-gamma * t);
    BlockDensity b;
    b.rho_ss = ComplexMatrix{{survival}};
    b.rho_sf = ComplexMatrix(1, 1);
    b.rho_fs = ComplexMatrix(1, 1);
    b.rho_ff = ComplexMatrix{{-std::expm1(-gamma * t)}};
    return b;
}

} // namespace opendecay::evolution
