// analysis.cpp: Verification of computed dynamics

#include "opendecay/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "opendecay/errors.hpp"

namespace opendecay::analysis {

using linalg::Complex;

namespace {

constexpr Complex kI{0.0, 1.0};

void require_hermitian(const ComplexMatrix& m, double tol, const char* what)
{
    const double defect = linalg::hermiticity_defect(m);
    if (defect > tol * std::max(1.0, linalg::frobenius_norm(m))) {
        throw NotHermitianError(std::string(what) + ": sample is not hermitian (defect " +
                                std::to_string(defect) + ")");
    }
}

double min_eig_or_inf(const ComplexMatrix& m)
{
    if (m.rows() == 0) return std::numeric_limits<double>::infinity();
    return linalg::min_eigenvalue_hermitian(linalg::hermitian_part(m));
}

} // namespace

VerificationReport make_report(std::string name, double measured, double tolerance,
                               const evolution::Trajectory* traj)
{
    VerificationReport r;
    r.name = std::move(name);
    r.measured = measured;
    r.tolerance = tolerance;
    r.status = measured <= tolerance ? Status::pass : Status::fail;
    if (traj != nullptr && traj->size() > 0) {
        r.samples = traj->size();
        r.t_begin = traj->times.front();
        r.t_end = traj->times.back();
    }
    return r;
}

VerificationReport check_positivity(const evolution::Trajectory& traj, double tol)
{
    double lowest = std::numeric_limits<double>::infinity();
    std::size_t where = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const ComplexMatrix& rho = traj.states[i];
        require_hermitian(rho, 1e-9, "check_positivity");
        const auto blocks = traj.blocks(i);
        const double m = std::min({min_eig_or_inf(rho), min_eig_or_inf(blocks.rho_ss),
                                   min_eig_or_inf(blocks.rho_ff)});
        if (m < lowest) {
            lowest = m;
            where = i;
        }
    }
    if (traj.size() == 0) lowest = 0.0;
    auto report = make_report("positivity", -lowest, tol, &traj);
    if (traj.size() > 0) report.detail = "min eigenvalue at t = " + std::to_string(traj.times[where]);
    return report;
}

VerificationReport check_trace(const evolution::Trajectory& traj, double tol)
{
    double worst = 0.0;
    for (const auto& rho : traj.states) worst = std::max(worst, std::abs(linalg::trace(rho) - 1.0));
    return make_report("trace", worst, tol, &traj);
}

ChoiMatrix choi_matrix(const LinearMap& map_eval, std::size_t d, double t)
{
    if (d == 0) throw DimensionError("choi_matrix: dimension must be positive");

    auto unit = [d](std::size_t i, std::size_t j) {
        ComplexMatrix e(d, d);
        e(i, j) = 1.0;
        return e;
    };
    auto evaluate = [&](const ComplexMatrix& x) {
        ComplexMatrix y = map_eval(x);
        if (!y.is_square()) throw DimensionError("choi_matrix: map returned a non-square matrix");
        return y;
    };

    // images[i][j] = map(E_ij)
    std::vector<std::vector<ComplexMatrix>> images(d, std::vector<ComplexMatrix>(d));
    for (std::size_t i = 0; i < d; ++i) {
        images[i][i] = evaluate(unit(i, i));
        for (std::size_t j = i + 1; j < d; ++j) {
            const ComplexMatrix sym = 0.5 * (unit(i, j) + unit(j, i));
            const ComplexMatrix asym = (1.0 / (2.0 * kI)) * (unit(i, j) - unit(j, i));
            const ComplexMatrix s = evaluate(sym);
            const ComplexMatrix a = evaluate(asym);
            images[i][j] = s + kI * a;
            images[j][i] = s - kI * a;
        }
    }

    const std::size_t d_out = images[0][0].rows();
    ChoiMatrix choi;
    choi.d = d;
    choi.t = t;
    choi.C = ComplexMatrix(d * d_out, d * d_out);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (images[i][j].rows() != d_out) throw DimensionError("choi_matrix: inconsistent image shapes");
            choi.C.set_block(i * d_out, j * d_out, images[i][j]);
        }
    }
    return choi;
}

LinearMap enlarged_map(const model::EnlargedModel& model, double t, evolution::Method method, double dt)
{
    if (t < 0.0) throw ValidationError("enlarged_map: t must be non-negative");
    const std::size_t d = model.d_tot;
    if (method == evolution::Method::exact) {
        const auto L = model::assemble_liouvillian(model);
        const ComplexMatrix propagator = linalg::expm(t * L.L);
        return [propagator, d](const ComplexMatrix& rho0) {
            if (rho0.rows() != d || rho0.cols() != d) throw DimensionError("enlarged_map: wrong input shape");
            return linalg::unvec(propagator * linalg::vec(rho0), d, d);
        };
    }
    evolution::IntegratorConfig cfg;
    cfg.method = evolution::Method::rk4;
    cfg.t_max = t;
    cfg.dt = std::min(dt, t > 0.0 ? t : dt);
    cfg.sample_stride = std::max<std::size_t>(1, cfg.step_count());
    return [model, cfg](const ComplexMatrix& rho0) {
        const auto traj = evolution::integrate_rk4(
            [&](const ComplexMatrix& r) { return evolution::rhs_enlarged(r, model); }, rho0, cfg);
        return traj.states.back();
    };
}

LinearMap restricted_map(const model::EnlargedModel& model, double t, evolution::Method method, double dt)
{
    LinearMap full = enlarged_map(model, t, method, dt);
    const std::size_t d_s = model.d_s;
    const std::size_t d_f = model.d_f;
    return [full = std::move(full), d_s, d_f](const ComplexMatrix& rho_ss0) {
        return full(evolution::embed_system_state(rho_ss0, d_f)).block(0, 0, d_s, d_s);
    };
}

VerificationReport check_cp(const ChoiMatrix& choi, double tol)
{
    const double lowest = linalg::min_eigenvalue_hermitian(linalg::hermitian_part(choi.C));
    auto report = make_report("cp", -lowest, tol);
    report.t_begin = report.t_end = choi.t;
    report.samples = 1;
    return report;
}

double mixedness(const ComplexMatrix& rho)
{
    if (!rho.is_square()) throw DimensionError("mixedness: expected a square matrix");
    require_hermitian(rho, 1e-10, "mixedness");
    double sum = 0.0;
    // Tr(rho rho) = sum_ij rho_ij rho_ji = sum_ij |rho_ij|^2 for hermitian rho
    for (std::size_t i = 0; i < rho.rows(); ++i) {
        for (std::size_t j = 0; j < rho.cols(); ++j) sum += (rho(i, j) * rho(j, i)).real();
    }
    return sum;
}

AsymptoticMeasures measure_asymptotics(const evolution::Trajectory& traj,
                                       const model::GammaDecomposition& dec)
{
    if (dec.n0 != 0 || dec.gammas.empty()) {
        throw ValidationError("asymptotics: decay matrix is singular (n0 = " + std::to_string(dec.n0) + ")");
    }
    if (traj.size() == 0) throw ValidationError("asymptotics: empty trajectory");

    AsymptoticMeasures m;
    m.gamma0 = *std::min_element(dec.gammas.begin(), dec.gammas.end());
    const double tr0 = linalg::trace(traj.system_block(0)).real();
    m.bound_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double tr = linalg::trace(traj.system_block(i)).real();
        m.bound_excess = std::max(m.bound_excess, tr - tr0 * std::exp(-m.gamma0 * traj.times[i]));
    }

    const std::size_t last = traj.size() - 1;
    const auto blocks = traj.blocks(last);
    m.t_final = traj.times[last];
    m.rho_ss_norm = linalg::frobenius_norm(blocks.rho_ss);
    m.rho_sf_norm = linalg::frobenius_norm(blocks.rho_sf);
    m.trace_ff_error = std::abs(linalg::trace(blocks.rho_ff).real() - 1.0);
    m.horizon_reached = m.t_final * m.gamma0 >= kAsymptoticHorizon * (1.0 - 1e-12);
    return m;
}

VerificationReport asymptotics_check(const evolution::Trajectory& traj,
                                     const model::GammaDecomposition& dec,
                                     const model::SystemSpec& spec)
{
    if (dec.n0 != 0 || dec.gammas.empty() || spec.d_s != dec.phis.rows()) {
        VerificationReport r;
        r.name = "asymptotics";
        r.status = Status::not_applicable;
        r.tolerance = 1.0;
        r.detail = "decay matrix is singular (n0 = " + std::to_string(dec.n0) + ")";
        return r;
    }

    const auto m = measure_asymptotics(traj, dec);
    double worst = std::max(0.0, m.bound_excess) / kAsymptoticBoundSlack;
    worst = std::max(worst, m.rho_ss_norm / kAsymptoticLimitTolerance);
    worst = std::max(worst, m.rho_sf_norm / kAsymptoticLimitTolerance);
    worst = std::max(worst, m.trace_ff_error / kAsymptoticLimitTolerance);
    auto report = make_report("asymptotics", worst, 1.0, &traj);
    if (!m.horizon_reached) {
        report.status = Status::fail;
        report.detail = "trajectory ends before 20/gamma0 = " + std::to_string(kAsymptoticHorizon / m.gamma0);
    }
    return report;
}

KrausPair kraus_amplitude_damping(double gamma, double t)
{
    if (t < 0.0) throw ValidationError("kraus_amplitude_damping: t must be non-negative");
    KrausPair k;
    k.p = -std::expm1(-gamma * t);
    k.M0 = ComplexMatrix::diagonal({std::exp(-0.5 * gamma * t), 1.0});
    k.M1 = ComplexMatrix(2, 2);
    k.M1(1, 0) = std::sqrt(k.p);
    return k;
}

ComplexMatrix apply_kraus(const ComplexMatrix& rho0, const KrausPair& pair)
{
    if (rho0.rows() != pair.M0.cols() || rho0.cols() != pair.M0.cols()) {
        throw DimensionError("apply_kraus: state does not match Kraus operator dimension");
    }
    return pair.M0 * rho0 * linalg::adjoint(pair.M0) + pair.M1 * rho0 * linalg::adjoint(pair.M1);
}

} // namespace opendecay::analysis
