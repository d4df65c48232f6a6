#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "opendecay/errors.hpp"
#include "opendecay/evolution.hpp"
#include "opendecay/model.hpp"
#include "oracles.hpp"

using namespace opendecay;
using linalg::Complex;
using linalg::ComplexMatrix;
using oracle::fro_diff;

namespace {

model::SystemSpec one_dim(double m, double gamma)
{
    model::SystemSpec s;
    s.d_s = 1;
    s.d_f = 1;
    s.H = ComplexMatrix{{m}};
    s.Gamma = ComplexMatrix{{gamma}};
    return s;
}

model::EnlargedModel enlarge(const model::SystemSpec& spec)
{
    return model::embed_operators(spec, model::build_B(model::decompose_gamma(spec.Gamma), spec.d_f));
}

evolution::IntegratorConfig config(double t_max, double dt, std::size_t stride = 1,
                                   evolution::Method method = evolution::Method::rk4)
{
    evolution::IntegratorConfig cfg;
    cfg.t_max = t_max;
    cfg.dt = dt;
    cfg.sample_stride = stride;
    cfg.method = method;
    return cfg;
}

double max_distance(const evolution::Trajectory& a, const evolution::Trajectory& b)
{
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, fro_diff(a.states[i], b.states[i]));
    return worst;
}

} // namespace

TEST_CASE("IntegratorConfig")
{
    CHECK_NOTHROW(config(1.0, 1e-3).validate());
    CHECK_NOTHROW(config(0.0, 1e-3).validate());
    CHECK_THROWS_AS(config(1.0, 0.0).validate(), ValidationError);
    CHECK_THROWS_AS(config(-1.0, 1e-3).validate(), ValidationError);
    CHECK_THROWS_AS(config(1.0, 2.0).validate(), ValidationError);
    CHECK_THROWS_AS(config(1.0, 1e-3, 0).validate(), ValidationError);
    CHECK(config(1.0, 1e-3).step_count() == 1000);
    CHECK(config(1.0, 0.3).step_count() == 3);
    CHECK(config(1.0, 0.3).step() == doctest::Approx(1.0 / 3.0));
    CHECK(config(0.0, 1e-3).step_count() == 0);
}

TEST_CASE("block split and assembly")
{
    random::SplitMix64 rng(1);
    const ComplexMatrix rho = oracle::random_density(rng, 5);
    const auto blocks = evolution::split_blocks(rho, 2);
    CHECK(blocks.rho_ss.rows() == 2);
    CHECK(blocks.rho_sf.cols() == 3);
    CHECK(blocks.rho_fs.rows() == 3);
    CHECK(blocks.rho_ff.rows() == 3);
    CHECK(evolution::assemble_blocks(blocks) == rho);
    CHECK(blocks.total_trace() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(evolution::split_blocks(rho, 6), DimensionError);

    const ComplexMatrix embedded = evolution::embed_system_state(ComplexMatrix{{0.5, 0.1}, {0.1, 0.5}}, 2);
    CHECK(embedded.rows() == 4);
    CHECK(embedded.block(2, 0, 2, 2) == ComplexMatrix(2, 2));
}

TEST_CASE("right-hand sides")
{
    const double gamma = 0.8;
    const auto spec = one_dim(1.5, gamma);

    SUBCASE("rhs_wwa in one dimension")
    {
        const ComplexMatrix d = evolution::rhs_wwa(ComplexMatrix{{1.0}}, spec);
        CHECK(std::abs(d(0, 0) - Complex{-gamma}) <= 1e-15);
    }

    SUBCASE("stationary state of a hermitian system")
    {
        model::SystemSpec s;
        s.d_s = 2;
        s.d_f = 1;
        s.H = ComplexMatrix::diagonal({1.0, -1.0});
        s.Gamma = ComplexMatrix(2, 2);
        const ComplexMatrix rho = ComplexMatrix::diagonal({0.3, 0.7});
        CHECK(oracle::naive_fro(evolution::rhs_wwa(rho, s)) == 0.0);
    }

    SUBCASE("rhs_enlarged in one dimension")
    {
        const ComplexMatrix d = evolution::rhs_enlarged(ComplexMatrix::diagonal({1.0, 0.0}), enlarge(spec));
        CHECK(fro_diff(d, ComplexMatrix::diagonal({-gamma, gamma})) <= 1e-15);
    }

    SUBCASE("rhs_blocks")
    {
        const auto decay = model::build_B(model::decompose_gamma(spec.Gamma), 1);
        evolution::BlockDensity b;
        b.rho_ss = ComplexMatrix{{0.4}};
        b.rho_sf = ComplexMatrix(1, 1);
        b.rho_fs = ComplexMatrix(1, 1);
        b.rho_ff = ComplexMatrix{{0.6}};
        const auto d = evolution::rhs_blocks(b, spec, decay);
        CHECK(oracle::naive_fro(d.rho_sf) == 0.0);
        CHECK(oracle::naive_fro(d.rho_fs) == 0.0);
        CHECK(std::abs(d.rho_ff(0, 0) - gamma * 0.4) <= 1e-15);
        CHECK(std::abs(d.rho_ss(0, 0) + gamma * 0.4) <= 1e-15);
    }

    SUBCASE("block form agrees with the full enlarged equation")
    {
        random::SplitMix64 rng(2);
        for (const auto& m : corpus::build(25)) {
            const ComplexMatrix rho = oracle::random_density(rng, m.model.d_tot);
            const auto blocks = evolution::rhs_blocks(evolution::split_blocks(rho, m.spec.d_s), m.spec, m.decay);
            CHECK(fro_diff(evolution::assemble_blocks(blocks), evolution::rhs_enlarged(rho, m.model)) <= 1e-12);
        }
    }

    SUBCASE("system block of the enlarged equation is the non-hermitian equation")
    {
        random::SplitMix64 rng(3);
        for (const auto& m : corpus::build(25)) {
            const ComplexMatrix rho_ss = oracle::random_density(rng, m.spec.d_s);
            const ComplexMatrix full = evolution::rhs_enlarged(evolution::embed_system_state(rho_ss, m.spec.d_f), m.model);
            CHECK(fro_diff(full.block(0, 0, m.spec.d_s, m.spec.d_s), evolution::rhs_wwa(rho_ss, m.spec)) <= 1e-12);
        }
    }
}

TEST_CASE("integrate_rk4")
{
    SUBCASE("half-life in one dimension")
    {
        const double t = std::log(2.0);
        const auto traj = evolution::evolve_enlarged(enlarge(one_dim(1.0, 1.0)), ComplexMatrix::diagonal({1.0, 0.0}),
                                                     config(t, 1e-3));
        CHECK(std::abs(traj.states.back()(0, 0) - 0.5) <= 1e-9);
        CHECK(std::abs(traj.states.back()(1, 1) - 0.5) <= 1e-9);
        CHECK(traj.times.back() == doctest::Approx(t).epsilon(1e-15));
    }

    SUBCASE("zero generator keeps the state")
    {
        random::SplitMix64 rng(4);
        const ComplexMatrix rho0 = oracle::random_density(rng, 3);
        const auto traj = evolution::integrate_rk4(
            [](const ComplexMatrix& r) { return ComplexMatrix(r.rows(), r.cols()); }, rho0, config(1.0, 0.1));
        CHECK(traj.size() == 11);
        for (const auto& s : traj.states) CHECK(s == rho0);
    }

    SUBCASE("sampling grid")
    {
        const auto zero = [](const ComplexMatrix& r) { return ComplexMatrix(r.rows(), r.cols()); };
        const auto traj = evolution::integrate_rk4(zero, ComplexMatrix::identity(1), config(1.0, 0.1, 3));
        // steps 0, 3, 6, 9 and the final step 10
        REQUIRE(traj.size() == 5);
        CHECK(traj.times[0] == 0.0);
        CHECK(traj.times[3] == doctest::Approx(0.9));
        CHECK(traj.times[4] == doctest::Approx(1.0));

        const auto single = evolution::integrate_rk4(zero, ComplexMatrix::identity(1), config(0.0, 0.1));
        CHECK(single.size() == 1);
    }

    SUBCASE("agrees with the exact propagator on a 4-dimensional model")
    {
        random::RandomModelParams p;
        p.seed = 17;
        p.d_s = 2;
        p.n_lindblad = 1;
        const auto spec = random::random_model(p);
        REQUIRE(spec.d_s + spec.d_f == 4);
        const auto model = enlarge(spec);
        random::SplitMix64 rng(5);
        const ComplexMatrix rho0 = evolution::embed_system_state(oracle::random_density(rng, 2), spec.d_f);
        const auto rk = evolution::evolve_enlarged(model, rho0, config(1.0, 1e-3, 10));
        const auto ex = evolution::evolve_enlarged(model, rho0, config(1.0, 1e-3, 10, evolution::Method::exact));
        CHECK(max_distance(rk, ex) <= 1e-8);
    }

    SUBCASE("hermiticity drift is detected")
    {
        const auto skew = [](const ComplexMatrix& r) {
            ComplexMatrix d(r.rows(), r.cols());
            d(0, 1) = 1.0;
            return d;
        };
        CHECK_THROWS_AS(evolution::integrate_rk4(skew, ComplexMatrix::identity(2), config(1.0, 0.1)), NumericalError);
    }

    SUBCASE("divergence is reported")
    {
        const auto blowup = [](const ComplexMatrix& r) { return 1e300 * r; };
        CHECK_THROWS_AS(evolution::integrate_rk4(blowup, ComplexMatrix::identity(1), config(1.0, 0.1)), NumericalError);
    }
}

TEST_CASE("propagate_exact and closed form")
{
    const double gamma = 1.0;
    const auto L = model::assemble_liouvillian(enlarge(one_dim(1.0, gamma)));
    const ComplexMatrix rho0 = ComplexMatrix::diagonal({1.0, 0.0});
    CHECK(evolution::propagate_exact(L, rho0, 0.0) == rho0);

    for (double t : {0.1, 0.5, std::log(2.0), 1.0, 3.0, 10.0}) {
        const ComplexMatrix r = evolution::propagate_exact(L, rho0, t);
        const auto cf = evolution::closed_form_1d(1.0, gamma, t);
        CHECK(std::abs(r(0, 0) - std::exp(-t)) <= 1e-12);
        CHECK(std::abs(r(1, 1) - (1.0 - std::exp(-t))) <= 1e-12);
        CHECK(std::abs(r(0, 0) - cf.rho_ss(0, 0)) <= 1e-12);
        CHECK(std::abs(r(1, 1) - cf.rho_ff(0, 0)) <= 1e-12);
    }

    SUBCASE("semigroup property")
    {
        random::SplitMix64 rng(6);
        for (const auto& m : corpus::build(10)) {
            const auto Lm = model::assemble_liouvillian(m.model);
            const ComplexMatrix a = evolution::propagate_exact(Lm, evolution::propagate_exact(Lm, m.rho0, 0.7), 1.1);
            CHECK(fro_diff(a, evolution::propagate_exact(Lm, m.rho0, 1.8)) <= 1e-12);
        }
    }

    SUBCASE("closed form values")
    {
        const auto start = evolution::closed_form_1d(2.0, 1.0, 0.0);
        CHECK(start.rho_ss(0, 0) == Complex{1.0});
        CHECK(start.rho_ff(0, 0) == Complex{0.0});
        const auto late = evolution::closed_form_1d(2.0, 0.5, 50.0 / 0.5);
        CHECK(std::abs(late.rho_ss(0, 0)) <= 1e-10);
        CHECK(std::abs(late.rho_ff(0, 0) - 1.0) <= 1e-10);
        const auto half = evolution::closed_form_1d(2.0, 1.0, std::log(2.0));
        CHECK(std::abs(half.rho_ss(0, 0) - 0.5) <= 1e-15);
        CHECK(std::abs(half.rho_ff(0, 0) - 0.5) <= 1e-15);
        CHECK(oracle::naive_fro(half.rho_sf) == 0.0);
    }
}

TEST_CASE("rho_ff quadrature")
{
    SUBCASE("one-dimensional decay")
    {
        const auto spec = one_dim(1.0, 1.0);
        const auto decay = model::build_B(model::decompose_gamma(spec.Gamma), 1);
        const auto traj = evolution::evolve_wwa(spec, ComplexMatrix{{1.0}}, config(10.0, 1e-3));
        const auto ff = evolution::rho_ff_quadrature(decay, traj);
        REQUIRE(ff.size() == traj.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < ff.size(); ++i) {
            worst = std::max(worst, std::abs(ff[i](0, 0) - (1.0 - std::exp(-traj.times[i]))));
        }
        CHECK(worst <= 1e-6);
    }

    SUBCASE("vanishing system block")
    {
        const auto spec = one_dim(1.0, 1.0);
        const auto decay = model::build_B(model::decompose_gamma(spec.Gamma), 1);
        evolution::Trajectory traj;
        traj.d_s = 1;
        for (int i = 0; i < 5; ++i) {
            traj.times.push_back(0.1 * i);
            traj.states.push_back(ComplexMatrix(1, 1));
        }
        for (const auto& m : evolution::rho_ff_quadrature(decay, traj)) CHECK(m == ComplexMatrix(1, 1));
    }

    SUBCASE("non-uniform grid")
    {
        const auto decay = model::build_B(model::decompose_gamma(ComplexMatrix{{1.0}}), 1);
        evolution::Trajectory traj;
        traj.d_s = 1;
        for (double t : {0.0, 0.1, 0.3}) {
            traj.times.push_back(t);
            traj.states.push_back(ComplexMatrix{{1.0}});
        }
        CHECK_THROWS_AS(evolution::rho_ff_quadrature(decay, traj), GridError);
    }

    SUBCASE("agrees with the integrated decay block across the corpus")
    {
        for (const auto& m : corpus::build(25)) {
            const auto traj = evolution::evolve_enlarged(m.model, m.rho0, config(5.0, 1e-3));
            const auto ff = evolution::rho_ff_quadrature(m.decay, traj);
            double worst = 0.0;
            for (std::size_t i = 0; i < traj.size(); ++i) worst = std::max(worst, fro_diff(ff[i], traj.blocks(i).rho_ff));
            CHECK(worst <= 1e-6);
        }
    }
}

TEST_CASE("trajectory invariants across the corpus")
{
    for (const auto& m : corpus::build(25)) {
        CAPTURE(m.seed);
        const auto traj = evolution::evolve_enlarged(m.model, m.rho0, config(5.0, 1e-3, 10));
        double worst_sf = 0.0;
        double worst_herm = 0.0;
        double worst_trace = 0.0;
        double worst_rise = 0.0;
        double prev = linalg::trace(traj.system_block(0)).real();
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const auto b = traj.blocks(i);
            worst_sf = std::max(worst_sf, oracle::naive_fro(b.rho_sf));
            worst_herm = std::max(worst_herm, fro_diff(traj.states[i], oracle::naive_dagger(traj.states[i])));
            worst_trace = std::max(worst_trace, std::abs(linalg::trace(traj.states[i]) - 1.0));
            const double tr = linalg::trace(b.rho_ss).real();
            worst_rise = std::max(worst_rise, tr - prev);
            prev = tr;
        }
        CHECK(worst_sf <= 1e-10);
        CHECK(worst_herm <= 1e-10);
        CHECK(worst_trace <= 1e-8);
        CHECK(worst_rise <= 1e-10);
    }
}

TEST_CASE("equivalence of the enlarged and non-hermitian evolutions")
{
    for (const auto& m : corpus::build(25)) {
        const auto big = evolution::evolve_enlarged(m.model, m.rho0, config(5.0, 1e-3, 50));
        const auto small = evolution::evolve_wwa(m.spec, m.rho_ss0, config(5.0, 1e-3, 50));
        REQUIRE(big.size() == small.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < big.size(); ++i) worst = std::max(worst, fro_diff(big.system_block(i), small.states[i]));
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("rk4 converges at fourth order")
{
    for (const auto& m : corpus::build(6)) {
        CAPTURE(m.seed);
        const auto exact = evolution::evolve_enlarged(m.model, m.rho0, config(1.0, 0.05, 1, evolution::Method::exact));
        const auto coarse = evolution::evolve_enlarged(m.model, m.rho0, config(1.0, 0.05));
        const auto fine = evolution::evolve_enlarged(m.model, m.rho0, config(1.0, 0.025, 2));
        const double e1 = max_distance(coarse, exact);
        const double e2 = max_distance(fine, exact);
        CHECK(e1 / e2 >= 15.0);
    }
}

TEST_CASE("step recommendation")
{
    const auto L = model::assemble_liouvillian(enlarge(one_dim(1.0, 1.0)));
    const double scale = evolution::generator_scale(L);
    CHECK(scale > 0.0);
    CHECK(evolution::step_within_recommendation(config(1.0, 0.05 / scale), scale));
    CHECK_FALSE(evolution::step_within_recommendation(config(10.0, 1.0 / scale), scale));
}
