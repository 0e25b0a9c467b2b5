#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <qram/dynamics.hpp>
#include <qram/frequency_domain.hpp>

using namespace qram;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double tol = 1e-9;

PulseSpec gaussian(double dt, double center = 0.0)
{
    PulseSpec p;
    p.duration = dt;
    p.center = center;
    return p;
}

std::pair<double, double> span_of(const PulseSpec& p, double pad)
{
    auto [a, b] = p.support();
    return {a - pad, b + pad};
}

/* sum_D eps(D) |alpha0(D)|^2 by adaptive quadrature */
double stored_oracle(const SystemParams& p, const PulseSpec& pulse)
{
    auto f = [&](double nu) { return spectral_efficiency(nu, p) * std::norm(pulse.spectrum(nu)); };
    const double b = pulse.bandwidth();
    double s = 0.0;
    for (double k : {-12.0, -4.0, 0.0, 4.0})
        s += gauss_kronrod<double, 61>::integrate(f, k * b, (k == 4.0 ? 12.0 : k == -12.0 ? -4.0 : k + 4.0) * b, 15, 1e-12);
    return s;
}

} // namespace

TEST(Storage, MatchesSpectralOracle)
{
    const auto p = with_branch(solve_matched_params(1.0, 30.0), control_branch::transfer);
    const auto ens = default_ensemble(p);
    for (double dt : {5.0, 20.0}) {
        const auto pulse = gaussian(dt);
        const auto tr = integrate_storage(p, ens, pulse, span_of(pulse, 5 * dt), tol);
        const double oracle = stored_oracle(p, pulse);
        EXPECT_NEAR(tr.storage_probability(), oracle, 0.01 * oracle) << dt;
        EXPECT_NEAR(storage_probability_spectral(p, pulse), oracle, 1e-6);
        EXPECT_LE(tr.max_ledger_deviation, 10 * tol);
        EXPECT_EQ(tr.param_hash, param_hash(p));
        EXPECT_EQ(tr.solver_tol, tol);
    }
}

TEST(Storage, EmptyCavityReflectsEverything)
{
    auto p = solve_matched_params(1.0, 0.0);
    p.f2 = 0;
    const auto ens = default_ensemble(p);
    const auto pulse = gaussian(5.0);
    const auto tr = integrate_storage(p, ens, pulse, span_of(pulse, 20), tol);
    EXPECT_NEAR(tr.output_probability(), 1.0, 1e-6);
    EXPECT_LT(tr.storage_probability(), 1e-12);
}

TEST(Storage, BlockadeReflectsWithAtomLoss)
{
    const auto p = with_branch(solve_matched_params(1.0, 30.0), control_branch::blockade);
    const auto ens = default_ensemble(p);
    const auto pulse = gaussian(20.0);
    const auto tr = integrate_storage(p, ens, pulse, span_of(pulse, 100), tol);
    const double r = 60.0 / 61.0;
    EXPECT_NEAR(tr.output_probability(), r * r, 0.02 * r * r);
    EXPECT_LE(tr.storage_probability(), 3e-4);
    EXPECT_GT(tr.probabilities.back().control_loss, 0.0);
    EXPECT_LE(tr.max_ledger_deviation, 10 * tol);
}

TEST(Storage, StrongerAtomBlocksMore)
{
    double last = 1.0;
    for (double c : {5.0, 10.0, 20.0, 40.0}) {
        const auto p = with_branch(solve_matched_params(1.0, c), control_branch::blockade);
        const auto pulse = gaussian(20.0);
        const auto tr = integrate_storage(p, default_ensemble(p), pulse, span_of(pulse, 100), tol);
        EXPECT_LT(tr.storage_probability(), last) << c;
        last = tr.storage_probability();
    }
}

TEST(Retrieval, LinearInTheStoredCoherence)
{
    const auto p = with_branch(solve_matched_params(1.0, 10.0), control_branch::transfer);
    const auto pulse = gaussian(10.0);
    const auto st = integrate_storage(p, default_ensemble(p), pulse, {-60, 50}, tol);
    const auto base = invert_detunings(st.final_ensemble);
    TraceOptions opt;
    opt.sample_interval = 0.5;
    const auto r1 = integrate_retrieval(p, base, {50, 160}, tol, opt);
    for (cplx c : {cplx(0, 1), cplx(0.5, 0)}) {
        auto scaled = base;
        for (auto& b : scaled.coherences)
            b *= c;
        const auto rc = integrate_retrieval(p, scaled, {50, 160}, tol, opt);
        ASSERT_EQ(rc.times.size(), r1.times.size());
        for (std::size_t k = 0; k < r1.times.size(); ++k)
            EXPECT_LT(std::abs(rc.alpha_out[k] - c * r1.alpha_out[k]), 1e-6);
        EXPECT_NEAR(rc.output_probability(), std::norm(c) * r1.output_probability(), 1e-7);
    }
}

TEST(Retrieval, RejectsEmptyEnsemble)
{
    const auto p = solve_matched_params(1.0, 10.0);
    EXPECT_THROW(integrate_retrieval(p, default_ensemble(p), {0, 10}, tol), invalid_parameter);
}

TEST(Integrator, Preconditions)
{
    const auto p = solve_matched_params(1.0, 10.0);
    const auto ens = default_ensemble(p);
    const auto pulse = gaussian(5.0);
    EXPECT_THROW(integrate_storage(p, ens, pulse, {-10, 10}, tol), invalid_parameter);
    EXPECT_THROW(integrate_storage(p, ens, pulse, span_of(pulse, 5), 1e-6), invalid_parameter);
    auto other = ens;
    other.collective_coupling *= 2;
    EXPECT_THROW(integrate_storage(p, other, pulse, span_of(pulse, 5), tol), invalid_parameter);
    EXPECT_THROW(run_echo_cycle(p, p, ens, gaussian(10.0), 40.0, tol), invalid_parameter);
}

TEST(Probe, MatchesClosedFormResponses)
{
    auto p = solve_matched_params(1.0, 5.0);
    p.delta_c = 0.4;
    p.f2 *= 1.3;
    for (double d : {0.0, 0.3}) {
        const auto r = transfer_function_probe(p, d);
        const cplx a1 = cavity1_response(d, p);
        EXPECT_LT(std::abs(r.cavity1_over_input - a1), 0.01 * std::abs(a1)) << d;
        const cplx a21 = cavity2_over_cavity1(d, p);
        EXPECT_LT(std::abs(r.cavity2_over_cavity1 - a21), 0.01 * std::abs(a21)) << d;
    }
}

TEST(Probe, MatchedCavityOneResponseIsUnity)
{
    const auto p = with_branch(solve_matched_params(1.0, 30.0), control_branch::transfer);
    const auto r = transfer_function_probe(p, 0.0);
    EXPECT_NEAR(std::abs(r.cavity1_over_input), 1.0, 0.01);
    EXPECT_NEAR(std::abs(r.output_over_input), 0.0, 0.01);
}

TEST(Probe, BlockadeReflection)
{
    const auto p = with_branch(solve_matched_params(1.0, 30.0), control_branch::blockade);
    const auto r = transfer_function_probe(p, 0.0);
    EXPECT_NEAR(std::abs(r.output_over_input), 60.0 / 61.0, 0.01);
    EXPECT_LT(std::abs(r.output_over_input - blockade_reflection(0.0, p)), 0.01);
}

TEST(Probe, UncoupledSecondCavity)
{
    auto p = solve_matched_params(1.0, 5.0);
    p.f2 = 0;
    const auto r = transfer_function_probe(p, 0.2);
    EXPECT_EQ(r.cavity2_over_cavity1, cplx(0.0));
}

TEST(Echo, TimeReversedRetrievalAndDephasing)
{
    const auto p = with_branch(solve_matched_params(1.0, 30.0), control_branch::transfer);
    const auto ens = default_ensemble(p);
    const auto pulse = gaussian(10.0);
    EchoOptions opt;
    opt.keep_traces = false;
    const auto r = run_echo_cycle(p, p, ens, pulse, 50.0, tol, opt);
    EXPECT_GE(r.fidelity_time_reversed, 0.99);
    EXPECT_LT(r.time_reversal_l2_error, 0.1);
    EXPECT_NEAR(r.echo_probability, echo_probability_spectral(p, p, pulse, 50.0), 0.02);

    auto q = p;
    q.t2 = 1e3; // tau / T2 = 0.05
    const auto rq = run_echo_cycle(q, q, default_ensemble(q), pulse, 50.0, tol, opt);
    EXPECT_NEAR(rq.echo_probability / r.echo_probability, std::exp(-0.2), 0.02);
    EXPECT_LT(rq.echo_probability, r.echo_probability);
}

TEST(Echo, BlockadeFlipsTheStoredPhase)
{
    const auto s = with_branch(solve_matched_params(1.0, 30.0), control_branch::transfer);
    const auto b = with_branch(solve_matched_params(1.0, 30.0), control_branch::blockade);
    const auto pulse = gaussian(20.0);
    const auto r = run_echo_cycle(s, b, default_ensemble(s), pulse, 120.0, tol);
    EXPECT_LT(r.echo_probability, 1e-3);
    const auto chk = blockade_phase_check(b, r.final_ensemble, r.ensemble_at_inversion);
    EXPECT_TRUE(chk.passed) << chk.phase << ' ' << chk.magnitude;
    EXPECT_LT(chk.phase_error, blockade_phase_tolerance);
}

TEST(PhaseCheck, SyntheticEnsembles)
{
    auto p = solve_matched_params(1.0, 10.0);
    p.t2 = 300;
    auto init = discretize_ensemble(64, p.delta_in, 20 * p.delta_in,
                                    discretization_scheme::quantile, p.collective_coupling());
    for (std::size_t j = 0; j < init.size(); ++j)
        init.coherences[j] = std::polar(1.0, 0.1 * double(j));
    init.time = 3.0;
    auto after = invert_detunings(init);
    after.time = 13.0;
    for (std::size_t j = 0; j < after.size(); ++j)
        after.coherences[j] *= -std::exp(-cplx(1 / p.t2, after.detunings[j]) * 10.0);
    const auto r = blockade_phase_check(p, after, init);
    EXPECT_TRUE(r.passed);
    EXPECT_NEAR(r.magnitude, 1.0, 1e-12);
    EXPECT_NEAR(r.phase_error, 0.0, 1e-12);

    auto same = after;
    for (auto& c : same.coherences)
        c = -c;
    EXPECT_FALSE(blockade_phase_check(p, same, init).passed);

    auto weak = init;
    for (auto& c : weak.coherences)
        c *= 0.5;
    EXPECT_THROW(blockade_phase_check(p, after, weak), invalid_parameter);
    auto wider = discretize_ensemble(64, p.delta_in, 30 * p.delta_in,
                                     discretization_scheme::quantile, p.collective_coupling());
    EXPECT_THROW(blockade_phase_check(p, wider, init), invalid_parameter);
}
