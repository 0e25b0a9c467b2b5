#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <qram/io.hpp>
#include <qram/spectral.hpp>

using namespace qram;
using boost::math::quadrature::gauss_kronrod;

namespace {

/* int f over [a, b] split at the given interior points */
template <class F>
double integrate_split(F f, std::vector<double> cuts)
{
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        s += gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 12, 1e-11);
    return s;
}

/* defining integral of the form factor at a small but finite epsilon */
cplx form_factor_oracle(double delta, double delta_in, double eps)
{
    auto g = [&](double v) { return delta_in / (pi * (v * v + delta_in * delta_in)); };
    auto re = [&](double v) {
        const double x = v - delta;
        return g(v) * eps / (eps * eps + x * x);
    };
    auto im = [&](double v) {
        const double x = v - delta;
        return -g(v) * x / (eps * eps + x * x);
    };
    std::vector<double> cuts = {-1e7, -1e4, -1e2};
    for (double k : {-1.0, -1e-2, -1e-4, -1e-6, -1e-7, 0.0, 1e-7, 1e-6, 1e-4, 1e-2, 1.0})
        cuts.push_back(delta + k);
    for (double c : {1e2, 1e4, 1e7})
        cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    return {integrate_split(re, cuts), integrate_split(im, cuts)};
}

/* storage transfer written out term by term */
cplx transfer_oracle(double d, const SystemParams& p)
{
    const cplx gt = form_factor_oracle(d, p.delta_in, 1e-7);
    const cplx ens = p.n_atoms * p.g2 * p.g2 * gt - cplx(0, 1) * d;
    const cplx atom = cplx(0, 1) * p.g1 * p.g1 / cplx(d - p.delta_c, p.gamma / 2);
    const cplx cav = p.kappa / 2 + atom - cplx(0, 1) * d;
    return p.f2 * p.f2 / (ens * cav + p.f2 * p.f2);
}

SystemParams random_params(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SystemParams p;
    p.gamma = 0.05 + 3 * u(rng);
    p.g1 = 5 * u(rng);
    p.n_atoms = 1e4;
    p.g2 = std::sqrt((0.01 + 2 * u(rng)) / p.n_atoms);
    p.f2 = 0.01 + 2 * u(rng);
    p.delta_in = 0.05 + 3 * u(rng);
    p.delta_c = 4 * (u(rng) - 0.5);
    return p;
}

} // namespace

TEST(Lineshape, PointValues)
{
    EXPECT_DOUBLE_EQ(lorentzian_lineshape(0.0, 1.0), 1 / pi);
    EXPECT_DOUBLE_EQ(lorentzian_lineshape(0.7, 0.7), 1 / (2 * pi * 0.7));
    EXPECT_THROW(lorentzian_lineshape(0.0, 0.0), invalid_parameter);
}

TEST(Lineshape, NormalizedByQuadrature)
{
    const double d = 0.5;
    const double s = integrate_split([&](double v) { return lorentzian_lineshape(v, d); },
                                     {-1e3 * d, -10 * d, 0, 10 * d, 1e3 * d});
    EXPECT_NEAR(s, 1.0, 1e-3);
}

TEST(FormFactor, ClosedFormAgreesWithDefiningIntegral)
{
    for (double din : {0.3, 1.0}) {
        for (double d : {0.0, 0.2, -0.9, 2.5, 30.0}) {
            const cplx oracle = form_factor_oracle(d, din, 1e-7);
            const cplx closed = broadened_response(d, din);
            EXPECT_LT(std::abs(oracle - closed), 1e-5 * std::abs(closed)) << d;
        }
    }
    EXPECT_NEAR(std::abs(form_factor_oracle(0.0, 0.5, 1e-7) - 2.0), 0.0, 1e-5);
}

TEST(FormFactor, LibraryQuadratureMatchesClosedForm)
{
    for (double d : {0.0, 0.4, -1.3, 8.0})
        EXPECT_LT(std::abs(broadened_response_quadrature(d, 0.5) - broadened_response(d, 0.5)),
                  1e-8);
}

TEST(FormFactor, SymmetryAndFarTail)
{
    const double din = 0.5;
    for (double d : {0.1, 1.0, 7.0})
        EXPECT_EQ(broadened_response(-d, din), std::conj(broadened_response(d, din)));
    const double far = 100 * din;
    EXPECT_NEAR(std::abs(broadened_response(far, din)) * far, 1.0, 0.02);
    EXPECT_NEAR(std::abs(form_factor_oracle(far, din, 1e-7)) * far, 1.0, 0.02);
}

TEST(Transfer, MatchesTermByTermOracle)
{
    std::mt19937 rng(11);
    for (int i = 0; i < 20; ++i) {
        const auto p = random_params(rng);
        for (double d : {-1.1, 0.0, 0.3, 2.0}) {
            const cplx f = storage_transfer(d, p);
            EXPECT_LT(std::abs(f - transfer_oracle(d, p)), 1e-5 * (1 + std::abs(f)));
        }
    }
}

TEST(Transfer, UncoupledCavitiesGiveZero)
{
    auto p = solve_matched_params(1.0, 5.0);
    p.f2 = 0;
    EXPECT_EQ(storage_transfer(0.2, p), cplx(0.0));
    EXPECT_EQ(cavity2_over_cavity1(0.2, p), cplx(0.0));
    EXPECT_THROW(spectral_efficiency(0.0, p), invalid_parameter);
}

TEST(Transfer, ConjugateSymmetryAtResonantAtom)
{
    std::mt19937 rng(3);
    for (int i = 0; i < 10; ++i) {
        auto p = random_params(rng);
        p.delta_c = 0;
        for (double d : {0.05, 0.7, 3.0}) {
            const cplx a = storage_transfer(-d, p), b = std::conj(storage_transfer(d, p));
            EXPECT_LT(std::abs(a - b), 1e-14 * (1 + std::abs(a)));
        }
    }
}

TEST(Efficiency, MatchedDecoupledIsIdeal)
{
    const auto p = with_branch(solve_matched_params(1.0, 30.0), control_branch::transfer);
    EXPECT_NEAR(spectral_efficiency(0.0, p), 1.0, 1e-9);
    EXPECT_NEAR(std::norm(storage_transfer(0.0, p)) * 2 * pi * p.kappa *
                    p.collective_coupling() / (p.f2 * p.f2) / (pi * p.delta_in),
                1.0, 1e-9);
    EXPECT_LT(spectral_efficiency(5.0, p), 1e-2);
}

TEST(Efficiency, OvercoupledMolecule)
{
    auto p = with_branch(solve_matched_params(1.0, 0.0), control_branch::transfer);
    p.f2 *= 2; // C_pm = 4
    EXPECT_NEAR(cooperativities(p).c_pm, 4.0, 1e-12);
    EXPECT_NEAR(spectral_efficiency(0.0, p), 0.64, 1e-12);
    EXPECT_NEAR(resonant_efficiency(p), 0.64, 1e-12);
}

TEST(Efficiency, ResonantFormulaEqualsLineCenterOfSpectrum)
{
    std::mt19937 rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_params(rng);
        EXPECT_NEAR(resonant_efficiency(p), spectral_efficiency(0.0, p),
                    1e-9 * spectral_efficiency(0.0, p));
    }
}

TEST(Efficiency, BranchLimits)
{
    std::mt19937 rng(9);
    for (int i = 0; i < 50; ++i) {
        auto p = random_params(rng);
        const double cpm = cooperativities(p).c_pm;
        const double c = cooperativities(p).c_atom;
        EXPECT_NEAR(resonant_efficiency(with_branch(p, control_branch::transfer)),
                    4 * cpm / ((1 + cpm) * (1 + cpm)), 1e-9);
        EXPECT_NEAR(resonant_efficiency(with_branch(p, control_branch::blockade)),
                    4 * cpm / std::pow(1 + cpm + 4 * c, 2), 1e-9);
        /* a far-detuned atom approaches the decoupled value */
        p.delta_c = 1e7;
        EXPECT_NEAR(resonant_efficiency(p), 4 * cpm / ((1 + cpm) * (1 + cpm)), 1e-5);
    }
}

TEST(Efficiency, BlockadeNumbers)
{
    const auto b30 = with_branch(solve_matched_params(1.0, 30.0), control_branch::blockade);
    EXPECT_NEAR(resonant_efficiency(b30), 1.0 / (61.0 * 61.0), 1e-15);
    EXPECT_NEAR(resonant_efficiency(b30), 2.687e-4, 1e-7);
    const auto b300 = with_branch(solve_matched_params(1.0, 300.0), control_branch::blockade);
    EXPECT_NEAR(resonant_efficiency(b300), 1.0 / (601.0 * 601.0), 1e-17);
}

TEST(Efficiency, Passivity)
{
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> nu(-20, 20);
    for (int i = 0; i < 300; ++i) {
        const auto p = random_params(rng);
        for (int k = 0; k < 20; ++k) {
            const double e = spectral_efficiency(nu(rng), p);
            EXPECT_GE(e, 0.0);
            EXPECT_LE(e, 1.0 + 1e-9);
        }
        EXPECT_LE(spectral_efficiency(0.0, p), 1.0 + 1e-9);
    }
}

TEST(Window, PointValues)
{
    EXPECT_DOUBLE_EQ(matched_window(0.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(matched_window(0.5, 1.0), 0.5);
    EXPECT_DOUBLE_EQ(matched_window(1.0, 1.0), 1.0 / 65);
    EXPECT_DOUBLE_EQ(matched_window(-1.0, 2.0), 0.5);
}

TEST(Window, MatchedSpectrumFollowsWindow)
{
    for (double c : {0.0, 10.0}) {
        const auto p = with_branch(solve_matched_params(1.0, c), control_branch::transfer);
        for (double nu = -3; nu <= 3; nu += 0.01)
            EXPECT_NEAR(spectral_efficiency(nu, p), matched_window(nu, 1.0), 0.02);
    }
}

TEST(Reflection, BlockadeLimit)
{
    for (double c : {30.0, 300.0}) {
        const auto p = with_branch(solve_matched_params(1.0, c), control_branch::blockade);
        const cplx r = blockade_reflection(0.0, p);
        EXPECT_NEAR(std::norm(r), std::pow(2 * c / (1 + 2 * c), 2), 1e-12);
        EXPECT_LT(r.real(), 0.0); // reflected amplitude is negative
        EXPECT_NEAR(r.imag(), 0.0, 1e-12);
    }
    const auto p300 = with_branch(solve_matched_params(1.0, 300.0), control_branch::blockade);
    EXPECT_NEAR(std::norm(blockade_reflection(0.0, p300)), 0.9967, 5e-5);
}

TEST(Reflection, MatchedTransferDoesNotReflect)
{
    const auto p = with_branch(solve_matched_params(1.0, 30.0), control_branch::transfer);
    EXPECT_LT(std::abs(blockade_reflection(0.0, p)), 1e-6);
}

TEST(Reflection, EnergySplit)
{
    /* reflected + stored + atom scattering = 1 on resonance */
    std::mt19937 rng(21);
    for (int i = 0; i < 50; ++i) {
        const auto p = random_params(rng);
        const double r = std::norm(blockade_reflection(0.0, p));
        EXPECT_LE(r + spectral_efficiency(0.0, p), 1.0 + 1e-9);
    }
}

TEST(Reflection, CavityResponseConsistency)
{
    std::mt19937 rng(23);
    for (int i = 0; i < 20; ++i) {
        const auto p = random_params(rng);
        for (double nu : {-0.4, 0.0, 1.2}) {
            const cplx lhs = blockade_reflection(nu, p) + 1.0;
            const cplx rhs = std::sqrt(p.kappa) * cavity1_response(nu, p);
            EXPECT_LT(std::abs(lhs - rhs), 1e-12);
            /* A21 A1in = -i sqrt(kappa) F / f2 */
            const cplx prod = cavity2_over_cavity1(nu, p) * cavity1_response(nu, p);
            const cplx want = -I * std::sqrt(p.kappa) * storage_transfer(nu, p) / p.f2;
            EXPECT_LT(std::abs(prod - want), 1e-12 * (1 + std::abs(want)));
        }
    }
}

TEST(PoleGuard, EmptyEnsembleAtResonance)
{
    SystemParams p;
    p.f2 = 0.5;
    p.g2 = 0.0;
    SpectralDiagnostics d;
    const cplx v = cavity2_over_cavity1(0.0, p, &d);
    EXPECT_TRUE(d.pole_guard_hit);
    EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
    SpectralDiagnostics clean;
    cavity2_over_cavity1(0.1, p, &clean);
    EXPECT_FALSE(clean.pole_guard_hit);
}

TEST(Grid, Construction)
{
    const auto g = FrequencyGrid::default_grid();
    EXPECT_EQ(g.size(), 4096u);
    EXPECT_DOUBLE_EQ(g[0], -8.0);
    EXPECT_DOUBLE_EQ(g[4095], 8.0);
    EXPECT_TRUE(g.is_symmetric(0.0));
    EXPECT_THROW(FrequencyGrid::explicit_points({0.0, 0.0}), invalid_parameter);
    EXPECT_THROW(FrequencyGrid::explicit_points({}), invalid_parameter);
    EXPECT_THROW(FrequencyGrid::uniform(1, 0, 10), invalid_parameter);
    EXPECT_FALSE(FrequencyGrid::explicit_points({0.0, 1.0}).is_symmetric());
}

TEST(Spectrum, EfficiencySpectrumInvariants)
{
    const auto p = solve_matched_params(1.0, 10.0);
    const auto s = efficiency_spectrum(FrequencyGrid::uniform(-4, 4, 401), p);
    EXPECT_EQ(s.label, spectrum_label::efficiency_real);
    for (const auto& v : s.values) {
        EXPECT_EQ(v.imag(), 0.0);
        EXPECT_GE(v.real(), 0.0);
        EXPECT_LE(v.real(), 1.0 + efficiency_slack);
    }
    ComplexSpectrum bad = s;
    bad.values[3] = cplx(1.1, 0.0);
    EXPECT_THROW(bad.validate(), invalid_parameter);
}

namespace {

ComplexSpectrum gaussian_input(double dt, const FrequencyGrid& g)
{
    return tabulate(g, spectrum_label::photon_spectrum, [&](double nu) {
        return std::pow(pi * dt * dt, -0.25) * dt * std::exp(-nu * nu * dt * dt / 2);
    });
}

} // namespace

TEST(Echo, TimeReversedSpectrum)
{
    const auto grid = FrequencyGrid::uniform(-2, 2, 4001);
    const auto in = gaussian_input(10.0, grid);
    EXPECT_NEAR(in.total_probability(), 1.0, 1e-6);
    const auto p = with_branch(solve_matched_params(1.0, 30.0), control_branch::transfer);
    const auto out = echo_spectrum(in, p, p, 50.0);
    const auto w = grid.trapezoid_weights();
    const std::size_t n = grid.size();
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        err += w[i] * std::norm(out.values[i] + in.values[n - 1 - i]);
    EXPECT_LT(std::sqrt(err), 0.01);
}

TEST(Echo, DecayAndBlockade)
{
    const auto grid = FrequencyGrid::uniform(-2, 2, 4001);
    const auto in = gaussian_input(10.0, grid);
    auto p = with_branch(solve_matched_params(1.0, 30.0), control_branch::transfer);
    const double full = echo_spectrum(in, p, p, 50.0).total_probability();
    auto q = p;
    q.t2 = 200.0; // tau / T2 = 0.25
    EXPECT_NEAR(echo_spectrum(in, q, q, 50.0).total_probability() / full, std::exp(-1.0), 0.01);

}

TEST(Echo, BlockadeReadApproachesLineCenterValue)
{
    /* the blockade efficiency is smallest at line center, so the ratio
       approaches 1/61^2 from above as the pulse narrows */
    const auto grid = FrequencyGrid::uniform(-1, 1, 8001);
    const auto p = with_branch(solve_matched_params(1.0, 30.0), control_branch::transfer);
    const auto b = with_branch(solve_matched_params(1.0, 30.0), control_branch::blockade);
    const double floor = 1.0 / (61.0 * 61.0);
    double last = 1.0;
    for (double dt : {10.0, 40.0, 160.0}) {
        const auto in = gaussian_input(dt, grid);
        const double ratio = echo_spectrum(in, p, b, 50.0).total_probability() /
                             echo_spectrum(in, p, p, 50.0).total_probability();
        EXPECT_GE(ratio, floor * (1 - 1e-9));
        EXPECT_LT(ratio, last);
        last = ratio;
    }
    EXPECT_NEAR(last / floor, 1.0, 1e-3);
}

TEST(Echo, Preconditions)
{
    const auto grid = FrequencyGrid::uniform(-2, 2, 401);
    auto in = gaussian_input(10.0, grid);
    const auto p = solve_matched_params(1.0, 30.0);
    for (auto& v : in.values)
        v *= 1.1;
    EXPECT_THROW(echo_spectrum(in, p, p, 50.0), invalid_parameter);
    const auto skew = FrequencyGrid::uniform(-1.5, 2, 401);
    EXPECT_THROW(echo_spectrum(gaussian_input(10.0, skew), p, p, 50.0), invalid_parameter);
    auto other = p;
    other.delta_in = 0.7;
    EXPECT_THROW(echo_spectrum(gaussian_input(10.0, grid), p, other, 50.0), invalid_parameter);
}

TEST(Echo, NarrowbandProbability)
{
    auto p = solve_matched_params(1.0, 0.0);
    EXPECT_DOUBLE_EQ(echo_probability_narrowband(p, 0.0), 1.0);
    p.t2 = 100.0;
    EXPECT_NEAR(echo_probability_narrowband(p, 1.0), std::exp(-0.04), 1e-12);
    EXPECT_NEAR(echo_probability_narrowband(p, 1.0), 0.9608, 1e-4);
    p.f2 *= std::sqrt(2.0); // C_pm = 2
    EXPECT_NEAR(echo_probability_narrowband(p, 1.0), 64.0 / 81.0 * std::exp(-0.04), 1e-12);
}

TEST(Serialization, SpectrumCsvCarriesProvenance)
{
    const auto p = solve_matched_params(1.0, 10.0);
    const auto s = efficiency_spectrum(FrequencyGrid::uniform(-1, 1, 5), p);
    std::ostringstream os;
    write_csv(os, spectrum_provenance(s, p), {}, spectrum_table(s));
    const auto text = os.str();
    EXPECT_NE(text.find("# label: efficiency_real"), std::string::npos);
    EXPECT_NE(text.find("# param_hash: " + param_hash(p)), std::string::npos);
    EXPECT_NE(text.find("# unit_convention: kappa"), std::string::npos);
    EXPECT_NE(text.find("nu,re,im\n"), std::string::npos);
}
