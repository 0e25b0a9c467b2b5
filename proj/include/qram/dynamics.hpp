#ifndef QRAM_DYNAMICS_HPP
#define QRAM_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>

#include "ensemble.hpp"
#include "errors.hpp"
#include "params.hpp"
#include "pulse.hpp"
#include "spectral.hpp"

namespace qram {

/// Where the single excitation sits at one output time.
struct ProbabilityLedger
{
    double cavity1 = 0.0;         // |alpha_1|^2
    double cavity2 = 0.0;         // |alpha_2|^2
    double control = 0.0;         // |beta_c|^2
    double ensemble = 0.0;        // sum w |beta_j|^2
    double output = 0.0;          // int |alpha_out|^2 so far
    double control_loss = 0.0;    // gamma int |beta_c|^2
    double dephasing_loss = 0.0;  // (2/T2) int sum w |beta_j|^2
    double input_remaining = 0.0; // input energy not yet delivered

    double total() const
    {
        return cavity1 + cavity2 + control + ensemble + output +
               control_loss + dephasing_loss + input_remaining;
    }
};

struct EnsembleSnapshot
{
    double time = 0.0;
    std::vector<cplx> coherences;
};

/// Time series produced by one integration run.
struct SimulationTrace
{
    std::vector<double> times;
    std::vector<cplx> a1, a2, beta_c;
    std::vector<cplx> alpha_in, alpha_out;
    std::vector<ProbabilityLedger> probabilities;
    std::vector<EnsembleSnapshot> ensemble_snapshots;

    /* ensemble at the last output time */
    AtomEnsemble final_ensemble;

    double solver_tol = 0.0;
    std::string param_hash;
    std::size_t steps = 0;
    /* ledger total at the first sample, and the largest drift from it */
    double initial_total = 0.0;
    double max_ledger_deviation = 0.0;

    /// Probability stored in the ensemble at the end of the run.
    double storage_probability() const { return final_ensemble.probability(); }

    /// Cumulative output probability at the end of the run.
    double output_probability() const
    {
        return probabilities.empty() ? 0.0 : probabilities.back().output;
    }

    /// Index of the first sample at or after t.
    std::size_t index_at(double t) const
    {
        auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12);
        if (it == times.end())
            throw invalid_parameter("time outside of the trace");
        return std::size_t(it - times.begin());
    }
};

struct TraceOptions
{
    /* spacing of the output samples; 0 picks a default */
    double sample_interval = 0.0;
    /* keep the ensemble at every k-th sample; 0 keeps only the final one */
    std::size_t ensemble_stride = 0;
    /* additional output times (e.g. window edges) */
    std::vector<double> extra_samples;
    /* largest step the integrator may take; 0 picks a default */
    double max_step = 0.0;
    /* abort when the probability ledger drifts by more than 100 x tol */
    bool check_norm = true;
    std::size_t max_steps = 20'000'000;
};

namespace detail {

using state_type = std::vector<cplx>;

/* layout: a1, beta_c, a2, beta_1..beta_n, then three running integrals */
struct light_matter_rhs
{
    const SystemParams& p;
    const AtomEnsemble& ens;
    std::function<cplx(double)> drive;
    double sqrt_kappa;
    double sqrt_coupling;
    double dephasing;

    void operator()(const state_type& y, state_type& dy, double t) const
    {
        const std::size_t n = ens.size();
        const cplx a1 = y[0], bc = y[1], a2 = y[2];
        const cplx ain = drive ? drive(t) : cplx(0.0);

        cplx polarization = 0.0;
        double excited = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const cplx b = y[3 + j];
            polarization += ens.weights[j] * b;
            excited += ens.weights[j] * std::norm(b);
            dy[3 + j] = -cplx(dephasing, ens.detunings[j]) * b -
                        I * sqrt_coupling * a2;
        }
        dy[0] = -I * p.g1 * bc - I * p.f2 * a2 - 0.5 * p.kappa * a1 +
                sqrt_kappa * ain;
        dy[1] = -I * cplx(p.delta_c, -p.gamma / 2) * bc - I * p.g1 * a1;
        dy[2] = -I * sqrt_coupling * polarization - I * p.f2 * a1;

        const cplx aout = sqrt_kappa * a1 - ain;
        dy[3 + n] = std::norm(aout);
        dy[4 + n] = p.gamma * std::norm(bc);
        dy[5 + n] = 2 * dephasing * excited;
    }
};

inline void check_coupling(const SystemParams& p, const AtomEnsemble& ens)
{
    const double g = p.collective_coupling();
    if (std::abs(ens.collective_coupling - g) > 1e-12 * std::max(1.0, g))
        throw invalid_parameter(
            "ensemble collective coupling does not match N g2^2 of the parameters");
}

inline std::vector<double> sample_times(double t0, double t1, double dt,
                                        const std::vector<double>& extra)
{
    std::vector<double> ts;
    const auto n = std::size_t(std::ceil((t1 - t0) / dt - 1e-9));
    ts.reserve(n + 2 + extra.size());
    for (std::size_t k = 0; k < n; ++k)
        ts.push_back(t0 + dt * double(k));
    ts.push_back(t1);
    for (double t : extra)
        if (t > t0 && t < t1)
            ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             ts.end());
    return ts;
}

/**
 * Integrates the light-matter equations from the given initial cavity and
 * ensemble amplitudes. drive(t) is alpha_in(t); input_remaining(t) is the
 * input energy still to arrive within [t, t1].
 */
inline SimulationTrace integrate(const SystemParams& p, const AtomEnsemble& ens,
                                 std::function<cplx(double)> drive,
                                 std::function<double(double)> input_remaining,
                                 std::vector<double> breakpoints,
                                 std::pair<double, double> t_span,
                                 double solver_tol, const TraceOptions& opt)
{
    namespace odeint = boost::numeric::odeint;

    const auto [t0, t1] = t_span;
    if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1))
        throw invalid_parameter("time span must be finite with t_start < t_end");
    if (!(solver_tol > 0) || solver_tol > 1e-8)
        throw invalid_parameter("solver tolerance must lie in (0, 1e-8]");

    const std::size_t n = ens.size();
    light_matter_rhs rhs{p, ens, std::move(drive), std::sqrt(p.kappa),
                         std::sqrt(p.collective_coupling()), p.dephasing_rate()};

    state_type y(n + 6, cplx(0.0));
    for (std::size_t j = 0; j < n; ++j)
        y[3 + j] = ens.coherences[j];

    const double dt_sample =
        opt.sample_interval > 0 ? opt.sample_interval : 0.25 / p.kappa;
    const double max_dt = opt.max_step > 0 ? opt.max_step : 0.5 / p.kappa;
    const auto ts = sample_times(t0, t1, dt_sample, opt.extra_samples);

    SimulationTrace tr;
    tr.solver_tol = solver_tol;
    tr.param_hash = param_hash(p);
    tr.final_ensemble = ens;
    const std::size_t m = ts.size();
    tr.times.reserve(m);
    tr.a1.reserve(m);
    tr.a2.reserve(m);
    tr.beta_c.reserve(m);
    tr.alpha_in.reserve(m);
    tr.alpha_out.reserve(m);
    tr.probabilities.reserve(m);

    const double sqrt_kappa = std::sqrt(p.kappa);
    auto record = [&](const state_type& s, double t, std::size_t k) {
        const cplx ain = rhs.drive ? rhs.drive(t) : cplx(0.0);
        ProbabilityLedger led;
        led.cavity1 = std::norm(s[0]);
        led.control = std::norm(s[1]);
        led.cavity2 = std::norm(s[2]);
        for (std::size_t j = 0; j < n; ++j)
            led.ensemble += ens.weights[j] * std::norm(s[3 + j]);
        led.output = s[3 + n].real();
        led.control_loss = s[4 + n].real();
        led.dephasing_loss = s[5 + n].real();
        led.input_remaining = input_remaining ? input_remaining(t) : 0.0;

        tr.times.push_back(t);
        tr.a1.push_back(s[0]);
        tr.beta_c.push_back(s[1]);
        tr.a2.push_back(s[2]);
        tr.alpha_in.push_back(ain);
        tr.alpha_out.push_back(sqrt_kappa * s[0] - ain);
        tr.probabilities.push_back(led);

        const double total = led.total();
        if (k == 0)
            tr.initial_total = total;
        const double dev = std::abs(total - tr.initial_total);
        tr.max_ledger_deviation = std::max(tr.max_ledger_deviation, dev);
        if (opt.check_norm && dev > 100 * solver_tol)
            throw numerical_error(
                "probability ledger drifted by " + std::to_string(dev) +
                " at t = " + std::to_string(t) + " (tolerance " +
                std::to_string(100 * solver_tol) + ")");

        const bool last = (k + 1 == m);
        if (last || (opt.ensemble_stride > 0 && k % opt.ensemble_stride == 0)) {
            EnsembleSnapshot snap;
            snap.time = t;
            snap.coherences.assign(s.begin() + 3, s.begin() + 3 + long(n));
            tr.ensemble_snapshots.push_back(std::move(snap));
        }
    };

    /* segment ends: kinks of the drive and the final time */
    std::vector<double> seg_ends;
    for (double b : breakpoints)
        if (b > t0 && b < t1)
            seg_ends.push_back(b);
    std::sort(seg_ends.begin(), seg_ends.end());
    seg_ends.push_back(t1);

    const double atol = solver_tol * 1e-3;
    auto stepper = odeint::make_dense_output(
        atol, solver_tol, max_dt, odeint::runge_kutta_dopri5<state_type>());

    state_type tmp(y.size());
    std::size_t k = 0;
    double t = t0;
    record(y, t0, k++);
    try {
        for (double b : seg_ends) {
            stepper.initialize(y, t, std::min(max_dt, 1e-3 / p.kappa));
            while (k < m && ts[k] <= b + 1e-12) {
                while (stepper.current_time() < ts[k]) {
                    stepper.do_step(rhs);
                    if (++tr.steps > opt.max_steps)
                        throw numerical_error("step budget exhausted near t = " +
                                              std::to_string(stepper.current_time()));
                    const double h = stepper.current_time_step();
                    if (h < 1e-13 * std::max(1.0, std::abs(stepper.current_time())))
                        throw numerical_error("step size collapsed near t = " +
                                              std::to_string(stepper.current_time()));
                }
                stepper.calc_state(ts[k], tmp);
                record(tmp, ts[k], k);
                ++k;
            }
            while (stepper.current_time() < b) {
                stepper.do_step(rhs);
                ++tr.steps;
            }
            stepper.calc_state(b, y);
            t = b;
        }
    } catch (const odeint::step_adjustment_error& e) {
        throw numerical_error(std::string("integrator step adjustment failed: ") +
                              e.what());
    }

    tr.final_ensemble.time = t1;
    tr.final_ensemble.coherences.assign(y.begin() + 3, y.begin() + 3 + long(n));
    return tr;
}

} // namespace detail

/**
 * Drives the memory with the input pulse over t_span. The ensemble
 * coherences of ens are the initial atomic state; cavity and control
 * amplitudes start at zero.
 */
inline SimulationTrace integrate_storage(const SystemParams& p,
                                         const AtomEnsemble& ens,
                                         const PulseSpec& pulse,
                                         std::pair<double, double> t_span,
                                         double solver_tol,
                                         TraceOptions opt = {})
{
    validate(p);
    ens.validate();
    pulse.validate();
    detail::check_coupling(p, ens);
    const auto [s0, s1] = pulse.support();
    if (s0 < t_span.first || s1 > t_span.second)
        throw invalid_parameter("pulse support [" + std::to_string(s0) + ", " +
                                std::to_string(s1) + "] is not inside the time span");
    if (opt.sample_interval <= 0)
        opt.sample_interval = std::min(pulse.duration / 20, 0.25 / p.kappa);
    if (opt.max_step <= 0)
        opt.max_step = std::min(pulse.duration / 10, 0.5 / p.kappa);
    const double t_end = t_span.second;
    return detail::integrate(
        p, ens, [pulse](double t) { return pulse.amplitude(t); },
        [pulse, t_end](double t) { return pulse.energy_between(t, t_end); },
        pulse.breakpoints(), t_span, solver_tol, opt);
}

/**
 * Free evolution of a (rephased) ensemble with empty cavities and no
 * drive. The detunings are used as given: pass the output of
 * invert_detunings for the CRIB readout.
 */
inline SimulationTrace integrate_retrieval(const SystemParams& p,
                                           const AtomEnsemble& ens,
                                           std::pair<double, double> t_span,
                                           double solver_tol,
                                           TraceOptions opt = {})
{
    validate(p);
    ens.validate();
    detail::check_coupling(p, ens);
    if (!(ens.probability() > 0))
        throw invalid_parameter("retrieval needs a nonzero ensemble coherence");
    return detail::integrate(p, ens, nullptr, nullptr, {}, t_span, solver_tol,
                             opt);
}

struct EchoOptions
{
    /* integration time kept after the echo window */
    double tail = 30.0;
    /* output sample spacing; 0 picks min(duration/20, 0.25/kappa) */
    double sample_interval = 0.0;
    /* keep both traces in the result */
    bool keep_traces = true;
    std::size_t max_steps = 20'000'000;
};

struct EchoResult
{
    double echo_probability = 0.0;
    std::pair<double, double> echo_window;
    /* shape fidelity with the time-reversed input, delay and phase optimized */
    double fidelity_time_reversed = 0.0;
    /* optimal extra delay beyond 2 tau and the phase of the overlap there */
    double best_delay = 0.0;
    double overlap_phase = 0.0;
    /* min over s = +/-1 of || alpha_out - s alpha_in(2 t_inv - t) || / || alpha_in ||
       on the window, zero extra delay */
    double time_reversal_l2_error = 0.0;
    int echo_sign = 1;
    std::vector<double> output_times;
    std::vector<cplx> output_waveform;

    double stored_probability = 0.0;
    /* cavity + control probability dropped at the inversion time */
    double residual_at_inversion = 0.0;
    double inversion_time = 0.0;

    AtomEnsemble ensemble_at_inversion; // before the detuning flip
    AtomEnsemble final_ensemble;        // after the readout
    SimulationTrace storage;
    SimulationTrace retrieval;
};

namespace detail {

/* trapezoid-weighted overlap <ref | out> and the two squared norms */
struct overlap_sums
{
    cplx overlap = 0.0;
    double ref_norm = 0.0;
    double out_norm = 0.0;
};

inline overlap_sums window_overlap(const std::vector<double>& ts,
                                   const std::vector<cplx>& out,
                                   const std::function<cplx(double)>& ref)
{
    overlap_sums s;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        double w = 0.0;
        if (k > 0)
            w += (ts[k] - ts[k - 1]) / 2;
        if (k + 1 < ts.size())
            w += (ts[k + 1] - ts[k]) / 2;
        const cplx r = ref(ts[k]);
        s.overlap += w * std::conj(r) * out[k];
        s.ref_norm += w * std::norm(r);
        s.out_norm += w * std::norm(out[k]);
    }
    return s;
}

} // namespace detail

/**
 * Full CRIB cycle: storage of the pulse, detuning inversion at
 * t = center + tau, readout with p_read. tau is measured from the pulse
 * center; the echo window is [2 tau - 6 dt, 2 tau + 6 dt] around the
 * center, clipped to the readout span.
 */
inline EchoResult run_echo_cycle(const SystemParams& p_store,
                                 const SystemParams& p_read,
                                 const AtomEnsemble& ens,
                                 const PulseSpec& pulse, double tau,
                                 double solver_tol, EchoOptions opt = {})
{
    pulse.validate();
    if (!(tau >= 5 * pulse.duration))
        throw invalid_parameter(
            "rephasing time must be at least 5 pulse durations after the pulse center");

    const double dt = pulse.duration;
    const double t_inv = pulse.center + tau;
    const double t_start = std::min(pulse.support().first, pulse.center - 6 * dt);
    const double w0 = pulse.center + 2 * tau - 6 * dt;
    const double w1 = pulse.center + 2 * tau + 6 * dt;
    const double t_end = w1 + opt.tail / p_read.kappa;

    TraceOptions topt;
    topt.sample_interval = opt.sample_interval > 0
                               ? opt.sample_interval
                               : std::min(dt / 20, 0.25 / p_store.kappa);
    topt.max_steps = opt.max_steps;
    SimulationTrace storage = integrate_storage(p_store, ens, pulse,
                                                {t_start, t_inv}, solver_tol, topt);

    EchoResult r;
    r.inversion_time = t_inv;
    r.ensemble_at_inversion = storage.final_ensemble;
    r.stored_probability = storage.storage_probability();
    const auto& last = storage.probabilities.back();
    r.residual_at_inversion = last.cavity1 + last.cavity2 + last.control;

    const AtomEnsemble flipped = invert_detunings(storage.final_ensemble);
    r.echo_window = {std::max(w0, t_inv), std::min(w1, t_end)};
    topt.extra_samples = {r.echo_window.first, r.echo_window.second};
    SimulationTrace readout =
        integrate_retrieval(p_read, flipped, {t_inv, t_end}, solver_tol, topt);
    r.final_ensemble = readout.final_ensemble;

    const std::size_t i0 = readout.index_at(r.echo_window.first);
    const std::size_t i1 = readout.index_at(r.echo_window.second);
    r.echo_probability =
        readout.probabilities[i1].output - readout.probabilities[i0].output;
    r.output_times.assign(readout.times.begin() + long(i0),
                          readout.times.begin() + long(i1) + 1);
    r.output_waveform.assign(readout.alpha_out.begin() + long(i0),
                             readout.alpha_out.begin() + long(i1) + 1);

    /* time-reversed input, shifted by an extra delay d */
    auto reversed = [&](double d) {
        return [&, d](double t) { return pulse.amplitude(2 * t_inv + d - t); };
    };
    auto infidelity = [&](double d) {
        const auto s = detail::window_overlap(r.output_times, r.output_waveform,
                                              reversed(d));
        if (s.ref_norm <= 0 || s.out_norm <= 0)
            return 1.0;
        return 1.0 - std::norm(s.overlap) / (s.ref_norm * s.out_norm);
    };
    /* coarse scan, then Brent refinement around the best point */
    const double range = 2 * dt;
    const int n_scan = 40;
    double best_d = 0.0, best_v = infidelity(0.0);
    for (int i = 0; i <= n_scan; ++i) {
        const double d = -range + 2 * range * i / n_scan;
        const double v = infidelity(d);
        if (v < best_v) {
            best_v = v;
            best_d = d;
        }
    }
    const double step = 2 * range / n_scan;
    const auto refined = boost::math::tools::brent_find_minima(
        infidelity, best_d - step, best_d + step, 40);
    if (refined.second < best_v) {
        best_d = refined.first;
        best_v = refined.second;
    }
    r.best_delay = best_d;
    r.fidelity_time_reversed = std::clamp(1.0 - best_v, 0.0, 1.0);
    r.overlap_phase = std::arg(
        detail::window_overlap(r.output_times, r.output_waveform, reversed(best_d))
            .overlap);

    /* L2 distance to +/- the reversed input; the smaller one sets the sign */
    double err_plus = 0.0, err_minus = 0.0, ref = 0.0;
    {
        const auto rev0 = reversed(0.0);
        for (std::size_t k = 0; k < r.output_times.size(); ++k) {
            double w = 0.0;
            if (k > 0)
                w += (r.output_times[k] - r.output_times[k - 1]) / 2;
            if (k + 1 < r.output_times.size())
                w += (r.output_times[k + 1] - r.output_times[k]) / 2;
            const cplx x = rev0(r.output_times[k]);
            err_plus += w * std::norm(r.output_waveform[k] - x);
            err_minus += w * std::norm(r.output_waveform[k] + x);
            ref += w * std::norm(x);
        }
    }
    r.echo_sign = err_plus <= err_minus ? 1 : -1;
    r.time_reversal_l2_error =
        ref > 0 ? std::sqrt(std::min(err_plus, err_minus) / ref) : 1.0;

    if (opt.keep_traces) {
        r.storage = std::move(storage);
        r.retrieval = std::move(readout);
    }
    return r;
}

struct BlockadePhaseResult
{
    /* arg of <stored | recovered>, in (-pi, pi] */
    double phase = 0.0;
    /* |<stored | recovered>| / <stored | stored> */
    double magnitude = 0.0;
    /* distance of phase from pi */
    double phase_error = 0.0;
    bool passed = false;
};

inline constexpr double blockade_phase_tolerance = 0.1;
inline constexpr double blockade_magnitude_threshold = 0.95;

/**
 * Compares the ensemble after echo reabsorption with the coherence stored
 * before the inversion. The recovered coherences are unwound by their free
 * evolution (including 1/T2 decay) back to the inversion time, atom by
 * atom; a blockaded readout leaves them at -1 times the stored ones.
 */
inline BlockadePhaseResult
blockade_phase_check(const SystemParams& p,
                     const AtomEnsemble& ens_after_reabsorption,
                     const AtomEnsemble& ens_initial)
{
    validate(p);
    const auto& after = ens_after_reabsorption;
    const auto& init = ens_initial;
    after.validate();
    init.validate();
    const std::size_t n = init.size();
    if (after.size() != n)
        throw invalid_parameter("ensembles differ in size");
    const double stored = init.probability();
    if (stored < 0.5)
        throw invalid_parameter("stored probability " + std::to_string(stored) +
                                " is below 0.5");
    const double elapsed = after.time - init.time;
    const double decay = p.dephasing_rate();

    cplx overlap = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        /* the readout ensemble is the inverted one: atom j <-> n-1-j */
        const std::size_t k = n - 1 - j;
        if (std::abs(after.detunings[k] + init.detunings[j]) >
            1e-12 * (1 + std::abs(init.detunings[j])))
            throw invalid_parameter(
                "ensembles are not related by a detuning inversion");
        const cplx unwound = after.coherences[k] *
                             std::exp(cplx(decay, after.detunings[k]) * elapsed);
        overlap += init.weights[j] * std::conj(init.coherences[j]) * unwound;
    }
    BlockadePhaseResult r;
    r.phase = std::arg(overlap);
    r.magnitude = std::abs(overlap) / stored;
    r.phase_error = std::abs(std::remainder(r.phase - pi, 2 * pi));
    r.passed = r.phase_error <= blockade_phase_tolerance &&
               r.magnitude >= blockade_magnitude_threshold;
    return r;
}

struct ProbeOptions
{
    double ramp = 20.0;      // smooth turn-on time of the drive
    double duration = 200.0; // total drive time
    double convergence_window = 20.0;
    double convergence_tol = 1e-4;
    double solver_tol = 1e-9;
};

struct ProbeResult
{
    cplx cavity1_over_input;  // alpha_1 / alpha_in
    cplx cavity2_over_cavity1; // alpha_2 / alpha_1
    cplx output_over_input;   // alpha_out / alpha_in
    /* relative change of alpha_1/alpha_in over the convergence window */
    double settling_change = 0.0;
};

/**
 * Drives the time-domain system with a slowly switched-on monochromatic
 * field at detuning delta and reads the steady-state amplitude ratios.
 */
inline ProbeResult transfer_function_probe(const SystemParams& p, double delta,
                                           ProbeOptions opt = {})
{
    validate(p);
    const AtomEnsemble ens = default_ensemble(p);
    const double ramp = opt.ramp / p.kappa;
    auto drive = [delta, ramp](double t) {
        const double env = t < ramp ? 0.5 * (1 - std::cos(pi * t / ramp)) : 1.0;
        return env * std::polar(1.0, -delta * t);
    };
    TraceOptions topt;
    topt.check_norm = false;
    topt.sample_interval = opt.convergence_window / p.kappa / 4;
    const double t_end = opt.duration / p.kappa;
    const auto tr = detail::integrate(p, ens, drive, nullptr, {ramp}, {0.0, t_end},
                                      opt.solver_tol, topt);

    const std::size_t last = tr.times.size() - 1;
    const std::size_t prev = tr.index_at(t_end - opt.convergence_window / p.kappa);
    const cplx r_last = tr.a1[last] / tr.alpha_in[last];
    const cplx r_prev = tr.a1[prev] / tr.alpha_in[prev];

    ProbeResult r;
    r.cavity1_over_input = r_last;
    r.cavity2_over_cavity1 =
        std::abs(tr.a1[last]) > 0 ? tr.a2[last] / tr.a1[last] : cplx(0.0);
    r.output_over_input = tr.alpha_out[last] / tr.alpha_in[last];
    r.settling_change = std::abs(r_last - r_prev) / std::max(std::abs(r_last), 1e-300);
    if (r.settling_change > opt.convergence_tol)
        throw numerical_error("steady state not reached within the drive time "
                              "(relative change " +
                              std::to_string(r.settling_change) + ")");
    return r;
}

} // namespace qram

#endif
