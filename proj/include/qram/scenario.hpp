#ifndef QRAM_SCENARIO_HPP
#define QRAM_SCENARIO_HPP

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "addressing.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "ensemble.hpp"
#include "frequency_domain.hpp"
#include "io.hpp"
#include "spectral.hpp"

namespace qram {

/* environment variable naming the default output directory */
inline constexpr const char* output_dir_env = "QRAM_OUTPUT_DIR";

struct RunOptions
{
    /* empty: take the config's path, else the default location */
    std::string out_path;
    /* overrides the config's format when set */
    bool format_set = false;
    output_format format = output_format::csv;
    unsigned workers = 1;
};

struct ScenarioOutcome
{
    int exit_status = exit_success;
    std::string artifact;
    std::string message; // human-readable report
    Summary summary;
};

/// Output location: explicit path, then config path, then
/// $QRAM_OUTPUT_DIR (or the working directory) / <label or scenario>.<ext>.
inline std::string resolve_output_path(const ScenarioConfig& cfg, const RunOptions& opt,
                                       output_format fmt_used)
{
    if (!opt.out_path.empty())
        return opt.out_path;
    if (!cfg.output.path.empty())
        return cfg.output.path;
    const char* dir = std::getenv(output_dir_env);
    const std::string base = cfg.label.empty() ? to_string(cfg.scenario) : cfg.label;
    const std::string name = base + "." + to_string(fmt_used);
    if (dir && *dir)
        return (std::filesystem::path(dir) / name).string();
    return name;
}

/// tau = 6 dt + 20 / kappa: echo window clear of the input and inversion.
inline double auto_tau(double duration, double kappa)
{
    return 6 * duration + 20 / kappa;
}

namespace detail {

inline AtomEnsemble scenario_ensemble(const ScenarioConfig& cfg, const SystemParams& p)
{
    return discretize_ensemble(cfg.solver.ensemble_atoms, p.delta_in,
                               cfg.solver.span * p.delta_in, cfg.solver.scheme,
                               p.collective_coupling());
}

inline void apply_parameter(const std::string& name, double v, SystemParams& p,
                            PulseSpec& pulse, EchoSpec& echo)
{
    if (name == "duration")
        pulse.duration = v;
    else if (name == "tau") {
        echo.tau = v;
        echo.tau_auto = false;
    } else if (name == "t2")
        p.t2 = v;
    else if (name == "c_atom") {
        if (!(v >= 0))
            throw invalid_parameter("c_atom must be >= 0");
        p.g1 = std::sqrt(v * p.kappa * p.gamma);
    } else if (name == "g1")
        p.g1 = v;
    else if (name == "delta_c")
        p.delta_c = v;
    else if (name == "f2")
        p.f2 = v;
    else if (name == "carrier_detuning")
        pulse.carrier_detuning = v;
    else
        throw invalid_parameter("cannot sweep '" + name + "'");
    validate(p);
    pulse.validate();
}

struct Artifact
{
    Summary summary;
    Table table;
    nlohmann::json extra = nullptr;
    std::string report;
    double solver_tol = 0.0;
};

inline Artifact run_spectra(const ScenarioConfig& cfg)
{
    const auto& p = cfg.params;
    const auto pt = with_branch(p, control_branch::transfer);
    const auto pb = with_branch(p, control_branch::blockade);
    const auto grid = FrequencyGrid::uniform(cfg.grid.lo * p.kappa, cfg.grid.hi * p.kappa,
                                             cfg.grid.points);
    Artifact a;
    a.table.columns = {"nu_over_kappa", "eps_transfer", "eps_blockade", "db_transfer",
                       "db_blockade",   "matched_window", "reflection_blockade"};
    bool pole = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double nu = grid[i];
        SpectralDiagnostics d;
        const double et = spectral_efficiency(nu, pt, &d);
        const double eb = spectral_efficiency(nu, pb, &d);
        const double rb = std::norm(blockade_reflection(nu, pb, &d));
        pole = pole || d.pole_guard_hit;
        a.table.rows.push_back({fmt(nu / p.kappa), fmt(et), fmt(eb), fmt(10 * std::log10(et)),
                                fmt(10 * std::log10(eb)), fmt(matched_window(nu, p.kappa)),
                                fmt(rb)});
    }
    a.summary = {{"resonant_efficiency_transfer", fmt(spectral_efficiency(0, pt))},
                 {"resonant_efficiency_blockade", fmt(spectral_efficiency(0, pb))},
                 {"pole_guard_hit", pole ? "true" : "false"}};
    return a;
}

inline Artifact run_check_matching(const ScenarioConfig& cfg)
{
    const auto& p = cfg.params;
    const auto c = cooperativities(p);
    const auto r = check_matching(p);
    Artifact a;
    a.table.columns = {"quantity", "value"};
    auto row = [&](const std::string& k, const std::string& v) {
        a.summary.push_back({k, v});
    };
    row("c_atom", fmt(c.c_atom));
    row("c_pm", fmt(c.c_pm));
    row("tolerance", fmt(r.tolerance));
    row("c_pm_residual", fmt(r.c_pm_residual));
    row("c_pm_matched", r.c_pm_matched ? "true" : "false");
    row("second_condition_residual", fmt(r.second_condition_residual));
    row("second_condition_matched", r.second_condition_matched ? "true" : "false");
    row("third_condition_residual", fmt(r.third_condition_residual));
    row("third_condition_matched", r.third_condition_matched ? "true" : "false");
    row("all_matched", r.all_matched() ? "true" : "false");
    row("resonant_efficiency", fmt(resonant_efficiency(p)));
    std::ostringstream os;
    for (const auto& [k, v] : a.summary)
        os << k << " = " << v << '\n';
    a.report = os.str();
    for (const auto& [k, v] : a.summary)
        a.table.rows.push_back({k, v});
    return a;
}

inline Artifact run_store(const ScenarioConfig& cfg)
{
    const auto p = cfg.params;
    const auto ens = scenario_ensemble(cfg, p);
    const auto [s0, s1] = cfg.pulse.support();
    const double margin = 5 * cfg.pulse.duration;
    TraceOptions opt;
    opt.max_steps = cfg.solver.max_steps;
    const auto tr = integrate_storage(p, ens, cfg.pulse, {s0 - margin, s1 + margin},
                                      cfg.solver.tol, opt);
    Artifact a;
    a.table = trace_table(tr);
    a.solver_tol = cfg.solver.tol;
    a.summary = {{"storage_probability", fmt(tr.storage_probability())},
                 {"output_probability", fmt(tr.output_probability())},
                 {"storage_probability_spectral", fmt(p.f2 > 0 ? storage_probability_spectral(p, cfg.pulse) : 0.0)},
                 {"max_ledger_deviation", fmt(tr.max_ledger_deviation)},
                 {"steps", std::to_string(tr.steps)}};
    return a;
}

inline Artifact run_echo(const ScenarioConfig& cfg, bool blockade)
{
    const auto& p = cfg.params;
    const auto ps = with_branch(p, cfg.echo.store_branch);
    const auto pr = with_branch(p, blockade ? control_branch::blockade : cfg.echo.read_branch);
    const double tau =
        cfg.echo.tau_auto ? auto_tau(cfg.pulse.duration, p.kappa) : cfg.echo.tau;
    const auto ens = scenario_ensemble(cfg, p);
    EchoOptions eo;
    eo.keep_traces = false;
    eo.max_steps = cfg.solver.max_steps;
    const auto r = run_echo_cycle(ps, pr, ens, cfg.pulse, tau, cfg.solver.tol, eo);

    Artifact a;
    a.solver_tol = cfg.solver.tol;
    a.table.columns = {"time", "series", "re", "im"};
    for (std::size_t k = 0; k < r.output_times.size(); ++k)
        a.table.rows.push_back({fmt(r.output_times[k]), "alpha_out",
                                fmt(r.output_waveform[k].real()),
                                fmt(r.output_waveform[k].imag())});
    a.summary = {{"tau", fmt(tau)},
                 {"echo_probability", fmt(r.echo_probability)},
                 {"echo_window_start", fmt(r.echo_window.first)},
                 {"echo_window_end", fmt(r.echo_window.second)},
                 {"stored_probability", fmt(r.stored_probability)},
                 {"fidelity_time_reversed", fmt(r.fidelity_time_reversed)},
                 {"best_delay", fmt(r.best_delay)},
                 {"time_reversal_l2_error", fmt(r.time_reversal_l2_error)},
                 {"echo_sign", std::to_string(r.echo_sign)},
                 {"residual_at_inversion", fmt(r.residual_at_inversion)}};
    if (p.f2 > 0)
        a.summary.push_back(
            {"echo_probability_spectral", fmt(echo_probability_spectral(ps, pr, cfg.pulse, tau))});
    if (blockade) {
        const auto b = blockade_phase_check(pr, r.final_ensemble, r.ensemble_at_inversion);
        a.summary.push_back({"coherence_phase", fmt(b.phase)});
        a.summary.push_back({"coherence_magnitude", fmt(b.magnitude)});
        a.summary.push_back({"phase_error", fmt(b.phase_error)});
        a.summary.push_back({"phase_check_passed", b.passed ? "true" : "false"});
    }
    return a;
}

inline Artifact run_address(const ScenarioConfig& cfg)
{
    const auto& ac = cfg.address;
    BranchEfficiencies eff;
    if (ac.source == efficiency_source::dynamics)
        eff = compose_with_dynamics(cfg.params, ac.tau);
    else if (ac.source == efficiency_source::custom)
        eff = ac.custom;
    const int m = ac.spec.size();
    const auto s = run_addressing(m, ac.spec, eff);

    Artifact a;
    a.table.columns = {"term", "re", "im", "control", "cells", "emitted"};
    for (std::size_t i = 0; i < s.terms.size(); ++i) {
        const auto& t = s.terms[i];
        std::string cells, emitted;
        for (const auto& c : t.cells)
            cells += c.occupied ? '1' : '0';
        for (const auto& e : t.emitted)
            emitted += (emitted.empty() ? "" : " ") + e.str();
        a.table.rows.push_back({std::to_string(i), fmt(t.amplitude.real()),
                                fmt(t.amplitude.imag()), to_string(t.control), cells,
                                emitted});
    }
    a.extra = state_json(s);
    a.summary = {{"cells", std::to_string(m)},
                 {"terms", std::to_string(s.terms.size())},
                 {"norm", fmt(s.norm())},
                 {"total_loss", fmt(s.total_loss())},
                 {"matches_ideal_closed_form",
                  same_terms(s, ideal_addressing_output(m, ac.spec)) ? "true" : "false"},
                 {"cross_pairing", has_cross_pairing(s) ? "true" : "false"}};
    a.report = format_table(s);
    return a;
}

struct SweepPoint
{
    double series = 0.0;
    double value = 0.0;
    double tau = 0.0;
    double echo = 0.0;
    double echo_spectral = 0.0;
    double stored = 0.0;
    double fidelity = 0.0;
};

inline Artifact run_sweep(const ScenarioConfig& cfg, unsigned workers)
{
    const auto& sw = cfg.sweep;
    const bool has_series = !sw.series_parameter.empty();
    const std::vector<double> series = has_series ? sw.series_values : std::vector<double>{0.0};
    std::vector<SweepPoint> points;
    for (double s : series)
        for (double v : sw.values)
            points.push_back({s, v});

    auto compute = [&](SweepPoint& pt) {
        SystemParams p = cfg.params;
        PulseSpec pulse = cfg.pulse;
        EchoSpec echo = cfg.echo;
        if (has_series)
            apply_parameter(sw.series_parameter, pt.series, p, pulse, echo);
        apply_parameter(sw.parameter, pt.value, p, pulse, echo);
        pt.tau = echo.tau_auto ? auto_tau(pulse.duration, p.kappa) : echo.tau;
        const auto ps = with_branch(p, echo.store_branch);
        const auto pr = with_branch(p, echo.read_branch);
        pt.echo_spectral = echo_probability_spectral(ps, pr, pulse, pt.tau);
        if (sw.time_domain) {
            EchoOptions eo;
            eo.keep_traces = false;
            eo.max_steps = cfg.solver.max_steps;
            const auto r = run_echo_cycle(ps, pr, scenario_ensemble(cfg, p), pulse, pt.tau,
                                          cfg.solver.tol, eo);
            pt.echo = r.echo_probability;
            pt.stored = r.stored_probability;
            pt.fidelity = r.fidelity_time_reversed;
        } else {
            pt.echo = pt.echo_spectral;
            pt.stored = storage_probability_spectral(ps, pulse);
            pt.fidelity = std::nan("");
        }
    };

    /* each point writes only its own slot, so the result is independent of the
       worker count */
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= points.size())
                return;
            try {
                compute(points[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = points.size();
                return;
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(workers, unsigned(points.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);

    Artifact a;
    a.solver_tol = cfg.solver.tol;
    if (has_series)
        a.table.columns.push_back(sw.series_parameter);
    for (const auto& c : {sw.parameter, std::string("tau"), std::string("echo_probability"),
                                std::string("echo_probability_spectral"),
                                std::string("stored_probability"), std::string("fidelity")})
        a.table.columns.push_back(c);
    for (const auto& pt : points) {
        std::vector<std::string> row;
        if (has_series)
            row.push_back(fmt(pt.series));
        for (double v : {pt.value, pt.tau, pt.echo, pt.echo_spectral, pt.stored, pt.fidelity})
            row.push_back(fmt(v));
        a.table.rows.push_back(std::move(row));
    }
    a.summary = {{"points", std::to_string(points.size())},
                 {"time_domain", sw.time_domain ? "true" : "false"}};
    return a;
}

} // namespace detail

/**
 * Executes a validated scenario and writes its artifact. Errors in the
 * scenario inputs map to exit_config_error, solver failures to
 * exit_numerical_failure; the message carries the diagnostic.
 */
inline ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const RunOptions& opt = {})
{
    ScenarioOutcome out;
    try {
        detail::Artifact a;
        switch (cfg.scenario) {
        case scenario_kind::spectra: a = detail::run_spectra(cfg); break;
        case scenario_kind::check_matching: a = detail::run_check_matching(cfg); break;
        case scenario_kind::store: a = detail::run_store(cfg); break;
        case scenario_kind::echo_cycle: a = detail::run_echo(cfg, false); break;
        case scenario_kind::blockade: a = detail::run_echo(cfg, true); break;
        case scenario_kind::address: a = detail::run_address(cfg); break;
        case scenario_kind::sweep: a = detail::run_sweep(cfg, opt.workers); break;
        }
        const output_format f = opt.format_set ? opt.format : cfg.output.format;
        Provenance prov;
        prov.label = cfg.label.empty() ? to_string(cfg.scenario) : cfg.label;
        prov.config_hash = config_hash(cfg);
        if (cfg.has_params) {
            prov.param_hash = param_hash(cfg.params);
            prov.unit_convention = to_string(cfg.params.units);
        }
        prov.solver_tol = a.solver_tol;

        std::ostringstream os;
        if (f == output_format::csv)
            write_csv(os, prov, a.summary, a.table);
        else
            write_json(os, prov, a.summary, a.table, a.extra);
        out.artifact = resolve_output_path(cfg, opt, f);
        write_file(out.artifact, os.str());
        out.summary = a.summary;
        if (a.report.empty()) {
            std::ostringstream r;
            for (const auto& [k, v] : a.summary)
                r << k << " = " << v << '\n';
            out.message = r.str();
        } else {
            out.message = a.report;
        }
    } catch (const numerical_error& e) {
        out.exit_status = exit_numerical_failure;
        out.message = std::string("numerical failure in scenario '") +
                      to_string(cfg.scenario) + "': " + e.what();
    } catch (const invalid_parameter& e) {
        out.exit_status = exit_config_error;
        out.message = std::string("invalid scenario input: ") + e.what();
    } catch (const config_error& e) {
        out.exit_status = exit_config_error;
        out.message = e.what();
    } catch (const error& e) {
        out.exit_status = exit_config_error;
        out.message = e.what();
    }
    return out;
}

} // namespace qram

#endif
