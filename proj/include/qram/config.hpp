#ifndef QRAM_CONFIG_HPP
#define QRAM_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "addressing.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "params.hpp"
#include "pulse.hpp"

namespace qram {

enum class scenario_kind {
    spectra,
    check_matching,
    store,
    echo_cycle,
    blockade,
    address,
    sweep,
};

inline std::string to_string(scenario_kind k)
{
    switch (k) {
    case scenario_kind::spectra: return "spectra";
    case scenario_kind::check_matching: return "check_matching";
    case scenario_kind::store: return "store";
    case scenario_kind::echo_cycle: return "echo_cycle";
    case scenario_kind::blockade: return "blockade";
    case scenario_kind::address: return "address";
    case scenario_kind::sweep: return "sweep";
    }
    return "unknown";
}

inline scenario_kind parse_scenario_kind(const std::string& s)
{
    for (auto k : {scenario_kind::spectra, scenario_kind::check_matching,
                   scenario_kind::store, scenario_kind::echo_cycle,
                   scenario_kind::blockade, scenario_kind::address,
                   scenario_kind::sweep})
        if (to_string(k) == s)
            return k;
    throw invalid_parameter("unknown scenario '" + s + "' (expected spectra, "
                            "check_matching, store, echo_cycle, blockade, address or sweep)");
}

enum class output_format { csv, json };

inline std::string to_string(output_format f)
{
    return f == output_format::csv ? "csv" : "json";
}

inline output_format parse_output_format(const std::string& s)
{
    if (s == "csv")
        return output_format::csv;
    if (s == "json")
        return output_format::json;
    throw invalid_parameter("unknown output format '" + s + "' (expected csv or json)");
}

inline std::string to_string(control_branch b)
{
    return b == control_branch::transfer ? "transfer" : "blockade";
}

inline control_branch parse_control_branch(const std::string& s)
{
    if (s == "transfer")
        return control_branch::transfer;
    if (s == "blockade")
        return control_branch::blockade;
    throw invalid_parameter("unknown branch '" + s + "' (expected transfer or blockade)");
}

/// Frequency grid of the spectra scenario, in units of kappa.
struct GridSpec
{
    double lo = -4.0;
    double hi = 4.0;
    std::size_t points = 801;

    bool operator==(const GridSpec&) const = default;
};

struct SolverSpec
{
    double tol = 1e-9;
    std::size_t ensemble_atoms = 801;
    /* half-width of the discretized line, in units of delta_in */
    double span = 40.0;
    discretization_scheme scheme = discretization_scheme::quantile;
    /* integrator step budget per trace; exhausting it is a numerical failure */
    std::size_t max_steps = 20'000'000;

    bool operator==(const SolverSpec&) const = default;
};

struct EchoSpec
{
    /* inversion time after the pulse center */
    double tau = 50.0;
    /* tau = 6 duration + 20 / kappa, applied per sweep point */
    bool tau_auto = false;
    control_branch store_branch = control_branch::transfer;
    control_branch read_branch = control_branch::transfer;

    bool operator==(const EchoSpec&) const = default;
};

enum class efficiency_source { ideal, dynamics, custom };

inline std::string to_string(efficiency_source e)
{
    switch (e) {
    case efficiency_source::ideal: return "ideal";
    case efficiency_source::dynamics: return "dynamics";
    case efficiency_source::custom: return "custom";
    }
    return "unknown";
}

struct AddressConfig
{
    AddressSpec spec;
    efficiency_source source = efficiency_source::ideal;
    BranchEfficiencies custom;
    /* rephasing time used with source = dynamics */
    double tau = 0.0;

    bool operator==(const AddressConfig&) const = default;
};

/* parameters a sweep may vary */
inline const std::vector<std::string>& sweep_whitelist()
{
    static const std::vector<std::string> names = {
        "duration", "tau", "t2", "c_atom", "g1", "delta_c", "f2", "carrier_detuning"};
    return names;
}

struct SweepSpec
{
    std::string parameter;
    std::vector<double> values;
    /* optional second axis, one curve per value */
    std::string series_parameter;
    std::vector<double> series_values;
    /* also run the time-domain cycle (the frequency-domain value is always written) */
    bool time_domain = true;

    bool operator==(const SweepSpec&) const = default;
};

struct OutputSpec
{
    std::string path;
    output_format format = output_format::csv;

    bool operator==(const OutputSpec&) const = default;
};

struct ScenarioConfig
{
    scenario_kind scenario = scenario_kind::spectra;
    std::string label;
    bool has_params = false;
    SystemParams params;
    bool has_pulse = false;
    PulseSpec pulse;
    GridSpec grid;
    SolverSpec solver;
    EchoSpec echo;
    bool has_address = false;
    AddressConfig address;
    bool has_sweep = false;
    SweepSpec sweep;
    OutputSpec output;

    bool operator==(const ScenarioConfig&) const = default;
};

namespace detail {

inline int line_of(const YAML::Node& n)
{
    const auto m = n.Mark();
    return m.line >= 0 ? m.line + 1 : -1;
}

inline void check_keys(const YAML::Node& map, const std::string& where,
                       const std::vector<std::string>& allowed)
{
    if (!map.IsMap())
        throw config_error("'" + where + "' must be a mapping", line_of(map));
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed)
                list += (list.empty() ? "" : ", ") + a;
            throw config_error("unknown key '" + where + "." + key + "' (allowed: " +
                                   list + ")",
                               line_of(kv.first));
        }
    }
}

template <class T>
T read(const YAML::Node& map, const std::string& where, const std::string& key)
{
    const auto n = map[key];
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw config_error("'" + where + "." + key + "' has the wrong type", line_of(n));
    }
}

template <class T>
void read_opt(const YAML::Node& map, const std::string& where, const std::string& key,
              T& out)
{
    if (map[key])
        out = read<T>(map, where, key);
}

/* rethrows a validation error at the line of the field it names */
template <class Fn>
void anchored(const YAML::Node& map, const std::string& where, Fn&& fn)
{
    try {
        fn();
    } catch (const invalid_parameter& e) {
        std::string msg = e.what();
        const auto word = msg.substr(0, msg.find(' '));
        int line = line_of(map);
        if (map.IsMap() && map[word])
            line = line_of(map[word]);
        throw config_error(where + ": " + msg, line);
    }
}

inline std::complex<double> read_complex(const YAML::Node& n)
{
    try {
        if (n.IsSequence()) {
            if (n.size() != 2)
                throw config_error("complex amplitude must be [re, im]", line_of(n));
            return {n[0].as<double>(), n[1].as<double>()};
        }
        return {n.as<double>(), 0.0};
    } catch (const YAML::Exception&) {
        throw config_error("amplitude must be a number or [re, im]", line_of(n));
    }
}

inline SystemParams parse_params(const YAML::Node& n)
{
    check_keys(n, "params", {"kappa", "gamma", "g1", "g2", "f2", "n_atoms", "delta_in",
                             "delta_c", "t2", "unit_convention"});
    SystemParams p;
    read_opt(n, "params", "kappa", p.kappa);
    read_opt(n, "params", "gamma", p.gamma);
    read_opt(n, "params", "g1", p.g1);
    read_opt(n, "params", "g2", p.g2);
    read_opt(n, "params", "f2", p.f2);
    read_opt(n, "params", "n_atoms", p.n_atoms);
    read_opt(n, "params", "delta_in", p.delta_in);
    read_opt(n, "params", "delta_c", p.delta_c);
    read_opt(n, "params", "t2", p.t2);
    if (n["unit_convention"])
        anchored(n, "params", [&] {
            try {
                p.units = parse_unit_convention(
                    read<std::string>(n, "params", "unit_convention"));
            } catch (const invalid_parameter& e) {
                throw invalid_parameter(std::string("unit_convention: ") + e.what());
            }
        });
    else
        p.units = p.kappa == 1.0 ? unit_convention::kappa_normalized
                                 : unit_convention::absolute;
    anchored(n, "params", [&] { validate(p); });
    return p;
}

inline SystemParams parse_matched(const YAML::Node& n)
{
    check_keys(n, "matched", {"kappa", "c_atom", "gamma", "n_atoms", "t2"});
    double kappa = 1.0, c_atom = 0.0, gamma = -1.0, n_atoms = 1e6;
    double t2 = infinity;
    read_opt(n, "matched", "kappa", kappa);
    if (!n["c_atom"])
        throw config_error("'matched.c_atom' is required", line_of(n));
    c_atom = read<double>(n, "matched", "c_atom");
    read_opt(n, "matched", "gamma", gamma);
    read_opt(n, "matched", "n_atoms", n_atoms);
    read_opt(n, "matched", "t2", t2);
    SystemParams p;
    anchored(n, "matched", [&] {
        p = solve_matched_params(kappa, c_atom, gamma, n_atoms);
        p.t2 = t2;
        validate(p);
    });
    return p;
}

} // namespace detail

/// Parameter set from a YAML mapping with the SystemParams keys.
inline SystemParams parse_params_yaml(const std::string& text)
{
    YAML::Node n;
    try {
        n = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw config_error("malformed YAML: " + e.msg, e.mark.line + 1);
    }
    return detail::parse_params(n);
}

inline std::string serialize_params(const SystemParams& p)
{
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "kappa" << YAML::Value << p.kappa;
    out << YAML::Key << "gamma" << YAML::Value << p.gamma;
    out << YAML::Key << "g1" << YAML::Value << p.g1;
    out << YAML::Key << "g2" << YAML::Value << p.g2;
    out << YAML::Key << "f2" << YAML::Value << p.f2;
    out << YAML::Key << "n_atoms" << YAML::Value << p.n_atoms;
    out << YAML::Key << "delta_in" << YAML::Value << p.delta_in;
    out << YAML::Key << "delta_c" << YAML::Value << p.delta_c;
    out << YAML::Key << "t2" << YAML::Value << p.t2;
    out << YAML::Key << "unit_convention" << YAML::Value << to_string(p.units);
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

/**
 * Parses and validates a scenario file. Every failure is a config_error
 * carrying the 1-based line of the offending entry when one exists.
 */
inline ScenarioConfig parse_config(const std::string& text)
{
    using namespace detail;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw config_error("malformed YAML: " + e.msg, e.mark.line + 1);
    }
    if (!root || root.IsNull())
        throw config_error("empty configuration");
    check_keys(root, "config", {"scenario", "label", "params", "matched", "pulse",
                                "grid", "solver", "echo", "address", "sweep", "output"});

    ScenarioConfig cfg;
    if (!root["scenario"])
        throw config_error("'scenario' is required", line_of(root));
    anchored(root, "scenario", [&] {
        cfg.scenario = parse_scenario_kind(read<std::string>(root, "config", "scenario"));
    });
    read_opt(root, "config", "label", cfg.label);

    if (root["params"] && root["matched"])
        throw config_error("give either 'params' or 'matched', not both",
                           line_of(root["matched"]));
    if (root["params"]) {
        cfg.params = parse_params(root["params"]);
        cfg.has_params = true;
    } else if (root["matched"]) {
        cfg.params = parse_matched(root["matched"]);
        cfg.has_params = true;
    }

    if (const auto n = root["pulse"]) {
        check_keys(n, "pulse", {"shape", "duration", "center", "carrier_detuning"});
        if (n["shape"])
            anchored(n, "pulse", [&] {
                cfg.pulse.shape = parse_pulse_shape(read<std::string>(n, "pulse", "shape"));
            });
        read_opt(n, "pulse", "duration", cfg.pulse.duration);
        read_opt(n, "pulse", "center", cfg.pulse.center);
        read_opt(n, "pulse", "carrier_detuning", cfg.pulse.carrier_detuning);
        anchored(n, "pulse", [&] { cfg.pulse.validate(); });
        cfg.has_pulse = true;
    }

    if (const auto n = root["grid"]) {
        check_keys(n, "grid", {"lo", "hi", "points"});
        read_opt(n, "grid", "lo", cfg.grid.lo);
        read_opt(n, "grid", "hi", cfg.grid.hi);
        read_opt(n, "grid", "points", cfg.grid.points);
        if (!(cfg.grid.hi > cfg.grid.lo) || cfg.grid.points < 2)
            throw config_error("grid needs lo < hi and at least 2 points", line_of(n));
    }

    if (const auto n = root["solver"]) {
        check_keys(n, "solver", {"tol", "ensemble_atoms", "span", "scheme", "max_steps"});
        read_opt(n, "solver", "tol", cfg.solver.tol);
        read_opt(n, "solver", "ensemble_atoms", cfg.solver.ensemble_atoms);
        read_opt(n, "solver", "span", cfg.solver.span);
        read_opt(n, "solver", "max_steps", cfg.solver.max_steps);
        if (n["scheme"])
            anchored(n, "solver", [&] {
                cfg.solver.scheme =
                    parse_discretization_scheme(read<std::string>(n, "solver", "scheme"));
            });
        if (!(cfg.solver.tol > 0) || cfg.solver.tol > 1e-8)
            throw config_error("'solver.tol' must lie in (0, 1e-8]", line_of(n["tol"]));
        if (cfg.solver.max_steps < 1)
            throw config_error("'solver.max_steps' must be >= 1", line_of(n["max_steps"]));
        if (cfg.solver.ensemble_atoms < 16)
            throw config_error("'solver.ensemble_atoms' must be >= 16",
                               line_of(n["ensemble_atoms"]));
        if (!(cfg.solver.span >= min_span_ratio))
            throw config_error("'solver.span' must be >= 20 (units of delta_in)",
                               line_of(n["span"]));
    }

    if (cfg.scenario == scenario_kind::blockade)
        cfg.echo.read_branch = control_branch::blockade;
    if (const auto n = root["echo"]) {
        check_keys(n, "echo", {"tau", "store_branch", "read_branch"});
        if (n["tau"]) {
            const auto v = read<std::string>(n, "echo", "tau");
            if (v == "auto")
                cfg.echo.tau_auto = true;
            else
                cfg.echo.tau = read<double>(n, "echo", "tau");
        }
        anchored(n, "echo", [&] {
            if (n["store_branch"])
                cfg.echo.store_branch =
                    parse_control_branch(read<std::string>(n, "echo", "store_branch"));
            if (n["read_branch"])
                cfg.echo.read_branch =
                    parse_control_branch(read<std::string>(n, "echo", "read_branch"));
        });
        if (!cfg.echo.tau_auto && !(cfg.echo.tau > 0))
            throw config_error("'echo.tau' must be > 0 or 'auto'", line_of(n["tau"]));
    }

    if (const auto n = root["address"]) {
        check_keys(n, "address", {"cells", "amplitudes", "bin_spacing", "bin_duration",
                                  "efficiencies", "tau", "transfer", "blockade",
                                  "leakage"});
        auto& a = cfg.address;
        const auto amps = n["amplitudes"];
        if (!amps)
            throw config_error("'address.amplitudes' is required", line_of(n));
        if (amps.IsScalar() && amps.as<std::string>() == "uniform") {
            if (!n["cells"])
                throw config_error("'address.cells' is required with uniform amplitudes",
                                   line_of(amps));
            const int m = read<int>(n, "address", "cells");
            if (m < 1)
                throw config_error("'address.cells' must be >= 1", line_of(n["cells"]));
            a.spec.amplitudes.assign(std::size_t(m),
                                     std::complex<double>(1.0 / std::sqrt(double(m)), 0.0));
        } else if (amps.IsSequence()) {
            for (const auto& v : amps)
                a.spec.amplitudes.push_back(read_complex(v));
            if (n["cells"] && read<int>(n, "address", "cells") != a.spec.size())
                throw config_error("'address.cells' disagrees with the amplitude count",
                                   line_of(n["cells"]));
        } else {
            throw config_error("'address.amplitudes' must be a list or 'uniform'",
                               line_of(amps));
        }
        read_opt(n, "address", "bin_spacing", a.spec.bin_spacing);
        read_opt(n, "address", "bin_duration", a.spec.bin_duration);
        anchored(n, "address", [&] { a.spec.validate(); });
        if (n["efficiencies"]) {
            const auto s = read<std::string>(n, "address", "efficiencies");
            if (s == "ideal")
                a.source = efficiency_source::ideal;
            else if (s == "dynamics")
                a.source = efficiency_source::dynamics;
            else if (s == "custom")
                a.source = efficiency_source::custom;
            else
                throw config_error("'address.efficiencies' must be ideal, dynamics or custom",
                                   line_of(n["efficiencies"]));
        }
        read_opt(n, "address", "tau", a.tau);
        if (n["transfer"])
            a.custom.transfer_amplitude = read_complex(n["transfer"]);
        if (n["blockade"])
            a.custom.blockade_reflection_amplitude = read_complex(n["blockade"]);
        if (n["leakage"])
            a.custom.leakage_amplitude = read_complex(n["leakage"]);
        if ((n["transfer"] || n["blockade"] || n["leakage"]) &&
            a.source != efficiency_source::custom)
            throw config_error("branch amplitudes need 'efficiencies: custom'", line_of(n));
        anchored(n, "address", [&] { a.custom.validate(); });
        if (a.source == efficiency_source::dynamics && !cfg.has_params)
            throw config_error("'efficiencies: dynamics' needs 'params' or 'matched'",
                               line_of(n["efficiencies"]));
        cfg.has_address = true;
    }

    if (const auto n = root["sweep"]) {
        check_keys(n, "sweep", {"parameter", "values", "series", "time_domain"});
        auto& s = cfg.sweep;
        auto whitelist_error = [](const std::string& name, int line) {
            std::string list;
            for (const auto& w : sweep_whitelist())
                list += (list.empty() ? "" : ", ") + w;
            return config_error("cannot sweep '" + name + "' (sweepable: " + list + ")",
                                line);
        };
        auto on_list = [](const std::string& name) {
            const auto& w = sweep_whitelist();
            return std::find(w.begin(), w.end(), name) != w.end();
        };
        auto read_values = [&](const YAML::Node& m, const std::string& where) {
            const auto v = m["values"];
            if (!v || !v.IsSequence())
                throw config_error("'" + where + ".values' must be a list", line_of(m));
            if (v.size() == 0)
                throw config_error("'" + where + ".values' is empty", line_of(v));
            std::vector<double> out;
            for (const auto& x : v) {
                try {
                    out.push_back(x.as<double>());
                } catch (const YAML::Exception&) {
                    throw config_error("sweep values must be numbers", line_of(x));
                }
            }
            return out;
        };
        if (!n["parameter"])
            throw config_error("'sweep.parameter' is required", line_of(n));
        s.parameter = read<std::string>(n, "sweep", "parameter");
        if (!on_list(s.parameter))
            throw whitelist_error(s.parameter, line_of(n["parameter"]));
        s.values = read_values(n, "sweep");
        read_opt(n, "sweep", "time_domain", s.time_domain);
        if (const auto m = n["series"]) {
            check_keys(m, "sweep.series", {"parameter", "values"});
            if (!m["parameter"])
                throw config_error("'sweep.series.parameter' is required", line_of(m));
            s.series_parameter = read<std::string>(m, "sweep.series", "parameter");
            if (!on_list(s.series_parameter))
                throw whitelist_error(s.series_parameter, line_of(m["parameter"]));
            if (s.series_parameter == s.parameter)
                throw config_error("series parameter equals the swept parameter",
                                   line_of(m["parameter"]));
            s.series_values = read_values(m, "sweep.series");
        }
        cfg.has_sweep = true;
    }

    if (const auto n = root["output"]) {
        check_keys(n, "output", {"path", "format"});
        read_opt(n, "output", "path", cfg.output.path);
        if (n["format"])
            anchored(n, "output", [&] {
                cfg.output.format =
                    parse_output_format(read<std::string>(n, "output", "format"));
            });
    }

    /* scenario-required blocks */
    const int top = line_of(root["scenario"]);
    auto require = [&](bool present, const std::string& what) {
        if (!present)
            throw config_error("scenario '" + to_string(cfg.scenario) + "' needs " + what,
                               top);
    };
    switch (cfg.scenario) {
    case scenario_kind::spectra:
    case scenario_kind::check_matching:
        require(cfg.has_params, "'params' or 'matched'");
        break;
    case scenario_kind::store:
        require(cfg.has_params, "'params' or 'matched'");
        require(cfg.has_pulse, "'pulse'");
        break;
    case scenario_kind::echo_cycle:
    case scenario_kind::blockade:
        require(cfg.has_params, "'params' or 'matched'");
        require(cfg.has_pulse, "'pulse'");
        require(bool(root["echo"]) || cfg.scenario == scenario_kind::blockade, "'echo'");
        break;
    case scenario_kind::address:
        require(cfg.has_address, "'address'");
        break;
    case scenario_kind::sweep:
        require(cfg.has_params, "'params' or 'matched'");
        require(cfg.has_pulse, "'pulse'");
        require(cfg.has_sweep, "'sweep'");
        break;
    }
    if (cfg.scenario == scenario_kind::spectra && cfg.params.f2 == 0.0)
        throw config_error("spectra need f2 > 0", top);
    if (cfg.scenario == scenario_kind::check_matching && cfg.params.g2 == 0.0)
        throw config_error("matching check needs g2 > 0", top);
    return cfg;
}

/// Canonical YAML rendering; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const ScenarioConfig& c)
{
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "scenario" << YAML::Value << to_string(c.scenario);
    if (!c.label.empty())
        out << YAML::Key << "label" << YAML::Value << YAML::DoubleQuoted << c.label;
    if (c.has_params) {
        const auto& p = c.params;
        out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "kappa" << YAML::Value << p.kappa;
        out << YAML::Key << "gamma" << YAML::Value << p.gamma;
        out << YAML::Key << "g1" << YAML::Value << p.g1;
        out << YAML::Key << "g2" << YAML::Value << p.g2;
        out << YAML::Key << "f2" << YAML::Value << p.f2;
        out << YAML::Key << "n_atoms" << YAML::Value << p.n_atoms;
        out << YAML::Key << "delta_in" << YAML::Value << p.delta_in;
        out << YAML::Key << "delta_c" << YAML::Value << p.delta_c;
        out << YAML::Key << "t2" << YAML::Value << p.t2;
        out << YAML::Key << "unit_convention" << YAML::Value << to_string(p.units);
        out << YAML::EndMap;
    }
    if (c.has_pulse) {
        out << YAML::Key << "pulse" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "shape" << YAML::Value << to_string(c.pulse.shape);
        out << YAML::Key << "duration" << YAML::Value << c.pulse.duration;
        out << YAML::Key << "center" << YAML::Value << c.pulse.center;
        out << YAML::Key << "carrier_detuning" << YAML::Value << c.pulse.carrier_detuning;
        out << YAML::EndMap;
    }
    out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "lo" << YAML::Value << c.grid.lo;
    out << YAML::Key << "hi" << YAML::Value << c.grid.hi;
    out << YAML::Key << "points" << YAML::Value << c.grid.points;
    out << YAML::EndMap;
    out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "tol" << YAML::Value << c.solver.tol;
    out << YAML::Key << "ensemble_atoms" << YAML::Value << c.solver.ensemble_atoms;
    out << YAML::Key << "span" << YAML::Value << c.solver.span;
    out << YAML::Key << "scheme" << YAML::Value << to_string(c.solver.scheme);
    out << YAML::Key << "max_steps" << YAML::Value << c.solver.max_steps;
    out << YAML::EndMap;
    out << YAML::Key << "echo" << YAML::Value << YAML::BeginMap;
    if (c.echo.tau_auto)
        out << YAML::Key << "tau" << YAML::Value << "auto";
    else
        out << YAML::Key << "tau" << YAML::Value << c.echo.tau;
    out << YAML::Key << "store_branch" << YAML::Value << to_string(c.echo.store_branch);
    out << YAML::Key << "read_branch" << YAML::Value << to_string(c.echo.read_branch);
    out << YAML::EndMap;
    auto emit_complex = [&](std::complex<double> z) {
        out << YAML::Flow << YAML::BeginSeq << z.real() << z.imag() << YAML::EndSeq;
    };
    if (c.has_address) {
        const auto& a = c.address;
        out << YAML::Key << "address" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "amplitudes" << YAML::Value << YAML::BeginSeq;
        for (const auto& z : a.spec.amplitudes)
            emit_complex(z);
        out << YAML::EndSeq;
        out << YAML::Key << "bin_spacing" << YAML::Value << a.spec.bin_spacing;
        out << YAML::Key << "bin_duration" << YAML::Value << a.spec.bin_duration;
        out << YAML::Key << "efficiencies" << YAML::Value << to_string(a.source);
        out << YAML::Key << "tau" << YAML::Value << a.tau;
        if (a.source == efficiency_source::custom) {
            out << YAML::Key << "transfer" << YAML::Value;
            emit_complex(a.custom.transfer_amplitude);
            out << YAML::Key << "blockade" << YAML::Value;
            emit_complex(a.custom.blockade_reflection_amplitude);
            out << YAML::Key << "leakage" << YAML::Value;
            emit_complex(a.custom.leakage_amplitude);
        }
        out << YAML::EndMap;
    }
    if (c.has_sweep) {
        const auto& s = c.sweep;
        out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "parameter" << YAML::Value << s.parameter;
        out << YAML::Key << "values" << YAML::Value << YAML::Flow << s.values;
        out << YAML::Key << "time_domain" << YAML::Value << s.time_domain;
        if (!s.series_parameter.empty()) {
            out << YAML::Key << "series" << YAML::Value << YAML::BeginMap;
            out << YAML::Key << "parameter" << YAML::Value << s.series_parameter;
            out << YAML::Key << "values" << YAML::Value << YAML::Flow << s.series_values;
            out << YAML::EndMap;
        }
        out << YAML::EndMap;
    }
    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    if (!c.output.path.empty())
        out << YAML::Key << "path" << YAML::Value << c.output.path;
    out << YAML::Key << "format" << YAML::Value << to_string(c.output.format);
    out << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

inline std::string config_hash(const ScenarioConfig& c)
{
    return fnv1a_hex(serialize_config(c));
}

} // namespace qram

#endif
