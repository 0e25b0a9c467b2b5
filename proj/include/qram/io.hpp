#ifndef QRAM_IO_HPP
#define QRAM_IO_HPP

#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "addressing.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "version.hpp"

namespace qram {

/// Identification stamped on every artifact.
struct Provenance
{
    std::string label;
    std::string param_hash;
    std::string unit_convention;
    std::string config_hash;
    std::string tool_version = version_string;
    double solver_tol = 0.0;
};

/* key/value pairs reported alongside the data */
using Summary = std::vector<std::pair<std::string, std::string>>;

inline std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

/// Column-oriented table with a provenance header.
struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

inline void write_csv(std::ostream& os, const Provenance& prov, const Summary& summary,
                      const Table& table)
{
    os << "# label: " << prov.label << '\n'
       << "# tool_version: " << prov.tool_version << '\n'
       << "# config_hash: " << prov.config_hash << '\n'
       << "# param_hash: " << prov.param_hash << '\n'
       << "# unit_convention: " << prov.unit_convention << '\n'
       << "# solver_tol: " << fmt(prov.solver_tol) << '\n';
    for (const auto& [k, v] : summary)
        os << "# " << k << ": " << v << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        os << (i ? "," : "") << table.columns[i];
    os << '\n';
    for (const auto& r : table.rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            os << (i ? "," : "") << r[i];
        os << '\n';
    }
}

inline nlohmann::json provenance_json(const Provenance& prov)
{
    return {{"label", prov.label},
            {"tool_version", prov.tool_version},
            {"config_hash", prov.config_hash},
            {"param_hash", prov.param_hash},
            {"unit_convention", prov.unit_convention},
            {"solver_tol", prov.solver_tol}};
}

/* numeric strings go out as numbers */
inline nlohmann::json cell_json(const std::string& s)
{
    if (s.empty())
        return s;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end && *end == '\0')
        return v;
    return s;
}

inline void write_json(std::ostream& os, const Provenance& prov, const Summary& summary,
                       const Table& table, nlohmann::json extra = nullptr)
{
    nlohmann::json j;
    j["provenance"] = provenance_json(prov);
    nlohmann::json sum = nlohmann::json::object();
    for (const auto& [k, v] : summary)
        sum[k] = cell_json(v);
    j["summary"] = sum;
    nlohmann::json cols = nlohmann::json::object();
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        nlohmann::json col = nlohmann::json::array();
        for (const auto& r : table.rows)
            col.push_back(cell_json(r[c]));
        cols[table.columns[c]] = col;
    }
    j["columns"] = cols;
    if (!extra.is_null())
        j["data"] = std::move(extra);
    os << j.dump() << '\n';
}

/// Long format (time, series, re, im) of every amplitude in a trace.
inline Table trace_table(const SimulationTrace& tr)
{
    Table t;
    t.columns = {"time", "series", "re", "im"};
    auto add = [&](const char* name, const std::vector<cplx>& v) {
        for (std::size_t k = 0; k < tr.times.size(); ++k)
            t.rows.push_back({fmt(tr.times[k]), name, fmt(v[k].real()), fmt(v[k].imag())});
    };
    add("a1", tr.a1);
    add("a2", tr.a2);
    add("beta_c", tr.beta_c);
    add("alpha_in", tr.alpha_in);
    add("alpha_out", tr.alpha_out);
    auto addp = [&](const char* name, double ProbabilityLedger::*field) {
        for (std::size_t k = 0; k < tr.times.size(); ++k)
            t.rows.push_back({fmt(tr.times[k]), name, fmt(tr.probabilities[k].*field), "0"});
    };
    addp("p_cavity1", &ProbabilityLedger::cavity1);
    addp("p_cavity2", &ProbabilityLedger::cavity2);
    addp("p_control", &ProbabilityLedger::control);
    addp("p_ensemble", &ProbabilityLedger::ensemble);
    addp("p_output", &ProbabilityLedger::output);
    addp("p_control_loss", &ProbabilityLedger::control_loss);
    addp("p_dephasing_loss", &ProbabilityLedger::dephasing_loss);
    addp("p_input_remaining", &ProbabilityLedger::input_remaining);
    return t;
}

/// Spectrum as (nu, re, im) rows.
inline Table spectrum_table(const ComplexSpectrum& s)
{
    Table t;
    t.columns = {"nu", "re", "im"};
    for (std::size_t i = 0; i < s.values.size(); ++i)
        t.rows.push_back({fmt(s.grid[i]), fmt(s.values[i].real()), fmt(s.values[i].imag())});
    return t;
}

/// Provenance header of a spectrum: its label names the quantity.
inline Provenance spectrum_provenance(const ComplexSpectrum& s, const SystemParams& p)
{
    Provenance prov;
    prov.label = to_string(s.label);
    prov.param_hash = param_hash(p);
    prov.unit_convention = to_string(p.units);
    return prov;
}

inline nlohmann::json state_json(const QramState& s)
{
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : s.terms) {
        std::string cells;
        for (const auto& c : t.cells)
            cells += c.occupied ? '1' : '0';
        nlohmann::json emitted = nlohmann::json::array();
        for (const auto& e : t.emitted)
            emitted.push_back(e.str());
        terms.push_back({{"re", t.amplitude.real()},
                         {"im", t.amplitude.imag()},
                         {"control", to_string(t.control)},
                         {"cells", cells},
                         {"emitted", emitted}});
    }
    nlohmann::json losses = nlohmann::json::object();
    for (const auto& [k, v] : s.losses)
        losses[k] = v;
    return {{"cells", s.n_cells}, {"norm", s.norm()}, {"losses", losses}, {"terms", terms}};
}

/// Writes text to path, creating parent directories.
inline void write_file(const std::string& path, const std::string& text)
{
    const std::filesystem::path p(path);
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f)
        throw error("cannot open '" + path + "' for writing");
    f << text;
    if (!f)
        throw error("write to '" + path + "' failed");
}

} // namespace qram

#endif
