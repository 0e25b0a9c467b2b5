#ifndef QRAM_ADDRESSING_HPP
#define QRAM_ADDRESSING_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "params.hpp"

namespace qram {

/* Sign rules of the protocol. Their product over one bin gives the
   overall -alpha_n of the final state. */
inline constexpr double raman_absorption_phase = -1.0;
inline constexpr double echo_emission_phase = -1.0;
inline constexpr double control_reset_phase = -1.0;
/* pi shift of a stored coherence whose echo was blockaded */
inline constexpr double blockade_coherence_phase = -1.0;

inline constexpr double addressing_norm_tol = 1e-12;
inline constexpr double max_bin_duty = 0.1;

enum class control_level {
    g_c,  // ground: blockades cavity 1
    au_c, // ancillary: decoupled, holds the absorbed address photon
    e_c,  // excited: transient during the reset
};

inline std::string to_string(control_level c)
{
    switch (c) {
    case control_level::g_c: return "g_c";
    case control_level::au_c: return "au_c";
    case control_level::e_c: return "e_c";
    }
    return "unknown";
}

/// One memory cell within one term of the superposition.
struct Cell
{
    int index = 0;
    double time_label = 0.0;
    bool occupied = true;
    std::string payload;
    /* blockaded readouts seen so far; each one is a factor -1 on the
       coherence, kept in the label rather than in the amplitude */
    int blockade_count = 0;

    bool operator==(const Cell&) const = default;
};

enum class photon_kind {
    address,   // psi^a_n, address photon re-emitted from bin n
    retrieved, // psi_in,m, payload photon of cell m
};

struct PhotonLabel
{
    photon_kind kind = photon_kind::address;
    int index = 0;
    std::string payload; // retrieved photons only

    bool operator==(const PhotonLabel&) const = default;

    std::string str() const
    {
        if (kind == photon_kind::address)
            return "a" + std::to_string(index);
        return "in" + std::to_string(index) + "(" + payload + ")";
    }
};

inline bool operator<(const PhotonLabel& a, const PhotonLabel& b)
{
    if (a.kind != b.kind)
        return a.kind < b.kind;
    if (a.index != b.index)
        return a.index < b.index;
    return a.payload < b.payload;
}

struct QramTerm
{
    std::complex<double> amplitude = 1.0;
    control_level control = control_level::g_c;
    std::vector<Cell> cells;
    /* kept sorted */
    std::vector<PhotonLabel> emitted;
    /* address bin still travelling towards the atom, 0 if none */
    int incoming_bin = 0;
    /* address bin held by the control atom, 0 if none */
    int absorbed_bin = 0;

    /// Label of the term without its amplitude.
    std::string key() const
    {
        std::ostringstream os;
        os << to_string(control) << '|';
        for (const auto& c : cells)
            os << (c.occupied ? "D" : "0") << c.index << '^' << c.blockade_count
               << ':' << c.payload << ',';
        os << '|';
        for (const auto& e : emitted)
            os << e.str() << ',';
        os << '|' << incoming_bin << '|' << absorbed_bin;
        return os.str();
    }

    int empty_cells() const
    {
        return int(std::count_if(cells.begin(), cells.end(),
                                 [](const Cell& c) { return !c.occupied; }));
    }
};

/// Superposition over cell occupancies, control level and emitted photons.
struct QramState
{
    std::vector<QramTerm> terms;
    int n_cells = 0;
    /* address bins already processed */
    std::set<int> consumed_bins;
    /* cells whose readout has been attempted */
    std::set<int> rephased_cells;
    /* probability removed from the terms, per named channel */
    std::map<std::string, double> losses;
    bool address_injected = false;

    double norm() const
    {
        double s = 0.0;
        for (const auto& t : terms)
            s += std::norm(t.amplitude);
        return s;
    }

    double total_loss() const
    {
        double s = 0.0;
        for (const auto& [name, v] : losses)
            s += v;
        return s;
    }
};

/// Time-bin address photon sum_n alpha_n |psi^a_n>.
struct AddressSpec
{
    std::vector<std::complex<double>> amplitudes;
    double bin_spacing = 1.0;
    double bin_duration = 0.01;

    int size() const { return int(amplitudes.size()); }

    bool operator==(const AddressSpec&) const = default;

    void validate() const
    {
        if (amplitudes.empty())
            throw invalid_parameter("address needs at least one bin");
        double s = 0.0;
        for (const auto& a : amplitudes)
            s += std::norm(a);
        if (std::abs(s - 1.0) > addressing_norm_tol)
            throw invalid_parameter("address amplitudes are not normalized (sum |a|^2 = " +
                                    std::to_string(s) + ")");
        if (!(bin_spacing > 0) || !(bin_duration > 0))
            throw invalid_parameter("bin spacing and duration must be > 0");
        if (bin_duration > max_bin_duty * bin_spacing)
            throw invalid_parameter("bin duration must be at most 0.1 of the bin spacing");
    }
};

/// Amplitudes of the two readout branches.
struct BranchEfficiencies
{
    /* echo amplitude of the transfer branch, without the echo sign */
    std::complex<double> transfer_amplitude = 1.0;
    /* echo reflected back into the memory by the blockaded cavity */
    std::complex<double> blockade_reflection_amplitude = -1.0;
    /* echo leaking past the blockade */
    std::complex<double> leakage_amplitude = 0.0;

    bool operator==(const BranchEfficiencies&) const = default;

    void validate() const
    {
        if (std::norm(transfer_amplitude) > 1 + addressing_norm_tol)
            throw invalid_parameter("|transfer amplitude|^2 exceeds 1");
        if (std::norm(blockade_reflection_amplitude) + std::norm(leakage_amplitude) >
            1 + addressing_norm_tol)
            throw invalid_parameter("blockade reflection and leakage exceed unit probability");
    }
};

namespace detail {

inline void merge_terms(QramState& s)
{
    std::map<std::string, QramTerm> merged;
    for (auto& t : s.terms) {
        auto k = t.key();
        auto it = merged.find(k);
        if (it == merged.end())
            merged.emplace(std::move(k), std::move(t));
        else
            it->second.amplitude += t.amplitude;
    }
    s.terms.clear();
    for (auto& [k, t] : merged)
        if (t.amplitude != 0.0)
            s.terms.push_back(std::move(t));
}

/* norm plus recorded losses must stay at its starting value */
inline void check_budget(const QramState& s, double expected, const char* step)
{
    const double total = s.norm() + s.total_loss();
    if (std::abs(total - expected) > addressing_norm_tol)
        throw numerical_error(std::string(step) + ": norm + losses = " +
                              std::to_string(total) + ", expected " +
                              std::to_string(expected));
}

inline void add_loss(QramState& s, const std::string& channel, double p)
{
    if (p > 0)
        s.losses[channel] += p;
}

} // namespace detail

/// All M cells hold their payloads; control atom in g_c; no photons out.
inline QramState store_sequence(int m, const std::vector<std::string>& payload_labels,
                                double cell_spacing = 1.0)
{
    if (m < 1)
        throw invalid_parameter("need at least one memory cell");
    if (int(payload_labels.size()) != m)
        throw invalid_parameter("need one payload label per cell");
    std::set<std::string> seen(payload_labels.begin(), payload_labels.end());
    if (int(seen.size()) != m)
        throw invalid_parameter("payload labels must be distinct");

    QramTerm t;
    for (int i = 0; i < m; ++i)
        t.cells.push_back({i + 1, cell_spacing * (i + 1), true, payload_labels[i], 0});
    QramState s;
    s.n_cells = m;
    s.terms.push_back(std::move(t));
    return s;
}

/// Default payload labels psi1, psi2, ...
inline std::vector<std::string> default_payloads(int m)
{
    std::vector<std::string> out;
    for (int i = 1; i <= m; ++i)
        out.push_back("psi" + std::to_string(i));
    return out;
}

/// Sends the address photon towards the control atom: each term splits
/// into one branch per bin.
inline QramState inject_address(QramState s, const AddressSpec& addr)
{
    addr.validate();
    if (addr.size() != s.n_cells)
        throw invalid_parameter("address length differs from the number of cells");
    if (s.address_injected)
        throw invalid_parameter("address photon already injected");
    const double before = s.norm() + s.total_loss();
    std::vector<QramTerm> out;
    for (const auto& t : s.terms)
        for (int n = 1; n <= addr.size(); ++n) {
            const auto a = addr.amplitudes[std::size_t(n - 1)];
            if (a == 0.0)
                continue;
            QramTerm u = t;
            u.amplitude *= a;
            u.incoming_bin = n;
            out.push_back(std::move(u));
        }
    s.terms = std::move(out);
    s.address_injected = true;
    detail::merge_terms(s);
    detail::check_budget(s, before, "inject_address");
    return s;
}

/**
 * Raman absorption of address bin n: branches whose photon sits in bin n
 * move the control atom to au_c with a factor -1; all others keep g_c.
 */
inline QramState absorb_address_bin(QramState s, int n, const AddressSpec& addr)
{
    if (n < 1 || n > s.n_cells)
        throw invalid_parameter("address bin " + std::to_string(n) + " out of range");
    if (s.consumed_bins.count(n))
        throw invalid_parameter("address bin " + std::to_string(n) + " already consumed");
    if (!s.address_injected)
        s = inject_address(std::move(s), addr);
    for (const auto& t : s.terms)
        if (t.control != control_level::g_c)
            throw invalid_parameter(
                "control atom must be reset before the next address bin");
    const double before = s.norm() + s.total_loss();
    for (auto& t : s.terms)
        if (t.incoming_bin == n) {
            t.amplitude *= raman_absorption_phase;
            t.control = control_level::au_c;
            t.incoming_bin = 0;
            t.absorbed_bin = n;
        }
    s.consumed_bins.insert(n);
    detail::merge_terms(s);
    detail::check_budget(s, before, "absorb_address_bin");
    return s;
}

/**
 * Readout attempt of cell m. With the control atom in au_c the echo
 * leaves (transfer branch, factor echo sign * transfer amplitude); with
 * g_c it is blockaded and reabsorbed, leaving the cell occupied with a
 * pi-shifted coherence.
 */
inline QramState rephase_cell(QramState s, int m, const BranchEfficiencies& eff = {})
{
    eff.validate();
    if (m < 1 || m > s.n_cells)
        throw invalid_parameter("cell " + std::to_string(m) + " out of range");
    if (s.rephased_cells.count(m))
        throw invalid_parameter("cell " + std::to_string(m) + " already rephased");
    const double before = s.norm() + s.total_loss();
    const auto blockade_factor = eff.blockade_reflection_amplitude / blockade_coherence_phase;
    for (auto& t : s.terms) {
        Cell& c = t.cells[std::size_t(m - 1)];
        if (!c.occupied)
            throw invalid_parameter("cell " + std::to_string(m) + " is already empty");
        const double w = std::norm(t.amplitude);
        if (t.control == control_level::au_c) {
            t.amplitude *= echo_emission_phase * eff.transfer_amplitude;
            c.occupied = false;
            t.emitted.push_back({photon_kind::retrieved, m, c.payload});
            std::sort(t.emitted.begin(), t.emitted.end());
            detail::add_loss(s, "transfer_loss", w * (1 - std::norm(eff.transfer_amplitude)));
        } else if (t.control == control_level::g_c) {
            t.amplitude *= blockade_factor;
            ++c.blockade_count;
            detail::add_loss(s, "blockade_leakage", w * std::norm(eff.leakage_amplitude));
            detail::add_loss(s, "blockade_scattering",
                             w * (1 - std::norm(eff.blockade_reflection_amplitude) -
                                  std::norm(eff.leakage_amplitude)));
        } else {
            throw invalid_parameter("control atom in e_c during a readout");
        }
    }
    s.rephased_cells.insert(m);
    detail::merge_terms(s);
    detail::check_budget(s, before, "rephase_cell");
    return s;
}

/**
 * Returns the control atom from au_c to g_c through e_c, re-emitting the
 * address photon of bin n with a factor -1. A state without au_c terms
 * is returned unchanged.
 */
inline QramState reset_control(QramState s, int n)
{
    const double before = s.norm() + s.total_loss();
    for (auto& t : s.terms) {
        if (t.control != control_level::au_c)
            continue;
        if (t.absorbed_bin != n || !s.consumed_bins.count(n))
            throw invalid_parameter("au_c term does not hold address bin " +
                                    std::to_string(n));
        t.amplitude *= control_reset_phase;
        t.control = control_level::g_c;
        t.absorbed_bin = 0;
        t.emitted.push_back({photon_kind::address, n, {}});
        std::sort(t.emitted.begin(), t.emitted.end());
    }
    detail::merge_terms(s);
    detail::check_budget(s, before, "reset_control");
    return s;
}

/* called after every protocol step with a short step name */
using addressing_observer = std::function<void(const std::string&, const QramState&)>;

/// Absorb bin n, read cell n, reset the atom, for n = 1..M.
inline QramState run_addressing(int m, const AddressSpec& addr,
                                const BranchEfficiencies& eff = {},
                                const std::vector<std::string>& payloads = {},
                                const addressing_observer& observe = nullptr)
{
    addr.validate();
    eff.validate();
    if (addr.size() != m)
        throw invalid_parameter("address length must equal the number of cells");
    QramState s = store_sequence(m, payloads.empty() ? default_payloads(m) : payloads,
                                 addr.bin_spacing);
    if (observe)
        observe("store", s);
    s = inject_address(std::move(s), addr);
    if (observe)
        observe("inject", s);
    for (int n = 1; n <= m; ++n) {
        s = absorb_address_bin(std::move(s), n, addr);
        if (observe)
            observe("absorb " + std::to_string(n), s);
        s = rephase_cell(std::move(s), n, eff);
        if (observe)
            observe("rephase " + std::to_string(n), s);
        s = reset_control(std::move(s), n);
        if (observe)
            observe("reset " + std::to_string(n), s);
    }
    return s;
}

/**
 * Closed form of the ideal protocol output:
 *   sum_n (-alpha_n) |g_c> |0_n> |psi^a_n> |psi_in,n> prod_{m != n} |D_m>,
 * every untouched cell carrying one blockaded readout.
 */
inline QramState ideal_addressing_output(int m, const AddressSpec& addr,
                                         const std::vector<std::string>& payloads = {})
{
    addr.validate();
    if (addr.size() != m)
        throw invalid_parameter("address length must equal the number of cells");
    const auto labels = payloads.empty() ? default_payloads(m) : payloads;
    QramState s = store_sequence(m, labels, addr.bin_spacing);
    const QramTerm base = s.terms.front();
    s.terms.clear();
    for (int n = 1; n <= m; ++n) {
        const auto a = addr.amplitudes[std::size_t(n - 1)];
        if (a == 0.0)
            continue;
        QramTerm t = base;
        t.amplitude = -a;
        for (auto& c : t.cells) {
            if (c.index == n)
                c.occupied = false;
            else
                c.blockade_count = 1;
        }
        t.emitted = {{photon_kind::address, n, {}},
                     {photon_kind::retrieved, n, labels[std::size_t(n - 1)]}};
        std::sort(t.emitted.begin(), t.emitted.end());
        s.terms.push_back(std::move(t));
    }
    for (int n = 1; n <= m; ++n) {
        s.consumed_bins.insert(n);
        s.rephased_cells.insert(n);
    }
    s.address_injected = true;
    detail::merge_terms(s);
    return s;
}

/// Term-by-term comparison: same labels, amplitudes within tol.
inline bool same_terms(const QramState& a, const QramState& b, double tol = 1e-12)
{
    if (a.terms.size() != b.terms.size())
        return false;
    std::map<std::string, std::complex<double>> lhs;
    for (const auto& t : a.terms)
        lhs[t.key()] = t.amplitude;
    for (const auto& t : b.terms) {
        auto it = lhs.find(t.key());
        if (it == lhs.end() || std::abs(it->second - t.amplitude) > tol)
            return false;
    }
    return true;
}

/// True if some term pairs address photon n with the payload of cell m != n.
inline bool has_cross_pairing(const QramState& s)
{
    for (const auto& t : s.terms) {
        std::vector<int> addr, ret;
        for (const auto& e : t.emitted)
            (e.kind == photon_kind::address ? addr : ret).push_back(e.index);
        for (int a : addr)
            for (int r : ret)
                if (a != r)
                    return true;
    }
    return false;
}

/**
 * Branch amplitudes for a matched parameter set at rephasing time tau:
 * transfer exp(-2 tau/T2), blockade reflection -2C/(1+2C), leakage
 * 1/(1+2C).
 */
inline BranchEfficiencies compose_with_dynamics(const SystemParams& p, double tau)
{
    const auto report = check_matching(p, 1e-6);
    if (!report.all_matched())
        throw invalid_parameter("branch composition needs impedance-matched parameters");
    if (!(tau >= 0))
        throw invalid_parameter("tau must be >= 0");
    const double c = cooperativities(p).c_atom;
    BranchEfficiencies e;
    e.transfer_amplitude = std::exp(-2 * tau * p.dephasing_rate());
    e.blockade_reflection_amplitude = -2 * c / (1 + 2 * c);
    e.leakage_amplitude = 1 / (1 + 2 * c);
    return e;
}

/// Plain-text table of the terms.
inline std::string format_table(const QramState& s)
{
    std::ostringstream os;
    os.precision(6);
    os << "amplitude                     control  cells";
    os << std::string(s.n_cells > 5 ? s.n_cells - 5 : 0, ' ') << "  emitted\n";
    for (const auto& t : s.terms) {
        std::ostringstream amp;
        amp.precision(6);
        amp << std::fixed << t.amplitude.real() << (t.amplitude.imag() < 0 ? " - " : " + ")
            << std::abs(t.amplitude.imag()) << "i";
        std::string a = amp.str();
        a.resize(std::max<std::size_t>(a.size(), 30), ' ');
        os << a << ' ' << to_string(t.control) << "      ";
        for (const auto& c : t.cells)
            os << (c.occupied ? 'D' : '0');
        os << std::string(s.n_cells < 5 ? 5 - s.n_cells : 0, ' ') << "  ";
        for (std::size_t i = 0; i < t.emitted.size(); ++i)
            os << (i ? " " : "") << t.emitted[i].str();
        os << '\n';
    }
    os << "norm " << s.norm() << ", losses " << s.total_loss() << '\n';
    return os.str();
}

} // namespace qram

#endif
