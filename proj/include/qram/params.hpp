#ifndef QRAM_PARAMS_HPP
#define QRAM_PARAMS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace qram {

inline constexpr double infinity = std::numeric_limits<double>::infinity();
inline constexpr double pi = 3.14159265358979323846;

/// How the rates of a parameter set are expressed.
enum class unit_convention {
    /* every rate is a multiple of kappa, which must then equal 1 */
    kappa_normalized,
    /* rates carry an arbitrary common inverse-time unit */
    absolute,
};

inline std::string to_string(unit_convention u)
{
    return u == unit_convention::kappa_normalized ? "kappa" : "absolute";
}

inline unit_convention parse_unit_convention(const std::string& s)
{
    if (s == "kappa")
        return unit_convention::kappa_normalized;
    if (s == "absolute")
        return unit_convention::absolute;
    throw invalid_parameter("unknown unit convention '" + s +
                            "' (expected 'kappa' or 'absolute')");
}

/**
 * Physical parameters of the two-cavity memory with its control atom.
 *
 * Only the product n_atoms * g2^2 (the collective ensemble coupling) enters
 * any response function; both factors are kept because the ensemble
 * discretization reasons about the atom count.
 */
struct SystemParams
{
    double kappa = 1.0;     // decay of cavity 1 into the propagating modes
    double gamma = 1.0;     // control atom transverse decay
    double g1 = 0.0;        // control atom - cavity 1 coupling
    double g2 = 0.0;        // single ensemble atom - cavity 2 coupling
    double f2 = 0.0;        // cavity 1 - cavity 2 coupling
    double n_atoms = 1.0;   // physical ensemble size N
    double delta_in = 0.5;  // Lorentzian half-width of the ensemble line
    double delta_c = 0.0;   // control atom detuning (signed)
    double t2 = infinity;   // ensemble coherence time
    unit_convention units = unit_convention::kappa_normalized;

    /// Collective ensemble coupling N g2^2.
    double collective_coupling() const { return n_atoms * g2 * g2; }

    /// Coherence decay rate 1/T2 (zero for an infinite T2).
    double dephasing_rate() const { return std::isinf(t2) ? 0.0 : 1.0 / t2; }

    bool operator==(const SystemParams&) const = default;
};

/// Throws invalid_parameter naming the first offending field.
inline void validate(const SystemParams& p)
{
    auto finite_positive = [](double v) { return std::isfinite(v) && v > 0; };
    auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0; };
    if (!finite_positive(p.kappa))
        throw invalid_parameter("kappa must be finite and > 0");
    if (!finite_positive(p.gamma))
        throw invalid_parameter("gamma must be finite and > 0");
    if (!finite_positive(p.delta_in))
        throw invalid_parameter("delta_in must be finite and > 0");
    if (!finite_nonneg(p.g1))
        throw invalid_parameter("g1 must be finite and >= 0");
    if (!finite_nonneg(p.g2))
        throw invalid_parameter("g2 must be finite and >= 0");
    if (!finite_nonneg(p.f2))
        throw invalid_parameter("f2 must be finite and >= 0");
    if (!std::isfinite(p.n_atoms) || p.n_atoms < 1 ||
        p.n_atoms != std::floor(p.n_atoms))
        throw invalid_parameter("n_atoms must be an integer >= 1");
    if (!std::isfinite(p.delta_c))
        throw invalid_parameter("delta_c must be finite");
    if (std::isnan(p.t2) || p.t2 <= 0 || (std::isinf(p.t2) && p.t2 < 0))
        throw invalid_parameter("t2 must be > 0 or infinite");
    if (p.units == unit_convention::kappa_normalized && p.kappa != 1.0)
        throw invalid_parameter(
            "kappa must equal 1 under the 'kappa' unit convention");
}

struct Cooperativities
{
    double c_atom = 0.0; // g1^2 / (kappa gamma)
    double c_pm = 0.0;   // f2^2 / (kappa N g2^2 / (2 delta_in))
};

inline Cooperativities cooperativities(const SystemParams& p)
{
    validate(p);
    if (p.g2 == 0.0)
        throw invalid_parameter(
            "photonic-molecule cooperativity undefined for g2 = 0");
    Cooperativities c;
    c.c_atom = p.g1 * p.g1 / (p.kappa * p.gamma);
    c.c_pm = p.f2 * p.f2 * 2.0 * p.delta_in /
             (p.kappa * p.collective_coupling());
    return c;
}

/// Default relative tolerance of the matching verdicts.
inline constexpr double default_matching_tolerance = 1e-9;

struct MatchingReport
{
    double tolerance = default_matching_tolerance;
    /* |C_pm - 1| */
    double c_pm_residual = 0.0;
    bool c_pm_matched = false;
    /* relative residual of N g2^2 / delta_in = delta_in (kappa/2) / (delta_in + kappa/2) */
    double second_condition_residual = 0.0;
    bool second_condition_matched = false;
    /* |delta_in - kappa/2| / kappa */
    double third_condition_residual = 0.0;
    bool third_condition_matched = false;

    bool all_matched() const
    {
        return c_pm_matched && second_condition_matched &&
               third_condition_matched;
    }
};

inline MatchingReport check_matching(const SystemParams& p,
                                     double tol = default_matching_tolerance)
{
    if (!(tol > 0))
        throw invalid_parameter("matching tolerance must be > 0");
    const auto c = cooperativities(p);
    MatchingReport r;
    r.tolerance = tol;
    r.c_pm_residual = std::abs(c.c_pm - 1.0);
    const double target = p.delta_in * (p.kappa / 2) / (p.delta_in + p.kappa / 2);
    r.second_condition_residual =
        std::abs(p.collective_coupling() / p.delta_in - target) / target;
    r.third_condition_residual = std::abs(p.delta_in - p.kappa / 2) / p.kappa;
    r.c_pm_matched = r.c_pm_residual <= tol;
    r.second_condition_matched = r.second_condition_residual <= tol;
    r.third_condition_matched = r.third_condition_residual <= tol;
    return r;
}

/**
 * Builds a parameter set satisfying all three impedance-matching
 * conditions: delta_in = kappa/2, the collective coupling fixed by the
 * second condition and f2 chosen for C_pm = 1. The control atom is left
 * resonant (delta_c = 0) with g1 = sqrt(c_atom * kappa * gamma).
 */
inline SystemParams solve_matched_params(double kappa, double c_atom_target,
                                         double gamma = -1.0,
                                         double n_atoms = 1e6)
{
    if (!(kappa > 0) || !std::isfinite(kappa))
        throw invalid_parameter("kappa must be finite and > 0");
    if (!(c_atom_target >= 0) || !std::isfinite(c_atom_target))
        throw invalid_parameter("target cooperativity must be >= 0");
    SystemParams p;
    p.kappa = kappa;
    p.gamma = gamma > 0 ? gamma : kappa;
    p.units = kappa == 1.0 ? unit_convention::kappa_normalized
                           : unit_convention::absolute;
    p.delta_in = kappa / 2;
    const double ng2 =
        p.delta_in * p.delta_in * (kappa / 2) / (p.delta_in + kappa / 2);
    p.n_atoms = n_atoms;
    p.g2 = std::sqrt(ng2 / n_atoms);
    p.f2 = std::sqrt(kappa * ng2 / (2 * p.delta_in));
    p.g1 = std::sqrt(c_atom_target * kappa * p.gamma);
    p.delta_c = 0.0;
    p.t2 = infinity;
    validate(p);
    return p;
}

/// State of the control atom as seen by the light.
enum class control_branch {
    /* atom parked in the ancillary level: decoupled, g1 = 0 */
    transfer,
    /* atom in the ground state and resonant, delta_c = 0 */
    blockade,
};

inline SystemParams with_branch(SystemParams p, control_branch b)
{
    if (b == control_branch::transfer)
        p.g1 = 0.0;
    else
        p.delta_c = 0.0;
    return p;
}

/// Stable 64-bit FNV-1a digest, rendered as 16 hex digits.
inline std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

/// Canonical one-line rendering used for hashing and provenance.
inline std::string canonical_string(const SystemParams& p)
{
    std::ostringstream os;
    os.precision(17);
    os << "kappa=" << p.kappa << ";gamma=" << p.gamma << ";g1=" << p.g1
       << ";g2=" << p.g2 << ";f2=" << p.f2 << ";n_atoms=" << p.n_atoms
       << ";delta_in=" << p.delta_in << ";delta_c=" << p.delta_c
       << ";t2=" << p.t2 << ";unit_convention=" << to_string(p.units);
    return os.str();
}

inline std::string param_hash(const SystemParams& p)
{
    return fnv1a_hex(canonical_string(p));
}

} // namespace qram

#endif
