#ifndef QRAM_ENSEMBLE_HPP
#define QRAM_ENSEMBLE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "params.hpp"

namespace qram {

enum class discretization_scheme {
    /* equal-width cells, weight = Lorentzian mass of the cell */
    uniform_weighted,
    /* equal-mass cells, node at the mass midpoint */
    quantile,
};

inline std::string to_string(discretization_scheme s)
{
    return s == discretization_scheme::quantile ? "quantile" : "uniform_weighted";
}

inline discretization_scheme parse_discretization_scheme(const std::string& s)
{
    if (s == "quantile")
        return discretization_scheme::quantile;
    if (s == "uniform_weighted")
        return discretization_scheme::uniform_weighted;
    throw invalid_parameter("unknown discretization scheme '" + s + "'");
}

/**
 * Discrete stand-in for the inhomogeneously broadened ensemble.
 *
 * Coherences are continuum-normalized: atom j couples to cavity 2 with
 * sqrt(collective_coupling) and carries probability weights[j] |beta_j|^2,
 * so sum_j weights[j] (...) plays the role of N int dD G(D) (...).
 */
struct AtomEnsemble
{
    std::vector<double> detunings;
    std::vector<double> weights;
    std::vector<std::complex<double>> coherences;
    double collective_coupling = 0.0;
    /* time at which the coherences are given */
    double time = 0.0;

    std::size_t size() const { return detunings.size(); }

    void validate() const
    {
        const std::size_t n = detunings.size();
        if (n == 0 || weights.size() != n || coherences.size() != n)
            throw invalid_parameter("ensemble arrays must be non-empty and equal length");
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!(weights[j] > 0))
                throw invalid_parameter("ensemble weights must be positive");
            if (j > 0 && detunings[j] < detunings[j - 1])
                throw invalid_parameter("ensemble detunings must be sorted");
            sum += weights[j];
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw invalid_parameter("ensemble weights must sum to 1");
        if (!(collective_coupling >= 0))
            throw invalid_parameter("collective coupling must be >= 0");
    }

    /// sum_j w_j |beta_j|^2
    double probability() const
    {
        double s = 0.0;
        for (std::size_t j = 0; j < size(); ++j)
            s += weights[j] * std::norm(coherences[j]);
        return s;
    }
};

/* smallest admissible half-width of the discretized line, in delta_in */
inline constexpr double min_span_ratio = 20.0;

/**
 * Discretizes the Lorentzian line on |D| <= span into n_sim atoms with
 * zero coherence. The Lorentzian mass beyond the span is lumped into the
 * two boundary atoms so that the weights sum to one without renormalizing
 * the line core. Nodes are mirror-symmetric about D = 0.
 */
inline AtomEnsemble discretize_ensemble(std::size_t n_sim, double delta_in,
                                        double span,
                                        discretization_scheme scheme,
                                        double collective_coupling = 0.0)
{
    if (n_sim < 16)
        throw invalid_parameter("ensemble needs at least 16 atoms");
    if (!(delta_in > 0))
        throw invalid_parameter("delta_in must be > 0");
    if (!(span >= min_span_ratio * delta_in) || !std::isfinite(span))
        throw invalid_parameter(
            "ensemble span must be at least 20 delta_in (got span/delta_in = " +
            std::to_string(span / delta_in) + ")");

    /* cumulative Lorentzian mass and its inverse, u in (0, 1) */
    auto cdf = [&](double d) { return 0.5 + std::atan(d / delta_in) / pi; };
    auto inv_cdf = [&](double u) { return delta_in * std::tan(pi * (u - 0.5)); };

    const double u_lo = cdf(-span);
    const double tail = u_lo; // mass beyond each edge

    AtomEnsemble e;
    e.collective_coupling = collective_coupling;
    e.detunings.resize(n_sim);
    e.weights.resize(n_sim);
    e.coherences.assign(n_sim, {0.0, 0.0});

    /* fill the lower half (plus the middle atom) and mirror */
    const std::size_t half = (n_sim + 1) / 2;
    for (std::size_t j = 0; j < half; ++j) {
        double node, mass;
        if (scheme == discretization_scheme::quantile) {
            const double du = (1.0 - 2 * u_lo) / double(n_sim);
            const double a = u_lo + du * double(j);
            node = inv_cdf(a + du / 2);
            mass = du;
        } else {
            const double h = 2 * span / double(n_sim);
            const double a = -span + h * double(j);
            node = a + h / 2;
            mass = cdf(a + h) - cdf(a);
        }
        e.detunings[j] = node;
        e.weights[j] = mass;
    }
    if (n_sim % 2 == 1)
        e.detunings[half - 1] = 0.0;
    for (std::size_t j = 0; j < n_sim / 2; ++j) {
        e.detunings[n_sim - 1 - j] = -e.detunings[j];
        e.weights[n_sim - 1 - j] = e.weights[j];
    }
    e.weights.front() += tail;
    e.weights.back() += tail;

    double sum = 0.0;
    for (double w : e.weights)
        sum += w;
    for (double& w : e.weights)
        w /= sum;
    e.validate();
    return e;
}

/// Default discretization: 801 atoms, quantile scheme, |D| <= 40 delta_in.
inline AtomEnsemble default_ensemble(const SystemParams& p)
{
    validate(p);
    return discretize_ensemble(801, p.delta_in, 40 * p.delta_in,
                               discretization_scheme::quantile,
                               p.collective_coupling());
}

/// CRIB rephasing: D_j -> -D_j, keeping the detunings sorted.
inline AtomEnsemble invert_detunings(const AtomEnsemble& ens)
{
    AtomEnsemble out = ens;
    const std::size_t n = ens.size();
    for (std::size_t j = 0; j < n; ++j) {
        out.detunings[j] = -ens.detunings[n - 1 - j];
        out.weights[j] = ens.weights[n - 1 - j];
        out.coherences[j] = ens.coherences[n - 1 - j];
    }
    return out;
}

} // namespace qram

#endif
