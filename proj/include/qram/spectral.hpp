#ifndef QRAM_SPECTRAL_HPP
#define QRAM_SPECTRAL_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <type_traits>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "errors.hpp"
#include "params.hpp"

namespace qram {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

/* magnitudes below this are treated as exact poles */
inline constexpr double pole_threshold = 1e-30;

/// Set when a response function hit a pole and returned its limiting value.
struct SpectralDiagnostics
{
    bool pole_guard_hit = false;
};

/* ------------------------------------------------------------------ */
/* lineshape                                                            */
/* ------------------------------------------------------------------ */

/// Normalized Lorentzian line of half-width delta_in.
inline double lorentzian_lineshape(double nu, double delta_in)
{
    if (!(delta_in > 0))
        throw invalid_parameter("delta_in must be > 0");
    return delta_in / (pi * (nu * nu + delta_in * delta_in));
}

/**
 * Broadening form factor  Gt(D) = lim_{e->0+} int dv G(v) / (e + i(v - D))
 * for the Lorentzian line. The integral closes on the pole of G in the
 * lower half plane, giving 1 / (delta_in - i D).
 */
inline cplx broadened_response(double delta, double delta_in)
{
    if (!(delta_in > 0))
        throw invalid_parameter("delta_in must be > 0");
    return 1.0 / cplx(delta_in, -delta);
}

/**
 * Same form factor by direct quadrature. In the e->0+ limit the real part
 * is pi G(D) and the imaginary part is minus the principal value of
 * int G(v)/(v - D), evaluated in the symmetric form
 * int_0^inf [G(D+s) - G(D-s)] / s ds. Diagnostics only.
 */
inline cplx broadened_response_quadrature(double delta, double delta_in)
{
    if (!(delta_in > 0))
        throw invalid_parameter("delta_in must be > 0");
    auto odd_part = [&](double s) {
        if (s == 0.0) {
            /* derivative limit 2 G'(delta) */
            const double d2 = delta * delta + delta_in * delta_in;
            return -4.0 * delta_in * delta / (pi * d2 * d2);
        }
        return (lorentzian_lineshape(delta + s, delta_in) -
                lorentzian_lineshape(delta - s, delta_in)) /
               s;
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    const double pv = integrator.integrate(odd_part, 0.0, infinity);
    return {pi * lorentzian_lineshape(delta, delta_in), -pv};
}

/* ------------------------------------------------------------------ */
/* transfer functions                                                   */
/* ------------------------------------------------------------------ */

namespace detail {

/* Delta - delta_c + i gamma/2, regularized at an exact pole */
inline cplx control_denominator(double nu, const SystemParams& p,
                                SpectralDiagnostics* diag)
{
    cplx x(nu - p.delta_c, p.gamma / 2);
    if (std::abs(x) < pole_threshold) {
        if (diag)
            diag->pole_guard_hit = true;
        x = cplx(0.0, pole_threshold);
    }
    return x;
}

/* nu + i N g2^2 Gt(nu), regularized at an exact pole */
inline cplx ensemble_denominator(double nu, const SystemParams& p,
                                 SpectralDiagnostics* diag)
{
    cplx w = nu + I * p.collective_coupling() *
                      broadened_response(nu, p.delta_in);
    if (std::abs(w) < pole_threshold) {
        if (diag)
            diag->pole_guard_hit = true;
        w = cplx(0.0, pole_threshold);
    }
    return w;
}

/* denominator shared by A_{1,in} and f_Bl; Im part >= kappa/2 */
inline cplx cavity1_denominator(double nu, const SystemParams& p,
                                SpectralDiagnostics* diag)
{
    const cplx x = control_denominator(nu, p, diag);
    cplx d = nu + I * (p.kappa / 2) - p.g1 * p.g1 / x;
    if (p.f2 > 0)
        d -= p.f2 * p.f2 / ensemble_denominator(nu, p, diag);
    return d;
}

} // namespace detail

/**
 * Storage transfer function F(D): the ratio entering the stored atomic
 * amplitude beta(D) = i sqrt(2 pi kappa) (g2/f2) F(D) alpha0(D).
 */
inline cplx storage_transfer(double delta, const SystemParams& p,
                             SpectralDiagnostics* diag = nullptr)
{
    validate(p);
    if (p.f2 == 0.0)
        return 0.0;
    const double f2sq = p.f2 * p.f2;
    const cplx ens = p.collective_coupling() *
                         broadened_response(delta, p.delta_in) -
                     I * delta;
    const cplx x = detail::control_denominator(delta, p, diag);
    const cplx cav = p.kappa / 2 + I * p.g1 * p.g1 / x - I * delta;
    cplx den = ens * cav + f2sq;
    if (std::abs(den) < pole_threshold) {
        if (diag)
            diag->pole_guard_hit = true;
        den = cplx(0.0, pole_threshold);
    }
    return f2sq / den;
}

/// alpha_1(nu) / alpha_in(nu).
inline cplx cavity1_response(double nu, const SystemParams& p,
                             SpectralDiagnostics* diag = nullptr)
{
    validate(p);
    return I * std::sqrt(p.kappa) / detail::cavity1_denominator(nu, p, diag);
}

/// alpha_2(nu) / alpha_1(nu).
inline cplx cavity2_over_cavity1(double nu, const SystemParams& p,
                                 SpectralDiagnostics* diag = nullptr)
{
    validate(p);
    if (p.f2 == 0.0)
        return 0.0;
    return p.f2 / detail::ensemble_denominator(nu, p, diag);
}

/// Fraction of a monochromatic photon at detuning delta stored in the ensemble.
inline double spectral_efficiency(double delta, const SystemParams& p,
                                  SpectralDiagnostics* diag = nullptr)
{
    validate(p);
    if (p.f2 == 0.0)
        throw invalid_parameter(
            "spectral efficiency undefined for f2 = 0 (no transfer path)");
    const cplx f = storage_transfer(delta, p, diag);
    return 2 * pi * p.kappa * p.collective_coupling() / (p.f2 * p.f2) *
           lorentzian_lineshape(delta, p.delta_in) * std::norm(f);
}

/// Narrowband (D ~ 0) storage efficiency in closed form.
inline double resonant_efficiency(const SystemParams& p)
{
    const auto c = cooperativities(p);
    const double d2 = p.delta_c * p.delta_c + p.gamma * p.gamma / 4;
    const double re = 1 + c.c_pm + p.gamma * p.gamma * c.c_atom / d2;
    const double im = 2 * p.delta_c * p.gamma * c.c_atom / d2;
    return 4 * c.c_pm / (re * re + im * im);
}

/// Flat storage window reached under all three matching conditions.
inline double matched_window(double nu, double kappa)
{
    if (!(kappa > 0))
        throw invalid_parameter("kappa must be > 0");
    const double x = nu / (kappa / 2);
    return 1.0 / (1.0 + x * x * x * x * x * x);
}

/// Reflection amplitude alpha_out / alpha_in of the memory input port.
inline cplx blockade_reflection(double nu, const SystemParams& p,
                                SpectralDiagnostics* diag = nullptr)
{
    validate(p);
    return I * p.kappa / detail::cavity1_denominator(nu, p, diag) - 1.0;
}

/// Narrowband echo retrieval probability for transfer on both stages.
inline double echo_probability_narrowband(const SystemParams& p, double tau)
{
    if (!(tau >= 0))
        throw invalid_parameter("tau must be >= 0");
    const double cpm = cooperativities(p).c_pm;
    const double s = 1 + cpm;
    return 16 * cpm * cpm * std::exp(-4 * tau * p.dephasing_rate()) /
           (s * s * s * s);
}

/* ------------------------------------------------------------------ */
/* grids and spectra                                                    */
/* ------------------------------------------------------------------ */

class FrequencyGrid
{
public:
    /// n points from lo to hi inclusive.
    static FrequencyGrid uniform(double lo, double hi, std::size_t n)
    {
        if (n < 2 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
            throw invalid_parameter("uniform grid needs n >= 2 and lo < hi");
        FrequencyGrid g;
        g.m_points.resize(n);
        const double h = (hi - lo) / double(n - 1);
        for (std::size_t i = 0; i < n; ++i)
            g.m_points[i] = lo + h * double(i);
        /* exact mirror symmetry for symmetric ranges */
        if (lo == -hi)
            for (std::size_t i = 0; i < n / 2; ++i)
                g.m_points[n - 1 - i] = -g.m_points[i];
        if (lo == -hi && n % 2 == 1)
            g.m_points[n / 2] = 0.0;
        g.m_spacing = h;
        return g;
    }

    static FrequencyGrid explicit_points(std::vector<double> pts)
    {
        if (pts.empty())
            throw invalid_parameter("frequency grid must be non-empty");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!std::isfinite(pts[i]))
                throw invalid_parameter("frequency grid points must be finite");
            if (i > 0 && !(pts[i] > pts[i - 1]))
                throw invalid_parameter(
                    "frequency grid must be strictly increasing");
        }
        FrequencyGrid g;
        g.m_points = std::move(pts);
        return g;
    }

    /// |nu| <= 8 kappa, 4096 points.
    static FrequencyGrid default_grid(double kappa = 1.0)
    {
        return uniform(-8 * kappa, 8 * kappa, 4096);
    }

    const std::vector<double>& points() const { return m_points; }
    std::size_t size() const { return m_points.size(); }
    double operator[](std::size_t i) const { return m_points[i]; }
    bool is_uniform() const { return m_spacing > 0; }
    /* 0 for explicit grids */
    double spacing() const { return m_spacing; }

    bool is_symmetric(double tol = 1e-12) const
    {
        const std::size_t n = m_points.size();
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(m_points[i] + m_points[n - 1 - i]) >
                tol * (1 + std::abs(m_points[i])))
                return false;
        return true;
    }

    /// Trapezoid weights for integrals over the grid.
    std::vector<double> trapezoid_weights() const
    {
        const std::size_t n = m_points.size();
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double h = m_points[i + 1] - m_points[i];
            w[i] += h / 2;
            w[i + 1] += h / 2;
        }
        return w;
    }

private:
    std::vector<double> m_points;
    double m_spacing = 0.0;
};

enum class spectrum_label {
    storage_transfer,
    cavity1_response,
    cavity2_over_cavity1,
    blockade_reflection,
    photon_spectrum,
    efficiency_real,
};

inline std::string to_string(spectrum_label l)
{
    switch (l) {
    case spectrum_label::storage_transfer: return "storage_transfer";
    case spectrum_label::cavity1_response: return "cavity1_response";
    case spectrum_label::cavity2_over_cavity1: return "cavity2_over_cavity1";
    case spectrum_label::blockade_reflection: return "blockade_reflection";
    case spectrum_label::photon_spectrum: return "photon_spectrum";
    case spectrum_label::efficiency_real: return "efficiency_real";
    }
    return "unknown";
}

/* tolerance on efficiencies exceeding one */
inline constexpr double efficiency_slack = 1e-9;

struct ComplexSpectrum
{
    FrequencyGrid grid;
    std::vector<cplx> values;
    spectrum_label label = spectrum_label::photon_spectrum;
    /* pole guard triggered at one or more grid points */
    bool pole_guard_hit = false;

    void validate() const
    {
        if (values.size() != grid.size())
            throw invalid_parameter("spectrum size does not match its grid");
        if (label == spectrum_label::efficiency_real)
            for (const auto& v : values)
                if (v.imag() != 0.0 || v.real() < 0.0 ||
                    v.real() > 1.0 + efficiency_slack)
                    throw invalid_parameter(
                        "efficiency spectrum outside [0, 1]");
    }

    /// Trapezoid integral of |value|^2 over the grid.
    double total_probability() const
    {
        const auto w = grid.trapezoid_weights();
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            s += w[i] * std::norm(values[i]);
        return s;
    }
};

/// Evaluates fn at every grid point. fn may take an optional diagnostics
/// pointer which is folded into the spectrum's pole flag.
template <class Fn>
ComplexSpectrum tabulate(const FrequencyGrid& grid, spectrum_label label,
                         Fn&& fn)
{
    ComplexSpectrum s;
    s.grid = grid;
    s.label = label;
    s.values.resize(grid.size());
    SpectralDiagnostics diag;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if constexpr (std::is_invocable_v<Fn, double, SpectralDiagnostics*>)
            s.values[i] = cplx(fn(grid[i], &diag));
        else
            s.values[i] = cplx(fn(grid[i]));
    }
    s.pole_guard_hit = diag.pole_guard_hit;
    s.validate();
    return s;
}

inline ComplexSpectrum efficiency_spectrum(const FrequencyGrid& grid,
                                           const SystemParams& p)
{
    return tabulate(grid, spectrum_label::efficiency_real,
                    [&](double nu, SpectralDiagnostics* d) {
                        return spectral_efficiency(nu, p, d);
                    });
}

/**
 * Emitted echo spectrum after CRIB retrieval, referenced to the echo time
 * t = 2 tau (the free propagation phase exp(-i nu (t - 2 tau)) is unity):
 *   alpha(nu) = -2 pi kappa N (g2/f2)^2 G(nu) F_S(-nu) F_R(nu) alpha0(-nu)
 *               exp(-2 tau / T2).
 * The control-atom settings of p_store and p_read select the transfer or
 * blockade response of each stage; all other parameters must agree.
 */
inline ComplexSpectrum echo_spectrum(const ComplexSpectrum& input,
                                     const SystemParams& p_store,
                                     const SystemParams& p_read, double tau)
{
    validate(p_store);
    validate(p_read);
    input.validate();
    if (!(tau >= 0))
        throw invalid_parameter("tau must be >= 0");
    if (p_store.kappa != p_read.kappa || p_store.f2 != p_read.f2 ||
        p_store.collective_coupling() != p_read.collective_coupling() ||
        p_store.delta_in != p_read.delta_in || p_store.t2 != p_read.t2)
        throw invalid_parameter(
            "storage and readout parameters may differ only in the control atom");
    if (p_store.f2 == 0.0)
        throw invalid_parameter("echo undefined for f2 = 0");
    const double norm = input.total_probability();
    if (std::abs(norm - 1.0) > 1e-6)
        throw invalid_parameter("input spectrum is not normalized (integral " +
                                std::to_string(norm) + ")");
    if (!input.grid.is_symmetric())
        throw invalid_parameter(
            "echo spectrum needs a grid symmetric about nu = 0");

    const std::size_t n = input.grid.size();
    const double pref = -2 * pi * p_store.kappa *
                        p_store.collective_coupling() /
                        (p_store.f2 * p_store.f2) *
                        std::exp(-2 * tau * p_store.dephasing_rate());
    ComplexSpectrum out;
    out.grid = input.grid;
    out.label = spectrum_label::photon_spectrum;
    out.values.resize(n);
    SpectralDiagnostics diag;
    for (std::size_t i = 0; i < n; ++i) {
        const double nu = input.grid[i];
        out.values[i] = pref * lorentzian_lineshape(nu, p_store.delta_in) *
                        storage_transfer(-nu, p_store, &diag) *
                        storage_transfer(nu, p_read, &diag) *
                        input.values[n - 1 - i];
    }
    out.pole_guard_hit = diag.pole_guard_hit;
    return out;
}

} // namespace qram

#endif
