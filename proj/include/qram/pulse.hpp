#ifndef QRAM_PULSE_HPP
#define QRAM_PULSE_HPP

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "params.hpp"

namespace qram {

enum class pulse_shape {
    gaussian,
    rising_exponential,
    decaying_exponential,
};

inline std::string to_string(pulse_shape s)
{
    switch (s) {
    case pulse_shape::gaussian: return "gaussian";
    case pulse_shape::rising_exponential: return "rising_exponential";
    case pulse_shape::decaying_exponential: return "decaying_exponential";
    }
    return "unknown";
}

inline pulse_shape parse_pulse_shape(const std::string& s)
{
    if (s == "gaussian")
        return pulse_shape::gaussian;
    if (s == "rising_exponential")
        return pulse_shape::rising_exponential;
    if (s == "decaying_exponential")
        return pulse_shape::decaying_exponential;
    throw invalid_parameter("unknown pulse shape '" + s + "'");
}

/**
 * Single-photon input wavepacket alpha_in(t), normalized to
 * int |alpha_in|^2 dt = 1.
 *
 * duration is the standard deviation of the gaussian field envelope
 * exp(-(t-c)^2 / (2 dt^2)), or the 1/e time of the exponential envelopes.
 * The exponentials are one-sided: the rising one ends at center, the
 * decaying one starts there. The constant -i of the free-field drive is
 * dropped; it is a global phase.
 */
struct PulseSpec
{
    pulse_shape shape = pulse_shape::gaussian;
    double duration = 10.0;
    double center = 0.0;
    double carrier_detuning = 0.0;

    bool operator==(const PulseSpec&) const = default;

    void validate() const
    {
        if (!(duration > 0) || !std::isfinite(duration))
            throw invalid_parameter("pulse duration must be finite and > 0");
        if (!std::isfinite(center) || !std::isfinite(carrier_detuning))
            throw invalid_parameter("pulse center and carrier must be finite");
    }

    /// Field amplitude alpha_in(t).
    std::complex<double> amplitude(double t) const
    {
        const double s = t - center;
        const std::complex<double> carrier =
            std::polar(1.0, -carrier_detuning * s);
        switch (shape) {
        case pulse_shape::gaussian: {
            const double norm = std::pow(pi * duration * duration, -0.25);
            return norm * std::exp(-s * s / (2 * duration * duration)) *
                   carrier;
        }
        case pulse_shape::rising_exponential:
            if (s > 0)
                return 0.0;
            return std::sqrt(2 / duration) * std::exp(s / duration) * carrier;
        case pulse_shape::decaying_exponential:
            if (s < 0)
                return 0.0;
            return std::sqrt(2 / duration) * std::exp(-s / duration) * carrier;
        }
        return 0.0;
    }

    /**
     * Normalized spectral amplitude alpha0(nu) with
     * alpha_in(t) = (2 pi)^{-1/2} int alpha0(nu) exp(-i nu t) dnu.
     */
    std::complex<double> spectrum(double nu) const
    {
        const double x = nu - carrier_detuning;
        const std::complex<double> shift = std::polar(1.0, nu * center);
        switch (shape) {
        case pulse_shape::gaussian: {
            const double norm = std::pow(pi * duration * duration, -0.25);
            return norm * duration *
                   std::exp(-x * x * duration * duration / 2) * shift;
        }
        case pulse_shape::rising_exponential:
            return std::sqrt(2 / duration) / std::sqrt(2 * pi) * shift /
                   std::complex<double>(1 / duration, x);
        case pulse_shape::decaying_exponential:
            return std::sqrt(2 / duration) / std::sqrt(2 * pi) * shift /
                   std::complex<double>(1 / duration, -x);
        }
        return 0.0;
    }

    /// int_a^b |alpha_in(t)|^2 dt.
    double energy_between(double a, double b) const
    {
        if (b <= a)
            return 0.0;
        const double sa = a - center, sb = b - center;
        switch (shape) {
        case pulse_shape::gaussian:
            return 0.5 * (std::erf(sb / duration) - std::erf(sa / duration));
        case pulse_shape::rising_exponential: {
            if (sa >= 0)
                return 0.0;
            const double hi = std::min(sb, 0.0);
            return std::exp(2 * hi / duration) - std::exp(2 * sa / duration);
        }
        case pulse_shape::decaying_exponential: {
            if (sb <= 0)
                return 0.0;
            const double lo = std::max(sa, 0.0);
            return std::exp(-2 * lo / duration) - std::exp(-2 * sb / duration);
        }
        }
        return 0.0;
    }

    /// Interval outside of which the pulse carries less than ~1e-11.
    std::pair<double, double> support() const
    {
        switch (shape) {
        case pulse_shape::gaussian:
            return {center - 5 * duration, center + 5 * duration};
        case pulse_shape::rising_exponential:
            return {center - 13 * duration, center};
        case pulse_shape::decaying_exponential:
            return {center, center + 13 * duration};
        }
        return {center, center};
    }

    /// Times where the envelope has a kink.
    std::vector<double> breakpoints() const
    {
        if (shape == pulse_shape::gaussian)
            return {};
        return {center};
    }

    /// RMS width of |alpha0|^2 for the gaussian, HWHM for the exponentials.
    double bandwidth() const
    {
        if (shape == pulse_shape::gaussian)
            return 1.0 / (std::sqrt(2.0) * duration);
        return 1.0 / duration;
    }
};

} // namespace qram

#endif
