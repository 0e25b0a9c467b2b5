#ifndef QRAM_FREQUENCY_DOMAIN_HPP
#define QRAM_FREQUENCY_DOMAIN_HPP

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "params.hpp"
#include "pulse.hpp"
#include "spectral.hpp"

namespace qram {

namespace detail {

/* adaptive quadrature of a smooth spectral integrand on the real line */
template <class Fn>
double integrate_spectrum(Fn&& fn, double bandwidth, double kappa)
{
    using boost::math::quadrature::gauss_kronrod;
    const double lim = std::max(12 * bandwidth, 50 * kappa);
    const double inner = std::min(4 * bandwidth, lim / 2);
    const double cuts[] = {-lim, -inner, 0.0, inner, lim};
    double total = 0.0;
    for (int k = 0; k < 4; ++k)
        total += gauss_kronrod<double, 61>::integrate(fn, cuts[k], cuts[k + 1],
                                                      15, 1e-12);
    return total;
}

} // namespace detail

/// Storage probability int eps(nu) |alpha0(nu)|^2 dnu of a pulse.
inline double storage_probability_spectral(const SystemParams& p,
                                           const PulseSpec& pulse)
{
    validate(p);
    pulse.validate();
    auto f = [&](double nu) {
        return spectral_efficiency(nu, p) * std::norm(pulse.spectrum(nu));
    };
    return detail::integrate_spectrum(f, pulse.bandwidth() +
                                             std::abs(pulse.carrier_detuning),
                                      p.kappa);
}

/**
 * Echo probability of a full CRIB cycle in the frequency domain:
 * int eps_S(-nu) eps_R(nu) |alpha0(-nu)|^2 dnu exp(-4 tau / T2),
 * with tau the time from the pulse center to the inversion.
 */
inline double echo_probability_spectral(const SystemParams& p_store,
                                        const SystemParams& p_read,
                                        const PulseSpec& pulse, double tau)
{
    validate(p_store);
    validate(p_read);
    pulse.validate();
    if (!(tau >= 0))
        throw invalid_parameter("tau must be >= 0");
    auto f = [&](double nu) {
        return spectral_efficiency(-nu, p_store) * spectral_efficiency(nu, p_read) *
               std::norm(pulse.spectrum(-nu));
    };
    const double decay = std::exp(-4 * tau * p_store.dephasing_rate());
    return decay * detail::integrate_spectrum(
                       f, pulse.bandwidth() + std::abs(pulse.carrier_detuning),
                       p_store.kappa);
}

} // namespace qram

#endif
