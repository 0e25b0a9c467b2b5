#ifndef QRAM_QRAM_HPP
#define QRAM_QRAM_HPP

#include "addressing.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "frequency_domain.hpp"
#include "io.hpp"
#include "params.hpp"
#include "pulse.hpp"
#include "scenario.hpp"
#include "spectral.hpp"
#include "version.hpp"

#endif
