#pragma once

#include "analytic_spectrum.hpp"
#include "core.hpp"
#include "designer.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "measurement.hpp"
#include "nelder_mead.hpp"
#include "numeric_spectrum.hpp"
#include "propagation.hpp"
