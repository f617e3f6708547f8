#pragma once

#include "bath.hpp"
#include "coefficients.hpp"
#include "errors.hpp"
#include "gaussian.hpp"
#include "linalg.hpp"
#include "markers.hpp"
#include "nelder_mead.hpp"
#include "ode.hpp"
#include "oracles.hpp"
#include "propagation.hpp"
#include "quadrature.hpp"
#include "sweep.hpp"
