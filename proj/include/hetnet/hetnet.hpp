#pragma once

#include "analytic.hpp"
#include "equivalence.hpp"
#include "mcsim.hpp"
#include "model.hpp"
#include "quadrature.hpp"
#include "scenario_io.hpp"
#include "specfun.hpp"
