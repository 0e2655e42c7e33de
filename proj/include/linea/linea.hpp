#pragma once

// Numerical toolkit for Poincare functions of polynomials: Koenigs
// linearization, order-of-growth estimation, area-property and Poincare
// series diagnostics, and quadratic-differential pushforwards.

#include "linea/area.hpp"
#include "linea/dynamics.hpp"
#include "linea/errors.hpp"
#include "linea/fit.hpp"
#include "linea/linearizer.hpp"
#include "linea/poly_parse.hpp"
#include "linea/polynomial.hpp"
#include "linea/power_series.hpp"
#include "linea/quad_diff.hpp"
#include "linea/region.hpp"
#include "linea/rng.hpp"
#include "linea/roots.hpp"
#include "linea/series_estimate.hpp"
#include "linea/summation.hpp"
