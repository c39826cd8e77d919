#pragma once

// Periodic generalized linear differential equations over Stieltjes-type
// integrals: piecewise-polynomial-plus-jumps coefficient functions, transition
// matrices with one-sided limits, Floquet decomposition, exponential-dichotomy
// classification, and closed-form periodic solutions.
//
// The JSON config layer lives in glde/config_json.hpp and is not pulled in
// here because it needs nlohmann/json on the include path.

#include "glde/bv_function.hpp"
#include "glde/floquet.hpp"
#include "glde/ks_integral.hpp"
#include "glde/numeric.hpp"
#include "glde/ordered_schur.hpp"
#include "glde/periodic.hpp"
#include "glde/piecewise_poly.hpp"
#include "glde/propagator.hpp"
#include "glde/system.hpp"
#include "glde/trajectory.hpp"
