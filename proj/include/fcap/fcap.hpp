#pragma once

// Umbrella header: anisotropic p-capacity of convex bodies, the exact radial
// solutions, the grid solver, and the rigidity-theorem checks.

#include "fcap/analysis.hpp"
#include "fcap/body.hpp"
#include "fcap/common.hpp"
#include "fcap/dual.hpp"
#include "fcap/energy.hpp"
#include "fcap/geometry.hpp"
#include "fcap/grid.hpp"
#include "fcap/level_set.hpp"
#include "fcap/norm.hpp"
#include "fcap/radial.hpp"
#include "fcap/report.hpp"
#include "fcap/run.hpp"
#include "fcap/solve.hpp"
#include "fcap/spec_parse.hpp"
