#pragma once

// Umbrella header: the whole ruin-probability computation kit.

#include "ruinkit/errors.hpp"
#include "ruinkit/rng.hpp"
#include "ruinkit/quadrature.hpp"
#include "ruinkit/model.hpp"
#include "ruinkit/kernels.hpp"
#include "ruinkit/adjustment.hpp"
#include "ruinkit/closedform.hpp"
#include "ruinkit/renewal_solver.hpp"
#include "ruinkit/montecarlo.hpp"
#include "ruinkit/csv.hpp"
#include "ruinkit/config.hpp"
