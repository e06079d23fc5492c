#pragma once

// Umbrella header: supremum laws for killed generalized risk processes.
//
// The library evaluates the distribution of the running supremum of the dual
// of a spectrally one-sided risk process observed up to an independent
// exponential kill time, via the compound-geometric (Pollaczek-Khinchine)
// series built from fluctuation identities, and cross-checks it by Monte
// Carlo through the modified ladder-epoch decomposition of the paths.

#include "levyrisk/commands.hpp"
#include "levyrisk/errors.hpp"
#include "levyrisk/fluctuation.hpp"
#include "levyrisk/io.hpp"
#include "levyrisk/model.hpp"
#include "levyrisk/pk.hpp"
#include "levyrisk/scenario.hpp"
#include "levyrisk/simulate.hpp"
#include "levyrisk/stats.hpp"
#include "levyrisk/version.hpp"
