#pragma once

#include "percsle/arms.hpp"
#include "percsle/cardy.hpp"
#include "percsle/conformal.hpp"
#include "percsle/curvemetric.hpp"
#include "percsle/errors.hpp"
#include "percsle/exploration.hpp"
#include "percsle/harness.hpp"
#include "percsle/hex.hpp"
#include "percsle/lattice.hpp"
#include "percsle/mobius.hpp"
#include "percsle/quadrature.hpp"
#include "percsle/rng.hpp"
#include "percsle/shapes.hpp"
#include "percsle/sle.hpp"
#include "percsle/stats.hpp"
