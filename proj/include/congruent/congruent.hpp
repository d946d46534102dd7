#pragma once

#include "congruent/arith.hpp"
#include "congruent/curve.hpp"
#include "congruent/heegner.hpp"
#include "congruent/lattice.hpp"
#include "congruent/lseries.hpp"
#include "congruent/real.hpp"
