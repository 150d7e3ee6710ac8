#pragma once

// Umbrella header.

#include "poptsim/choi.hpp"
#include "poptsim/eigh.hpp"
#include "poptsim/errors.hpp"
#include "poptsim/games.hpp"
#include "poptsim/io.hpp"
#include "poptsim/lstsq.hpp"
#include "poptsim/matrix.hpp"
#include "poptsim/popt.hpp"
#include "poptsim/povm.hpp"
#include "poptsim/quantize.hpp"
#include "poptsim/reconstruct.hpp"
#include "poptsim/rng.hpp"
#include "poptsim/simplex.hpp"
