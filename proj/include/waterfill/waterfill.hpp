#pragma once

// Umbrella header for the waterfill library.

#include "waterfill/bench.hpp"
#include "waterfill/core.hpp"
#include "waterfill/io.hpp"
#include "waterfill/oracles.hpp"
#include "waterfill/solver.hpp"
