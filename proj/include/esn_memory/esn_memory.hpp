#pragma once

#include "esn_memory/analytic.hpp"
#include "esn_memory/config.hpp"
#include "esn_memory/emit.hpp"
#include "esn_memory/errors.hpp"
#include "esn_memory/experiment.hpp"
#include "esn_memory/linalg.hpp"
#include "esn_memory/memory_curve.hpp"
#include "esn_memory/reservoir.hpp"
#include "esn_memory/rng.hpp"
#include "esn_memory/simulate.hpp"
