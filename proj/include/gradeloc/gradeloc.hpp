#pragma once

// Umbrella header.

#include "gradeloc/engine.hpp"
#include "gradeloc/error.hpp"
#include "gradeloc/geometry.hpp"
#include "gradeloc/localization.hpp"
#include "gradeloc/metrics.hpp"
#include "gradeloc/mobility.hpp"
#include "gradeloc/planner.hpp"
#include "gradeloc/radio.hpp"
#include "gradeloc/rng.hpp"
#include "gradeloc/scenario_io.hpp"
