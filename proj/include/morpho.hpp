#pragma once

#include "morpho/errors.hpp"
#include "morpho/rng.hpp"
#include "morpho/grid.hpp"
#include "morpho/image.hpp"
#include "morpho/lattice.hpp"
#include "morpho/agent.hpp"
#include "morpho/population.hpp"
#include "morpho/world.hpp"
#include "morpho/geometry.hpp"
#include "morpho/shapes.hpp"
#include "morpho/experiments.hpp"
#include "morpho/metrics.hpp"
#include "morpho/config.hpp"
#include "morpho/batch.hpp"
