#pragma once

#include "derham/digits.hpp"
#include "derham/errors.hpp"
#include "derham/geometry.hpp"
#include "derham/io.hpp"
#include "derham/map.hpp"
#include "derham/oracles.hpp"
#include "derham/parallel.hpp"
#include "derham/perturbation.hpp"
#include "derham/presets.hpp"
#include "derham/rational.hpp"
#include "derham/regularity.hpp"
#include "derham/solver.hpp"
#include "derham/system.hpp"
#include "derham/wide_real.hpp"
