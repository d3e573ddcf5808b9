#pragma once

#include "ftcal/calibrate.hpp"
#include "ftcal/data.hpp"
#include "ftcal/errors.hpp"
#include "ftcal/features.hpp"
#include "ftcal/metrics.hpp"
#include "ftcal/model.hpp"
#include "ftcal/simulator.hpp"
#include "ftcal/solver.hpp"
#include "ftcal/types.hpp"
