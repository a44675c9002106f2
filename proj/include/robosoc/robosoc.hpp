#pragma once

// Umbrella header.

#include "robosoc/control.hpp"
#include "robosoc/errors.hpp"
#include "robosoc/geometry.hpp"
#include "robosoc/match.hpp"
#include "robosoc/shoot.hpp"
#include "robosoc/svg_plot.hpp"
#include "robosoc/tracker.hpp"
#include "robosoc/trajectory_log.hpp"
#include "robosoc/vision.hpp"
#include "robosoc/world.hpp"
