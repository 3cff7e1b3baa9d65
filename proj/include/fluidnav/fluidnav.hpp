#pragma once

#include "fluidnav/clusters.hpp"
#include "fluidnav/errors.hpp"
#include "fluidnav/field_grid.hpp"
#include "fluidnav/flow_field.hpp"
#include "fluidnav/guidance.hpp"
#include "fluidnav/kinematics.hpp"
#include "fluidnav/scenario.hpp"
#include "fluidnav/scenario_file.hpp"
#include "fluidnav/sim_engine.hpp"
#include "fluidnav/svg_plot.hpp"
#include "fluidnav/trajectory_log.hpp"
#include "fluidnav/trajectory_table.hpp"
