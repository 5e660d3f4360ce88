#pragma once

#include "pvdg/cli.hpp"
#include "pvdg/config.hpp"
#include "pvdg/csv_io.hpp"
#include "pvdg/diesel_model.hpp"
#include "pvdg/dispatch.hpp"
#include "pvdg/grid_model.hpp"
#include "pvdg/oracle.hpp"
#include "pvdg/scenario.hpp"
#include "pvdg/solar_model.hpp"
#include "pvdg/svg_plot.hpp"
#include "pvdg/synthetic.hpp"
