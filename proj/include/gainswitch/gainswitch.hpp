#pragma once

#include "gainswitch/driver_circuits.hpp"
#include "gainswitch/errors.hpp"
#include "gainswitch/io.hpp"
#include "gainswitch/laser_model.hpp"
#include "gainswitch/nelder_mead.hpp"
#include "gainswitch/ode.hpp"
#include "gainswitch/optimal_control.hpp"
#include "gainswitch/pulse_metrics.hpp"
#include "gainswitch/random.hpp"
#include "gainswitch/signal.hpp"
