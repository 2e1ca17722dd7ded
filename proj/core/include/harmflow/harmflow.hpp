#pragma once

#include "harmflow/analyzer.hpp"
#include "harmflow/circuit.hpp"
#include "harmflow/error.hpp"
#include "harmflow/filter_design.hpp"
#include "harmflow/network.hpp"
#include "harmflow/scenario_io.hpp"
#include "harmflow/simulator.hpp"
