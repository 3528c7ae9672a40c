#pragma once

#include "pdnet/analysis.hpp"
#include "pdnet/config.hpp"
#include "pdnet/data_model.hpp"
#include "pdnet/error.hpp"
#include "pdnet/graph.hpp"
#include "pdnet/linalg.hpp"
#include "pdnet/montecarlo.hpp"
#include "pdnet/scenarios.hpp"
#include "pdnet/strategies.hpp"
