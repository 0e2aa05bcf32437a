#pragma once

#include "fpplan/config_space.hpp"
#include "fpplan/environment.hpp"
#include "fpplan/error.hpp"
#include "fpplan/expansion.hpp"
#include "fpplan/feasibility.hpp"
#include "fpplan/fpe.hpp"
#include "fpplan/graph_gen.hpp"
#include "fpplan/output.hpp"
#include "fpplan/path_find.hpp"
#include "fpplan/planner.hpp"
#include "fpplan/region.hpp"
#include "fpplan/scenario.hpp"
#include "fpplan/search_graph.hpp"
#include "fpplan/trap_escape.hpp"
#include "fpplan/verify.hpp"
