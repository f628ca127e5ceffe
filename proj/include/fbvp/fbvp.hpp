#pragma once

#include "fbvp/analysis.hpp"
#include "fbvp/error.hpp"
#include "fbvp/expr.hpp"
#include "fbvp/grid.hpp"
#include "fbvp/hermite.hpp"
#include "fbvp/kernel.hpp"
#include "fbvp/problem.hpp"
#include "fbvp/registry.hpp"
#include "fbvp/solver.hpp"
