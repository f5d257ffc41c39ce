#pragma once

#include "cifv/analysis.hpp"
#include "cifv/errors.hpp"
#include "cifv/grid.hpp"
#include "cifv/limiters.hpp"
#include "cifv/positivity.hpp"
#include "cifv/problems.hpp"
#include "cifv/scheme.hpp"
#include "cifv/solver.hpp"
