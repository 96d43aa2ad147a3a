#pragma once

#include "pharmonic/analysis.hpp"
#include "pharmonic/config.hpp"
#include "pharmonic/integrator.hpp"
#include "pharmonic/local_solver.hpp"
#include "pharmonic/ode.hpp"
#include "pharmonic/profile.hpp"
#include "pharmonic/runner.hpp"
#include "pharmonic/warp.hpp"
