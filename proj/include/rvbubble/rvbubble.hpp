#pragma once

#include "rvbubble/bootstrap.hpp"
#include "rvbubble/critical_values.hpp"
#include "rvbubble/datestamp.hpp"
#include "rvbubble/devolatize.hpp"
#include "rvbubble/df_engine.hpp"
#include "rvbubble/error.hpp"
#include "rvbubble/format.hpp"
#include "rvbubble/grid.hpp"
#include "rvbubble/kappa_schedule.hpp"
#include "rvbubble/mc_harness.hpp"
#include "rvbubble/pipeline.hpp"
#include "rvbubble/random.hpp"
#include "rvbubble/realized_variance.hpp"
#include "rvbubble/simulate.hpp"
#include "rvbubble/version.hpp"
