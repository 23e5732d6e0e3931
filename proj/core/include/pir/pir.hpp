#pragma once

#include "pir/csv.hpp"
#include "pir/differentiation.hpp"
#include "pir/epidemic_data.hpp"
#include "pir/error.hpp"
#include "pir/estimation.hpp"
#include "pir/integrator.hpp"
#include "pir/models.hpp"
#include "pir/regression.hpp"
#include "pir/reynolds.hpp"
#include "pir/snapshot_io.hpp"
#include "pir/sweep.hpp"
