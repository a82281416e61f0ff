#pragma once
// Umbrella header: the whole library.

#include "bps.hpp"
#include "config.hpp"
#include "diagnostics.hpp"
#include "energy.hpp"
#include "fft.hpp"
#include "field.hpp"
#include "field_io.hpp"
#include "gauge_fix.hpp"
#include "grid.hpp"
#include "reduce.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "seeding.hpp"
#include "solve.hpp"
#include "stress.hpp"
