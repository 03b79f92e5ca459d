#pragma once

// Umbrella header for the library (the command-line front end lives in cli.hpp).

#include "recurrencelab/bigint.hpp"
#include "recurrencelab/cantor_builder.hpp"
#include "recurrencelab/errors.hpp"
#include "recurrencelab/ext_real.hpp"
#include "recurrencelab/json_io.hpp"
#include "recurrencelab/phi_expr.hpp"
#include "recurrencelab/phi_spec.hpp"
#include "recurrencelab/plan_engine.hpp"
#include "recurrencelab/rate_dim_analysis.hpp"
#include "recurrencelab/return_time.hpp"
#include "recurrencelab/shift_core.hpp"
#include "recurrencelab/subsequences.hpp"
#include "recurrencelab/verify.hpp"
