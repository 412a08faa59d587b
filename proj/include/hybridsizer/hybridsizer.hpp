#pragma once

// Umbrella header for the hybrid renewable microgrid design engine.

#include "hybridsizer/calendar.hpp"
#include "hybridsizer/digest.hpp"
#include "hybridsizer/dispatch.hpp"
#include "hybridsizer/econ.hpp"
#include "hybridsizer/emissions.hpp"
#include "hybridsizer/ingest.hpp"
#include "hybridsizer/manifest.hpp"
#include "hybridsizer/model.hpp"
#include "hybridsizer/optimize.hpp"
#include "hybridsizer/power.hpp"
#include "hybridsizer/report.hpp"
#include "hybridsizer/scenario_json.hpp"
#include "hybridsizer/version.hpp"
