#pragma once

#include "fbmts/error.hpp"
#include "fbmts/fbm_model.hpp"
#include "fbmts/fbm_sim.hpp"
#include "fbmts/gaussianize.hpp"
#include "fbmts/hurst_estimate.hpp"
#include "fbmts/hypothesis_test.hpp"
#include "fbmts/pipeline.hpp"
#include "fbmts/report.hpp"
#include "fbmts/series_io.hpp"
