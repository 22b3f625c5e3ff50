#pragma once

#include "adens/anova.hpp"
#include "adens/compare.hpp"
#include "adens/core.hpp"
#include "adens/csv.hpp"
#include "adens/detector.hpp"
#include "adens/ensemble.hpp"
#include "adens/iforest.hpp"
#include "adens/metrics.hpp"
#include "adens/model_io.hpp"
#include "adens/normalize.hpp"
#include "adens/ocnn.hpp"
#include "adens/ocsvm.hpp"
#include "adens/regress.hpp"
#include "adens/rng.hpp"
#include "adens/simulate.hpp"
#include "adens/voting.hpp"
