#pragma once

#include "rccat/baseline.hpp"
#include "rccat/bench.hpp"
#include "rccat/datagen.hpp"
#include "rccat/detector.hpp"
#include "rccat/errors.hpp"
#include "rccat/estimators.hpp"
#include "rccat/io.hpp"
#include "rccat/metrics.hpp"
#include "rccat/random.hpp"
#include "rccat/time_series.hpp"
#include "rccat/version.hpp"
