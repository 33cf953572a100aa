#pragma once

#include "evoselect/baselines.hpp"
#include "evoselect/benchmark.hpp"
#include "evoselect/chromosome.hpp"
#include "evoselect/dataset.hpp"
#include "evoselect/error.hpp"
#include "evoselect/executor.hpp"
#include "evoselect/fitness.hpp"
#include "evoselect/ga.hpp"
#include "evoselect/metrics.hpp"
#include "evoselect/models.hpp"
#include "evoselect/reporting.hpp"
#include "evoselect/rng.hpp"
#include "evoselect/synth.hpp"
