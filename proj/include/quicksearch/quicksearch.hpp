#pragma once

#include "quicksearch/analysis.hpp"
#include "quicksearch/baselines.hpp"
#include "quicksearch/csv.hpp"
#include "quicksearch/engine.hpp"
#include "quicksearch/errors.hpp"
#include "quicksearch/extremes.hpp"
#include "quicksearch/gains.hpp"
#include "quicksearch/model.hpp"
#include "quicksearch/policy.hpp"
#include "quicksearch/rng.hpp"

namespace quicksearch {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace quicksearch
