#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace qcdma {

using Rng = std::mt19937_64;

/// Per-trial generator derived from (master seed, trial index). Results
/// depend only on these two numbers, never on scheduling.
Rng trial_rng(std::uint64_t master_seed, std::uint64_t trial_index);

/// Worker count: QCDMA_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, count) over worker_count() threads. The first
/// exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qcdma
