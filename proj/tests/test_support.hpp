#pragma once

// Shared test helper: applies a lazy operation across [psi, k) the way the
// trainer drives it. The cache is extended one step at a time and, whenever
// its underflow guard fires, the weight is brought current and the cache
// rebased before continuing. With no underflow this is a single closed-form
// call over the whole span.

#include <cstdint>

#include "lazyreg/kernels.hpp"
#include "lazyreg/schedule.hpp"

namespace lazyreg::testing {

template <typename Op>
double guarded_lazy(double w, std::int64_t psi, std::int64_t k,
                    const Schedule& sched, const RegConfig& cfg, Op&& op) {
  ScheduleCache cache(sched, cfg.lambda2, cfg.algo);
  cache.rebase(psi);
  double v = w;
  std::int64_t pos = psi;
  while (pos < k) {
    std::int64_t stop = pos;
    while (stop < k && !cache.underflow_pending()) {
      cache.extend_to(stop);
      ++stop;
    }
    v = op(v, pos, stop, cache);
    cache.rebase(stop);
    pos = stop;
  }
  return v;
}

}  // namespace lazyreg::testing
