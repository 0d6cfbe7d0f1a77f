#pragma once

// Learning-rate schedules and the append-only prefix tables behind the
// constant-time delayed regularization updates.

#include <cmath>
#include <cstdint>
#include <vector>

#include "lazyreg/errors.hpp"

namespace lazyreg {

enum class Algo { Sgd, Fobos };

enum class RateKind { Constant, InverseT, InverseSqrtT };

// eta(t) for integer step t >= 0. The 1+t shift keeps eta(0) finite.
struct Schedule {
  RateKind kind = RateKind::Constant;
  double eta0 = 0.1;

  double rate_at(std::int64_t t) const {
    switch (kind) {
      case RateKind::Constant:
        return eta0;
      case RateKind::InverseT:
        return eta0 / (1.0 + static_cast<double>(t));
      case RateKind::InverseSqrtT:
        return eta0 / std::sqrt(1.0 + static_cast<double>(t));
    }
    return eta0;  // unreachable
  }
};

// Prefix sums/products over the rate schedule, indexed by global step.
// With r = t - base the tables hold, for r >= 0:
//
//   rate_sum(t)     = rate_sum(t-1)     + eta(t)                   base case 0
//   sgd_decay(t)    = sgd_decay(t-1)    * (1 - eta(t)*lambda2)     base case 1
//   sgd_l1_sum(t)   = sgd_l1_sum(t-1)   + eta(t) / sgd_decay(t)    base case 0
//   fobos_decay(t)  = fobos_decay(t-1)  / (1 + eta(t)*lambda2)     base case 1
//   fobos_l1_sum(t) = fobos_l1_sum(t-1) + eta(t) / fobos_decay(t-1) base case 0
//
// t = base - 1 is the virtual index returning the base case. eta is always
// evaluated at the global step, so rebasing never changes the rate sequence.
//
// Single-writer: one trainer appends, lookups from the same logical thread.
// A fully extended cache may be shared read-only.
class ScheduleCache {
 public:
  ScheduleCache(Schedule sched, double lambda2, Algo algo);

  // Appends entries for global steps (high_water, t]. Amortized O(1) per new
  // step, idempotent when already covered. In SGD mode throws InvalidRate if
  // any new step has 1 - eta*lambda2 <= 0.
  void extend_to(std::int64_t t);

  // Drops all entries and moves the virtual -1 index to new_base - 1. The
  // caller promises no live timestamp is older than new_base.
  void rebase(std::int64_t new_base);

  double rate_sum(std::int64_t t) const { return at(rate_sum_, t, 0.0, "rate_sum"); }
  double sgd_decay(std::int64_t t) const { return at(sgd_decay_, t, 1.0, "sgd_decay"); }
  double sgd_l1_sum(std::int64_t t) const { return at(sgd_l1_sum_, t, 0.0, "sgd_l1_sum"); }
  double fobos_decay(std::int64_t t) const { return at(fobos_decay_, t, 1.0, "fobos_decay"); }
  double fobos_l1_sum(std::int64_t t) const { return at(fobos_l1_sum_, t, 0.0, "fobos_l1_sum"); }

  std::int64_t base() const { return base_; }
  // Largest global step with a cached entry; base - 1 when empty.
  std::int64_t high_water() const {
    return base_ + static_cast<std::int64_t>(rate_sum_.size()) - 1;
  }
  std::int64_t cached_entries() const {
    return static_cast<std::int64_t>(rate_sum_.size());
  }

  const Schedule& schedule() const { return sched_; }
  double lambda2() const { return lambda2_; }
  Algo algo() const { return algo_; }

  // True once the mode's decay table has drifted below 1e-100 relative to the
  // current base; the trainer reacts by flushing and rebasing. Cleared by
  // rebase.
  bool underflow_pending() const { return underflow_; }

  std::uint64_t lookup_count() const { return lookups_; }
  void reset_lookup_count() const { lookups_ = 0; }

 private:
  double at(const std::vector<double>& tbl, std::int64_t t, double base_case,
            const char* name) const {
    ++lookups_;
    const std::int64_t r = t - base_;
    if (r == -1) return base_case;
    if (r < -1 || r >= static_cast<std::int64_t>(tbl.size()))
      throw_out_of_range(t, name);
    return tbl[static_cast<std::size_t>(r)];
  }
  [[noreturn]] void throw_out_of_range(std::int64_t t, const char* name) const;

  Schedule sched_;
  double lambda2_;
  Algo algo_;
  std::int64_t base_ = 0;
  bool underflow_ = false;
  std::vector<double> rate_sum_, sgd_decay_, sgd_l1_sum_, fobos_decay_,
      fobos_l1_sum_;
  mutable std::uint64_t lookups_ = 0;
};

}  // namespace lazyreg
