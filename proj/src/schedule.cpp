#include "lazyreg/schedule.hpp"

#include <string>

namespace lazyreg {

namespace {
constexpr double kUnderflowFloor = 1e-100;
}

ScheduleCache::ScheduleCache(Schedule sched, double lambda2, Algo algo)
    : sched_(sched), lambda2_(lambda2), algo_(algo) {
  if (!(sched_.eta0 > 0.0) || !std::isfinite(sched_.eta0))
    throw ContractViolation("ScheduleCache: eta0 must be positive");
  if (!(lambda2_ >= 0.0) || !std::isfinite(lambda2_))
    throw ContractViolation("ScheduleCache: lambda2 must be non-negative");
}

void ScheduleCache::extend_to(std::int64_t t) {
  if (t < base_ - 1)
    throw ContractViolation("ScheduleCache::extend_to: t precedes base - 1");
  for (std::int64_t g = high_water() + 1; g <= t; ++g) {
    const double eta = sched_.rate_at(g);
    const double keep = 1.0 - eta * lambda2_;
    if (algo_ == Algo::Sgd && keep <= 0.0)
      throw InvalidRate("eta(" + std::to_string(g) + ") * lambda2 = " +
                        std::to_string(eta * lambda2_) +
                        " >= 1 breaks SGD positivity");

    const bool first = rate_sum_.empty();
    const double s_prev = first ? 0.0 : rate_sum_.back();
    const double p_prev = first ? 1.0 : sgd_decay_.back();
    const double b_prev = first ? 0.0 : sgd_l1_sum_.back();
    const double phi_prev = first ? 1.0 : fobos_decay_.back();
    const double beta_prev = first ? 0.0 : fobos_l1_sum_.back();

    const double p = keep * p_prev;
    const double phi = phi_prev / (1.0 + eta * lambda2_);
    rate_sum_.push_back(s_prev + eta);
    sgd_decay_.push_back(p);
    sgd_l1_sum_.push_back(b_prev + eta / p);
    fobos_decay_.push_back(phi);
    fobos_l1_sum_.push_back(beta_prev + eta / phi_prev);

    const double guard = algo_ == Algo::Sgd ? p : phi;
    if (std::abs(guard) < kUnderflowFloor) underflow_ = true;
  }
}

void ScheduleCache::rebase(std::int64_t new_base) {
  if (new_base < base_)
    throw ContractViolation("ScheduleCache::rebase: new_base precedes base");
  base_ = new_base;
  rate_sum_.clear();
  sgd_decay_.clear();
  sgd_l1_sum_.clear();
  fobos_decay_.clear();
  fobos_l1_sum_.clear();
  underflow_ = false;
}

void ScheduleCache::throw_out_of_range(std::int64_t t, const char* name) const {
  throw OutOfRange(std::string(name) + ": step " + std::to_string(t) +
                   " outside cached range [" + std::to_string(base_ - 1) +
                   ", " + std::to_string(high_water()) + "]");
}

}  // namespace lazyreg
