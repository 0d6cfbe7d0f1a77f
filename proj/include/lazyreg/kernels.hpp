#pragma once

// Closed-form regularization updates: the single-step dense rules, their
// constant-time multi-step (lazy) counterparts built on ScheduleCache, and
// the sequential brute-force oracle the lazy forms are tested against.
//
// Magnitude view used throughout: with u = |w|, one regularization-only step
// at rate eta is
//   SGD elastic:   u' = [(1 - eta*lambda2) * u - eta*lambda1]+
//   FoBoS elastic: u' = [(u - eta*lambda1) / (1 + eta*lambda2)]+
// and the sign never flips. Unrolling from step psi to k and folding the
// products/sums into the cache tables gives each lazy form below. One outer
// clamp is exact: the unclamped recursion, once negative, stays negative.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "lazyreg/errors.hpp"
#include "lazyreg/schedule.hpp"

namespace lazyreg {

struct RegConfig {
  Algo algo = Algo::Sgd;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

// Rejects non-finite or negative lambdas, non-positive eta0, and SGD configs
// with eta0 * lambda2 >= 1 (sufficient for every step since schedules are
// non-increasing). Throws InvalidRate / ContractViolation.
void validate_config(const RegConfig& cfg, const Schedule& sched);

inline double sign_of(double v) {
  return static_cast<double>(v > 0.0) - static_cast<double>(v < 0.0);
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// One SGD elastic-net regularization step at rate eta(t); x_j = 0 case.
inline double step_sgd_elastic(double w, std::int64_t t, const RegConfig& cfg,
                               const Schedule& sched) {
  const double eta = sched.rate_at(t);
  if (eta * cfg.lambda2 >= 1.0)
    throw InvalidRate("step_sgd_elastic: eta * lambda2 >= 1");
  const double mag = (1.0 - eta * cfg.lambda2) * std::abs(w) - eta * cfg.lambda1;
  return sign_of(w) * std::max(mag, 0.0);
}

// One FoBoS proximal step: coordinate-wise minimizer of
// 0.5*(w' - w)^2 + eta*lambda1*|w'| + 0.5*eta*lambda2*w'^2.
inline double step_fobos_elastic(double w, std::int64_t t, const RegConfig& cfg,
                                 const Schedule& sched) {
  const double eta = sched.rate_at(t);
  const double mag = (std::abs(w) - eta * cfg.lambda1) / (1.0 + eta * cfg.lambda2);
  return sign_of(w) * std::max(mag, 0.0);
}

// The proximal objective step_fobos_elastic minimizes; kept as an independent
// check, not used on any training path.
inline double fobos_prox_objective(double w_candidate, double w_half,
                                   std::int64_t t, const RegConfig& cfg,
                                   const Schedule& sched) {
  const double eta = sched.rate_at(t);
  const double dist = w_candidate - w_half;
  return 0.5 * dist * dist + eta * cfg.lambda1 * std::abs(w_candidate) +
         0.5 * eta * cfg.lambda2 * w_candidate * w_candidate;
}

namespace detail {
inline void check_lazy_args(double w, std::int64_t psi, std::int64_t k) {
  if (!std::isfinite(w))
    throw ContractViolation("lazy update: weight is not finite");
  if (psi > k) throw ContractViolation("lazy update: psi > k");
}
}  // namespace detail

// All lazy forms bring a weight from step psi to step k in O(1): they read a
// fixed number of cache entries regardless of k - psi. The cache must be
// extended through k - 1. psi == k returns w untouched.

inline double lazy_l1_sgd(double w, std::int64_t psi, std::int64_t k,
                          const RegConfig& cfg, const ScheduleCache& cache) {
  detail::check_lazy_args(w, psi, k);
  if (psi == k) return w;
  const double drop =
      cfg.lambda1 * (cache.rate_sum(k - 1) - cache.rate_sum(psi - 1));
  return sign_of(w) * std::max(std::abs(w) - drop, 0.0);
}

inline double lazy_l2sq_sgd(double w, std::int64_t psi, std::int64_t k,
                            const RegConfig& cfg, const ScheduleCache& cache) {
  (void)cfg;
  detail::check_lazy_args(w, psi, k);
  if (psi == k) return w;
  return w * (cache.sgd_decay(k - 1) / cache.sgd_decay(psi - 1));
}

inline double lazy_elastic_sgd(double w, std::int64_t psi, std::int64_t k,
                               const RegConfig& cfg,
                               const ScheduleCache& cache) {
  detail::check_lazy_args(w, psi, k);
  if (psi == k) return w;
  const double decay_k = cache.sgd_decay(k - 1);
  const double ratio = decay_k / cache.sgd_decay(psi - 1);
  const double drop = cfg.lambda1 * decay_k *
                      (cache.sgd_l1_sum(k - 1) - cache.sgd_l1_sum(psi - 1));
  return sign_of(w) * std::max(std::abs(w) * ratio - drop, 0.0);
}

inline double lazy_l2sq_fobos(double w, std::int64_t psi, std::int64_t k,
                              const RegConfig& cfg,
                              const ScheduleCache& cache) {
  (void)cfg;
  detail::check_lazy_args(w, psi, k);
  if (psi == k) return w;
  return w * (cache.fobos_decay(k - 1) / cache.fobos_decay(psi - 1));
}

inline double lazy_elastic_fobos(double w, std::int64_t psi, std::int64_t k,
                                 const RegConfig& cfg,
                                 const ScheduleCache& cache) {
  detail::check_lazy_args(w, psi, k);
  if (psi == k) return w;
  const double decay_k = cache.fobos_decay(k - 1);
  const double ratio = decay_k / cache.fobos_decay(psi - 1);
  const double drop =
      cfg.lambda1 * decay_k *
      (cache.fobos_l1_sum(k - 1) - cache.fobos_l1_sum(psi - 1));
  return sign_of(w) * std::max(std::abs(w) * ratio - drop, 0.0);
}

// Reference semantics for every lazy form: k - psi single steps applied in
// order. Deliberately cache-free so it shares nothing with the paths it
// checks.
double sequential_oracle(double w, std::int64_t psi, std::int64_t k,
                         const RegConfig& cfg, const Schedule& sched);

}  // namespace lazyreg
