#pragma once

// Lazy training loop (per-coordinate timestamps + constant-time bring-current)
// and the dense baseline trainers it is benchmarked against. Training is
// strictly sequential; finished weight vectors are immutable and shareable.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lazyreg/data.hpp"
#include "lazyreg/kernels.hpp"
#include "lazyreg/schedule.hpp"

namespace lazyreg {

struct TrainOptions {
  std::int64_t epochs = 1;
  // Max steps between flushes; <= 0 means one epoch's worth.
  std::int64_t flush_budget = 0;
  std::uint64_t seed = 1;
};

struct TrainReport {
  std::int64_t epochs_run = 0;
  double final_loss = 0.0;  // mean regularized objective over the training set
  std::int64_t nonzero_weights = 0;
  double per_example_seconds = 0.0;
  std::int64_t flush_count = 0;
};

// Operation counters backing the O(p) work-bound checks.
struct TrainStats {
  std::int64_t steps = 0;
  std::uint64_t step_weight_touches = 0;   // weight reads/writes inside steps
  std::uint64_t flush_weight_touches = 0;  // weight visits during flushes
};

inline double dot(std::span<const double> w, const SparseExample& x) {
  double margin = 0.0;
  for (std::size_t i = 0; i < x.indices.size(); ++i)
    margin += w[static_cast<std::size_t>(x.indices[i])] * x.values[i];
  return margin;
}

inline double predict_one(std::span<const double> w, const SparseExample& x) {
  return sigmoid(dot(w, x));
}

// Weight table + timestamp table + step clock. Invariants: psi[j] <= clock
// for all j; weights finite. psi[j] = t means w[j] carries the loss gradient
// of step t (if touched then) and all regularization strictly before t;
// regularization for steps t..k-1 is applied lazily on the next touch at k.
//
// Weight and timestamp live in one 16-byte slot so a feature touch costs a
// single cache line.
class Trainer {
 public:
  Trainer(std::int64_t dim, RegConfig cfg, Schedule sched,
          std::int64_t flush_budget);

  // Applies the pending k - psi[j] regularization updates in O(1) and stamps
  // psi[j] = k.
  void bring_current(std::int64_t j, std::int64_t k);

  // One SGD / FoBoS step on example x at the current clock: bring the touched
  // coordinates current, predict, apply the loss gradient at rate eta(t).
  // The step-t regularization is left pending for every coordinate.
  void step(const SparseExample& x);

  // Probability for x; the caller has brought x's coordinates current.
  double predict(const SparseExample& x) const;

  // Brings every coordinate current and rebases the cache at the clock.
  // Idempotent.
  void flush();

  bool needs_flush() const {
    return steps_since_flush_ >= flush_budget_ || cache_.underflow_pending();
  }

  std::vector<double> weights() const;
  std::vector<std::int64_t> timestamps() const;
  std::int64_t clock() const { return clock_; }
  std::int64_t flush_count() const { return flush_count_; }
  const ScheduleCache& cache() const { return cache_; }

  std::int64_t steps() const { return steps_; }
  std::uint64_t step_weight_touches() const { return step_touches_; }
  std::uint64_t flush_weight_touches() const { return flush_touches_; }

 private:
  struct Slot {
    double w = 0.0;
    std::int64_t psi = 0;
  };

  double lazy_apply(double w, std::int64_t psi, std::int64_t k) const;

  std::vector<Slot> slots_;
  std::int64_t clock_ = 0;
  ScheduleCache cache_;
  RegConfig cfg_;
  Schedule sched_;
  std::int64_t flush_budget_;
  std::int64_t steps_since_flush_ = 0;
  std::int64_t steps_ = 0;
  std::int64_t flush_count_ = 0;
  std::uint64_t step_touches_ = 0;
  std::uint64_t flush_touches_ = 0;
};

// Runs `epochs` seeded-permutation passes with lazy updates, flushing at each
// epoch end, whenever flush_budget steps have elapsed, and whenever the cache
// underflow guard fires. Deterministic for a fixed seed.
std::pair<std::vector<double>, TrainReport> train(const Dataset& data,
                                                  const RegConfig& cfg,
                                                  const Schedule& sched,
                                                  const TrainOptions& opts,
                                                  TrainStats* stats = nullptr);

// Same visiting order and per-step semantics, but each step's regularization
// is applied eagerly to all d coordinates (at the start of the next step, so
// the ordering matches the lazy trainer). With sparse_predictions the dot
// product touches only nonzero features; otherwise it walks all d.
std::pair<std::vector<double>, TrainReport> train_dense(
    const Dataset& data, const RegConfig& cfg, const Schedule& sched,
    const TrainOptions& opts, bool sparse_predictions,
    TrainStats* stats = nullptr);

// Mean logistic loss + lambda1*||w||_1 + (lambda2/2)*||w||_2^2.
double objective(const Dataset& data, std::span<const double> weights,
                 const RegConfig& cfg);

}  // namespace lazyreg
