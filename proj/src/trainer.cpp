#include "lazyreg/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "lazyreg/rng.hpp"

namespace lazyreg {

namespace {

std::int64_t count_nonzero(const std::vector<double>& w) {
  std::int64_t nnz = 0;
  for (const double v : w) nnz += v != 0.0;
  return nnz;
}

double per_example_seconds(double elapsed, std::int64_t steps) {
  return std::max(elapsed, 1e-9) / static_cast<double>(std::max<std::int64_t>(steps, 1));
}

// Pending regularization of step t, applied to every coordinate. Factors are
// hoisted; the per-coordinate expressions match step_sgd_elastic /
// step_fobos_elastic bit for bit.
void regularize_all(std::vector<double>& w, std::int64_t t,
                    const RegConfig& cfg, const Schedule& sched) {
  const double eta = sched.rate_at(t);
  if (cfg.algo == Algo::Sgd) {
    const double keep = 1.0 - eta * cfg.lambda2;
    if (keep <= 0.0) throw InvalidRate("dense step: eta * lambda2 >= 1");
    const double drop = eta * cfg.lambda1;
    for (double& v : w) v = sign_of(v) * std::max(keep * std::abs(v) - drop, 0.0);
  } else {
    const double scale = 1.0 + eta * cfg.lambda2;
    const double drop = eta * cfg.lambda1;
    for (double& v : w)
      v = sign_of(v) * std::max((std::abs(v) - drop) / scale, 0.0);
  }
}

}  // namespace

Trainer::Trainer(std::int64_t dim, RegConfig cfg, Schedule sched,
                 std::int64_t flush_budget)
    : slots_(static_cast<std::size_t>(dim)),
      cache_(sched, cfg.lambda2, cfg.algo),
      cfg_(cfg),
      sched_(sched),
      flush_budget_(flush_budget) {
  if (dim < 0) throw ContractViolation("Trainer: negative dimension");
  if (flush_budget_ < 1) throw ContractViolation("Trainer: flush_budget < 1");
}

std::vector<double> Trainer::weights() const {
  std::vector<double> w(slots_.size());
  for (std::size_t j = 0; j < slots_.size(); ++j) w[j] = slots_[j].w;
  return w;
}

std::vector<std::int64_t> Trainer::timestamps() const {
  std::vector<std::int64_t> psi(slots_.size());
  for (std::size_t j = 0; j < slots_.size(); ++j) psi[j] = slots_[j].psi;
  return psi;
}

double Trainer::predict(const SparseExample& x) const {
  double margin = 0.0;
  for (std::size_t i = 0; i < x.indices.size(); ++i)
    margin += slots_[static_cast<std::size_t>(x.indices[i])].w * x.values[i];
  return sigmoid(margin);
}

double Trainer::lazy_apply(double w, std::int64_t psi, std::int64_t k) const {
  if (psi + 1 == k) {
    // Single pending step: the dense update is the one-factor closed form.
    return cfg_.algo == Algo::Sgd ? step_sgd_elastic(w, psi, cfg_, sched_)
                                  : step_fobos_elastic(w, psi, cfg_, sched_);
  }
  if (cfg_.algo == Algo::Sgd) {
    if (cfg_.lambda2 == 0.0)
      return cfg_.lambda1 == 0.0 ? w : lazy_l1_sgd(w, psi, k, cfg_, cache_);
    if (cfg_.lambda1 == 0.0) return lazy_l2sq_sgd(w, psi, k, cfg_, cache_);
    return lazy_elastic_sgd(w, psi, k, cfg_, cache_);
  }
  if (cfg_.lambda1 == 0.0)
    return cfg_.lambda2 == 0.0 ? w : lazy_l2sq_fobos(w, psi, k, cfg_, cache_);
  return lazy_elastic_fobos(w, psi, k, cfg_, cache_);
}

void Trainer::bring_current(std::int64_t j, std::int64_t k) {
  Slot& s = slots_[static_cast<std::size_t>(j)];
  if (s.psi == k) return;
  s.w = lazy_apply(s.w, s.psi, k);
  s.psi = k;
}

void Trainer::step(const SparseExample& x) {
  const std::int64_t t = clock_;
  cache_.extend_to(t);

  // Hoisted factors for coordinates exactly one step behind (hot features);
  // same expression shapes as the dense trainer's per-step update.
  const bool sgd = cfg_.algo == Algo::Sgd;
  double one_keep = 1.0, one_scale = 1.0, one_drop = 0.0;
  if (t > 0) {
    const double eta_prev = sched_.rate_at(t - 1);
    one_drop = eta_prev * cfg_.lambda1;
    if (sgd)
      one_keep = 1.0 - eta_prev * cfg_.lambda2;
    else
      one_scale = 1.0 + eta_prev * cfg_.lambda2;
  }

  // Bring-current and the dot product fuse into one pass: each term only
  // needs its own coordinate current.
  const std::size_t nnz = x.indices.size();
  double margin = 0.0;
  for (std::size_t i = 0; i < nnz; ++i) {
    Slot& s = slots_[static_cast<std::size_t>(x.indices[i])];
    if (s.psi != t) {
      if (s.psi == t - 1)
        s.w = sgd ? sign_of(s.w) *
                        std::max(one_keep * std::abs(s.w) - one_drop, 0.0)
                  : sign_of(s.w) *
                        std::max((std::abs(s.w) - one_drop) / one_scale, 0.0);
      else
        s.w = lazy_apply(s.w, s.psi, t);
      s.psi = t;
    }
    margin += s.w * x.values[i];
  }
  if (!std::isfinite(margin))
    throw ContractViolation("step: non-finite prediction margin");

  const double y = static_cast<double>(x.label);
  const double slope = sigmoid(-y * margin);  // dL/dmargin = -y * slope
  const double grad_scale = sched_.rate_at(t) * y * slope;
  for (std::size_t i = 0; i < nnz; ++i)
    slots_[static_cast<std::size_t>(x.indices[i])].w += grad_scale * x.values[i];

  step_touches_ += 3 * nnz;  // bring + read + gradient write per feature
  clock_ = t + 1;
  ++steps_since_flush_;
  ++steps_;
}

void Trainer::flush() {
  for (Slot& s : slots_) {
    if (s.psi < clock_) {
      ++flush_touches_;
      // Zero is absorbing under both step rules, so it can skip the kernel.
      if (s.w != 0.0) s.w = lazy_apply(s.w, s.psi, clock_);
      s.psi = clock_;
    }
  }
  cache_.rebase(clock_);
  ++flush_count_;
  steps_since_flush_ = 0;
}

std::pair<std::vector<double>, TrainReport> train(const Dataset& data,
                                                  const RegConfig& cfg,
                                                  const Schedule& sched,
                                                  const TrainOptions& opts,
                                                  TrainStats* stats) {
  validate_config(cfg, sched);
  if (data.n() == 0) throw ContractViolation("train: empty dataset");
  if (opts.epochs < 0) throw ContractViolation("train: negative epochs");

  const std::int64_t budget =
      opts.flush_budget > 0 ? opts.flush_budget : data.n();
  Trainer tr(data.dim, cfg, sched, budget);

  const auto t0 = std::chrono::steady_clock::now();
  for (std::int64_t epoch = 0; epoch < opts.epochs; ++epoch) {
    auto rng = epoch_rng(opts.seed, epoch);
    for (const std::int64_t i : shuffled_indices(data.n(), rng)) {
      if (tr.needs_flush()) tr.flush();
      tr.step(data.examples[static_cast<std::size_t>(i)]);
    }
    tr.flush();  // per-epoch flush; also the final bring-current pass
  }
  if (opts.epochs == 0) tr.flush();  // final flush; a no-op on zero weights
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - t0;

  if (stats)
    *stats = {tr.steps(), tr.step_weight_touches(), tr.flush_weight_touches()};

  std::vector<double> w = tr.weights();
  TrainReport rep;
  rep.epochs_run = opts.epochs;
  rep.final_loss = objective(data, w, cfg);
  rep.nonzero_weights = count_nonzero(w);
  rep.per_example_seconds = per_example_seconds(elapsed.count(), tr.steps());
  rep.flush_count = tr.flush_count();
  return {std::move(w), rep};
}

std::pair<std::vector<double>, TrainReport> train_dense(
    const Dataset& data, const RegConfig& cfg, const Schedule& sched,
    const TrainOptions& opts, bool sparse_predictions, TrainStats* stats) {
  validate_config(cfg, sched);
  if (data.n() == 0) throw ContractViolation("train_dense: empty dataset");
  if (opts.epochs < 0) throw ContractViolation("train_dense: negative epochs");

  const auto d = static_cast<std::size_t>(data.dim);
  std::vector<double> w(d, 0.0);
  std::vector<double> scatter(sparse_predictions ? 0 : d, 0.0);
  std::int64_t t = 0;
  std::uint64_t touches = 0;

  const auto t0 = std::chrono::steady_clock::now();
  for (std::int64_t epoch = 0; epoch < opts.epochs; ++epoch) {
    auto rng = epoch_rng(opts.seed, epoch);
    for (const std::int64_t i : shuffled_indices(data.n(), rng)) {
      const SparseExample& x = data.examples[static_cast<std::size_t>(i)];
      if (t > 0) {
        regularize_all(w, t - 1, cfg, sched);
        touches += d;
      }

      double margin = 0.0;
      if (sparse_predictions) {
        margin = dot(w, x);
        touches += x.indices.size();
      } else {
        for (std::size_t f = 0; f < x.indices.size(); ++f)
          scatter[static_cast<std::size_t>(x.indices[f])] = x.values[f];
        for (std::size_t j = 0; j < d; ++j) margin += w[j] * scatter[j];
        for (const std::int64_t idx : x.indices)
          scatter[static_cast<std::size_t>(idx)] = 0.0;
        touches += d;
      }
      if (!std::isfinite(margin))
        throw ContractViolation("dense step: non-finite prediction margin");

      const double y = static_cast<double>(x.label);
      const double slope = sigmoid(-y * margin);
      const double grad_scale = sched.rate_at(t) * y * slope;
      for (std::size_t f = 0; f < x.indices.size(); ++f)
        w[static_cast<std::size_t>(x.indices[f])] += grad_scale * x.values[f];
      touches += x.indices.size();
      ++t;
    }
  }
  if (t > 0) {
    regularize_all(w, t - 1, cfg, sched);  // last step's pending update
    touches += d;
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - t0;

  if (stats) *stats = {t, touches, 0};

  TrainReport rep;
  rep.epochs_run = opts.epochs;
  rep.final_loss = objective(data, w, cfg);
  rep.nonzero_weights = count_nonzero(w);
  rep.per_example_seconds = per_example_seconds(elapsed.count(), t);
  rep.flush_count = 0;
  return {std::move(w), rep};
}

double objective(const Dataset& data, std::span<const double> weights,
                 const RegConfig& cfg) {
  double loss = 0.0;
  for (const auto& ex : data.examples) {
    const double z = static_cast<double>(ex.label) * dot(weights, ex);
    // log(1 + exp(-z)) without overflow
    loss += z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
  }
  if (!data.examples.empty()) loss /= static_cast<double>(data.examples.size());

  double l1 = 0.0, l2 = 0.0;
  for (const double v : weights) {
    l1 += std::abs(v);
    l2 += v * v;
  }
  return loss + cfg.lambda1 * l1 + 0.5 * cfg.lambda2 * l2;
}

}  // namespace lazyreg
