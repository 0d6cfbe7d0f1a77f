// Command-line front end: train, predict, verify (lazy vs dense weight
// equivalence), bench (per-example timing of the three trainer variants).
//
// Exit codes: 0 success, 1 verification failure, 2 flag/config error,
// 3 I/O or parse error. Diagnostics go to stderr.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lazyreg/data.hpp"
#include "lazyreg/errors.hpp"
#include "lazyreg/trainer.hpp"

namespace {

using namespace lazyreg;

struct CommonFlags {
  std::string data_path;
  std::string algo = "sgd";
  std::string schedule = "constant";
  double l1 = 0.0;
  double l2 = 0.0;
  double eta0 = 0.1;
  std::int64_t epochs = 1;
  std::int64_t flush_budget = 0;  // 0: one epoch's worth
  std::uint64_t seed = 1;
  std::int64_t dims = 0;  // 0: infer from data
  int index_base = 1;
};

RegConfig to_config(const CommonFlags& f) {
  RegConfig cfg;
  cfg.algo = f.algo == "sgd" ? Algo::Sgd : Algo::Fobos;
  cfg.lambda1 = f.l1;
  cfg.lambda2 = f.l2;
  return cfg;
}

Schedule to_schedule(const CommonFlags& f) {
  Schedule s;
  s.eta0 = f.eta0;
  if (f.schedule == "constant")
    s.kind = RateKind::Constant;
  else if (f.schedule == "inv")
    s.kind = RateKind::InverseT;
  else
    s.kind = RateKind::InverseSqrtT;
  return s;
}

TrainOptions to_options(const CommonFlags& f) {
  TrainOptions o;
  o.epochs = f.epochs;
  o.flush_budget = f.flush_budget;
  o.seed = f.seed;
  return o;
}

void add_trainer_flags(CLI::App* cmd, CommonFlags& f, bool with_data) {
  if (with_data)
    cmd->add_option("--data", f.data_path, "training data, libsvm text")
        ->required();
  cmd->add_option("--algo", f.algo, "optimizer")
      ->check(CLI::IsMember({"sgd", "fobos"}));
  cmd->add_option("--l1", f.l1, "lambda1, L1 strength")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--l2", f.l2, "lambda2, squared-L2 strength")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--eta0", f.eta0, "base learning rate")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--schedule", f.schedule, "learning-rate schedule")
      ->check(CLI::IsMember({"constant", "inv", "invsqrt"}));
  cmd->add_option("--epochs", f.epochs, "training passes")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--flush-budget", f.flush_budget,
                  "max steps between flushes (default: one epoch)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "rng seed");
  if (with_data) {
    cmd->add_option("--dims", f.dims, "feature dimensionality override")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--index-base", f.index_base, "first feature index in data")
        ->check(CLI::IsMember({0, 1}));
  }
}

Dataset load_libsvm_file(const std::string& path, int index_base,
                         std::int64_t dims) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_libsvm(in, index_base, dims > 0 ? dims : -1);
}

void print_summary(const TrainReport& rep) {
  std::printf(
      "epochs=%lld final_loss=%.9g nonzeros=%lld per_example_seconds=%.3g "
      "flush_count=%lld\n",
      static_cast<long long>(rep.epochs_run), rep.final_loss,
      static_cast<long long>(rep.nonzero_weights), rep.per_example_seconds,
      static_cast<long long>(rep.flush_count));
}

int run_train(const CommonFlags& f, const std::string& out_path) {
  const RegConfig cfg = to_config(f);
  const Schedule sched = to_schedule(f);
  validate_config(cfg, sched);

  const Dataset data = load_libsvm_file(f.data_path, f.index_base, f.dims);
  auto [w, rep] = train(data, cfg, sched, to_options(f));

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open '" + out_path + "' for write");
  write_model(w, out);
  if (!out.flush())
    throw std::runtime_error("failed writing '" + out_path + "'");
  print_summary(rep);
  return 0;
}

int run_verify(const CommonFlags& f, double tolerance) {
  const RegConfig cfg = to_config(f);
  const Schedule sched = to_schedule(f);
  validate_config(cfg, sched);

  const Dataset data = load_libsvm_file(f.data_path, f.index_base, f.dims);
  const TrainOptions opts = to_options(f);
  auto [w_lazy, rep_lazy] = train(data, cfg, sched, opts);
  auto [w_dense, rep_dense] = train_dense(data, cfg, sched, opts, true);

  double linf = 0.0, l1 = 0.0;
  for (std::size_t j = 0; j < w_lazy.size(); ++j) {
    const double diff = std::abs(w_lazy[j] - w_dense[j]);
    linf = std::max(linf, diff);
    l1 += diff;
  }
  const bool ok = linf <= tolerance;
  std::printf("linf=%.9g l1=%.9g tolerance=%.9g result=%s\n", linf, l1,
              tolerance, ok ? "pass" : "fail");
  return ok ? 0 : 1;
}

int run_predict(const std::string& model_path, const std::string& data_path,
                int index_base) {
  std::ifstream min(model_path);
  if (!min) throw std::runtime_error("cannot open '" + model_path + "'");
  const std::vector<double> w = read_model(min);

  const Dataset data = load_libsvm_file(data_path, index_base, 0);
  if (data.dim > static_cast<std::int64_t>(w.size()))
    throw DimensionMismatch("data uses feature index " +
                            std::to_string(data.dim - 1) + " but model d is " +
                            std::to_string(w.size()));
  for (const auto& ex : data.examples)
    std::printf("%.9g\n", predict_one(w, ex));
  return 0;
}

struct BenchRow {
  const char* algo;
  double lazy, dense, dense_sparse;
};

double timed_per_example(const Dataset& data, const RegConfig& cfg,
                         const Schedule& sched, const TrainOptions& opts,
                         int variant) {
  TrainOptions warm = opts;
  warm.epochs = 1;  // warmup pass, excluded from timing
  TrainReport rep;
  switch (variant) {
    case 0:
      train(data, cfg, sched, warm);
      rep = train(data, cfg, sched, opts).second;
      break;
    case 1:
      train_dense(data, cfg, sched, warm, false);
      rep = train_dense(data, cfg, sched, opts, false).second;
      break;
    default:
      train_dense(data, cfg, sched, warm, true);
      rep = train_dense(data, cfg, sched, opts, true).second;
      break;
  }
  return rep.per_example_seconds;
}

int run_bench(const CommonFlags& f, std::int64_t n, std::int64_t d,
              std::int64_t p, double weight_sparsity, bool machine) {
  const Schedule sched = to_schedule(f);
  for (const char* algo : {"sgd", "fobos"}) {
    CommonFlags probe = f;
    probe.algo = algo;
    validate_config(to_config(probe), sched);
  }

  const SyntheticData syn = generate_synthetic(n, d, p, weight_sparsity, f.seed);
  const TrainOptions opts = to_options(f);

  std::vector<BenchRow> rows;
  for (const char* algo : {"sgd", "fobos"}) {
    CommonFlags af = f;
    af.algo = algo;
    const RegConfig cfg = to_config(af);
    BenchRow row{algo, 0, 0, 0};
    row.lazy = timed_per_example(syn.data, cfg, sched, opts, 0);
    row.dense = timed_per_example(syn.data, cfg, sched, opts, 1);
    row.dense_sparse = timed_per_example(syn.data, cfg, sched, opts, 2);
    rows.push_back(row);
  }

  std::printf("n=%lld d=%lld p_mean=%g seed=%llu epochs=%lld\n",
              static_cast<long long>(n), static_cast<long long>(d),
              syn.data.p_mean(), static_cast<unsigned long long>(f.seed),
              static_cast<long long>(f.epochs));
  std::printf("%-7s %14s %14s %20s %14s %20s\n", "algo", "lazy_s/ex",
              "dense_s/ex", "dense_sparse_s/ex", "speedup_dense",
              "speedup_dense_sparse");
  for (const auto& r : rows) {
    std::printf("%-7s %14.4g %14.4g %20.4g %14.3g %20.3g\n", r.algo, r.lazy,
                r.dense, r.dense_sparse, r.dense / r.lazy,
                r.dense_sparse / r.lazy);
    if (machine)
      std::printf(
          "bench_row algo=%s lazy_seconds=%.6g dense_seconds=%.6g "
          "dense_sparse_seconds=%.6g speedup_dense=%.3g "
          "speedup_dense_sparse=%.3g\n",
          r.algo, r.lazy, r.dense, r.dense_sparse, r.dense / r.lazy,
          r.dense_sparse / r.lazy);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "lazyreg: sparse linear-model trainer with constant-time delayed "
      "regularization"};
  app.require_subcommand(1);

  CommonFlags tf;
  std::string out_path = "model.txt";
  CLI::App* cmd_train = app.add_subcommand("train", "train and write a model");
  add_trainer_flags(cmd_train, tf, true);
  cmd_train->add_option("--out", out_path, "model output path");

  CommonFlags vf;
  double tolerance = 1e-8;
  CLI::App* cmd_verify = app.add_subcommand(
      "verify", "check lazy and dense trainers produce the same weights");
  add_trainer_flags(cmd_verify, vf, true);
  cmd_verify->add_option("--tolerance", tolerance, "max allowed L-inf diff")
      ->check(CLI::NonNegativeNumber);

  std::string model_path, pred_data_path;
  int pred_index_base = 1;
  CLI::App* cmd_predict =
      app.add_subcommand("predict", "print one probability per example");
  cmd_predict->add_option("--model", model_path, "model file")->required();
  cmd_predict->add_option("--data", pred_data_path, "libsvm data")->required();
  cmd_predict->add_option("--index-base", pred_index_base, "first feature index")
      ->check(CLI::IsMember({0, 1}));

  CommonFlags bf;
  std::int64_t bench_n = 2000, bench_d = 100000, bench_p = 30;
  double weight_sparsity = 0.05;
  bool machine = false;
  CLI::App* cmd_bench = app.add_subcommand(
      "bench", "time lazy vs dense trainers on synthetic data");
  add_trainer_flags(cmd_bench, bf, false);
  cmd_bench->add_option("--n", bench_n, "examples")->check(CLI::PositiveNumber);
  cmd_bench->add_option("--d", bench_d, "dimensionality")
      ->check(CLI::PositiveNumber);
  cmd_bench->add_option("--p", bench_p, "nonzero features per example")
      ->check(CLI::PositiveNumber);
  cmd_bench->add_option("--weight-sparsity", weight_sparsity,
                        "fraction of nonzero true weights");
  cmd_bench->add_flag("--machine", machine, "also print key=value rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_train->parsed()) return run_train(tf, out_path);
    if (cmd_verify->parsed()) return run_verify(vf, tolerance);
    if (cmd_predict->parsed())
      return run_predict(model_path, pred_data_path, pred_index_base);
    if (cmd_bench->parsed())
      return run_bench(bf, bench_n, bench_d, bench_p, weight_sparsity, machine);
  } catch (const InvalidRate& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 3;
  } catch (const DimensionMismatch& e) {
    std::cerr << "dimension mismatch: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
