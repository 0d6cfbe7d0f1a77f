#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace lazyreg {

// One row of X: parallel index/value arrays, indices strictly increasing,
// values finite and nonzero, label in {-1, +1}.
struct SparseExample {
  std::vector<std::int64_t> indices;
  std::vector<double> values;
  int label = 1;
};

struct Dataset {
  std::vector<SparseExample> examples;
  std::int64_t dim = 0;

  std::int64_t n() const { return static_cast<std::int64_t>(examples.size()); }
  double p_mean() const;
};

// libsvm/svmlight text: "label idx:val idx:val ...", labels in {-1,0,1}
// (0 maps to -1). Indices are shifted to 0-based internally; d is inferred
// as max index + 1 unless dims_override > 0. Zero-valued features are
// treated as absent. Throws ParseError (with 1-based line number) or
// DimensionMismatch (data exceeds dims_override).
Dataset parse_libsvm(std::istream& in, int index_base = 1,
                     std::int64_t dims_override = -1);
void write_libsvm(const Dataset& data, std::ostream& out, int index_base = 1);

struct SyntheticData {
  Dataset data;
  std::vector<double> true_weights;
};

// Each example gets exactly p distinct feature ids with values uniform in
// [0.5, 1.5]; ceil(weight_sparsity * d) true weights are standard normal;
// labels are Bernoulli(sigmoid(w.x)) mapped to {-1, +1}. Deterministic for a
// fixed seed.
SyntheticData generate_synthetic(std::int64_t n, std::int64_t d, std::int64_t p,
                                 double weight_sparsity, std::uint64_t seed);

// Model text: first line "d <dim>", then "idx weight" per nonzero weight at
// 17 significant digits, so read(write(m)) is bit-exact.
void write_model(std::span<const double> weights, std::ostream& out);
std::vector<double> read_model(std::istream& in);

}  // namespace lazyreg
