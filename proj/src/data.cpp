#include "lazyreg/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "lazyreg/errors.hpp"
#include "lazyreg/kernels.hpp"
#include "lazyreg/rng.hpp"

namespace lazyreg {

namespace {

// from_chars does not accept a leading '+', but labels like "+1" are common
// in libsvm files.
std::string_view strip_plus(std::string_view s) {
  return s.size() > 1 && s.front() == '+' ? s.substr(1) : s;
}

bool parse_double(std::string_view s, double& out) {
  s = strip_plus(s);
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_int(std::string_view s, std::int64_t& out) {
  s = strip_plus(s);
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Next whitespace-separated token of `line` starting at `pos`; empty when
// exhausted.
std::string_view next_token(std::string_view line, std::size_t& pos) {
  while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  const std::size_t start = pos;
  while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
  return line.substr(start, pos - start);
}

// p distinct draws from [0, d), ascending.
std::vector<std::int64_t> sample_distinct(std::mt19937_64& rng, std::int64_t p,
                                          std::int64_t d) {
  std::set<std::int64_t> picked;
  for (std::int64_t r = d - p; r < d; ++r) {
    const auto v = static_cast<std::int64_t>(
        bounded_uint(rng, static_cast<std::uint64_t>(r) + 1));
    if (!picked.insert(v).second) picked.insert(r);
  }
  return {picked.begin(), picked.end()};
}

}  // namespace

double Dataset::p_mean() const {
  if (examples.empty()) return 0.0;
  std::size_t nnz = 0;
  for (const auto& ex : examples) nnz += ex.indices.size();
  return static_cast<double>(nnz) / static_cast<double>(examples.size());
}

Dataset parse_libsvm(std::istream& in, int index_base,
                     std::int64_t dims_override) {
  if (index_base != 0 && index_base != 1)
    throw ContractViolation("parse_libsvm: index_base must be 0 or 1");

  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  std::int64_t max_idx = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t pos = 0;
    const std::string_view label_tok = next_token(line, pos);
    if (label_tok.empty()) continue;  // blank line

    double label_val = 0.0;
    if (!parse_double(label_tok, label_val) ||
        (label_val != -1.0 && label_val != 0.0 && label_val != 1.0))
      throw ParseError(line_no, "label must be one of -1, 0, 1, got '" +
                                    std::string(label_tok) + "'");
    SparseExample ex;
    ex.label = label_val > 0.0 ? 1 : -1;

    std::int64_t prev_idx = -1;
    for (std::string_view tok = next_token(line, pos); !tok.empty();
         tok = next_token(line, pos)) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError(line_no,
                         "expected idx:val, got '" + std::string(tok) + "'");
      std::int64_t idx = 0;
      double val = 0.0;
      if (!parse_int(tok.substr(0, colon), idx))
        throw ParseError(line_no,
                         "bad feature index in '" + std::string(tok) + "'");
      if (!parse_double(tok.substr(colon + 1), val))
        throw ParseError(line_no,
                         "bad feature value in '" + std::string(tok) + "'");
      idx -= index_base;
      if (idx < 0)
        throw ParseError(line_no, "feature index below index base");
      if (idx <= prev_idx)
        throw ParseError(line_no, "feature indices must be strictly increasing");
      prev_idx = idx;
      if (!std::isfinite(val))
        throw ParseError(line_no, "feature value is not finite");
      if (val == 0.0) continue;  // absent
      ex.indices.push_back(idx);
      ex.values.push_back(val);
      max_idx = std::max(max_idx, idx);
    }
    ds.examples.push_back(std::move(ex));
  }

  if (dims_override > 0) {
    if (max_idx >= dims_override)
      throw DimensionMismatch("data uses feature index " +
                              std::to_string(max_idx) + " but dims is " +
                              std::to_string(dims_override));
    ds.dim = dims_override;
  } else {
    ds.dim = max_idx + 1;
  }
  return ds;
}

void write_libsvm(const Dataset& data, std::ostream& out, int index_base) {
  for (const auto& ex : data.examples) {
    out << ex.label;
    for (std::size_t i = 0; i < ex.indices.size(); ++i)
      out << ' ' << (ex.indices[i] + index_base) << ':' << fmt17(ex.values[i]);
    out << '\n';
  }
}

SyntheticData generate_synthetic(std::int64_t n, std::int64_t d, std::int64_t p,
                                 double weight_sparsity, std::uint64_t seed) {
  if (p < 1 || p > d)
    throw ContractViolation("generate_synthetic: need 1 <= p <= d");
  if (!(weight_sparsity >= 0.0 && weight_sparsity <= 1.0))
    throw ContractViolation("generate_synthetic: weight_sparsity outside [0,1]");

  std::mt19937_64 rng(seed);
  SyntheticData out;
  out.true_weights.assign(static_cast<std::size_t>(d), 0.0);
  const auto support_size = static_cast<std::int64_t>(
      std::ceil(weight_sparsity * static_cast<double>(d)));
  if (support_size > 0)
    for (const auto idx : sample_distinct(rng, support_size, d))
      out.true_weights[static_cast<std::size_t>(idx)] = standard_normal(rng);

  out.data.dim = d;
  out.data.examples.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    SparseExample ex;
    ex.indices = sample_distinct(rng, p, d);
    ex.values.reserve(ex.indices.size());
    double margin = 0.0;
    for (const auto idx : ex.indices) {
      const double v = uniform_range(rng, 0.5, 1.5);
      ex.values.push_back(v);
      margin += out.true_weights[static_cast<std::size_t>(idx)] * v;
    }
    ex.label = uniform_unit(rng) < sigmoid(margin) ? 1 : -1;
    out.data.examples.push_back(std::move(ex));
  }
  return out;
}

void write_model(std::span<const double> weights, std::ostream& out) {
  out << "d " << weights.size() << '\n';
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (weights[j] != 0.0) out << j << ' ' << fmt17(weights[j]) << '\n';
}

std::vector<double> read_model(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty model file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::size_t pos = 0;
  const std::string_view head = next_token(line, pos);
  const std::string_view dim_tok = next_token(line, pos);
  std::int64_t dim = -1;
  if (head != "d" || !parse_int(dim_tok, dim) || dim < 0)
    throw ParseError(line_no, "model header must be 'd <dim>'");

  std::vector<double> w(static_cast<std::size_t>(dim), 0.0);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = 0;
    const std::string_view idx_tok = next_token(line, pos);
    if (idx_tok.empty()) continue;
    const std::string_view val_tok = next_token(line, pos);
    std::int64_t idx = 0;
    double val = 0.0;
    if (!parse_int(idx_tok, idx) || !parse_double(val_tok, val))
      throw ParseError(line_no, "expected 'idx weight'");
    if (idx < 0 || idx >= dim)
      throw DimensionMismatch("model index " + std::to_string(idx) +
                              " outside dimension " + std::to_string(dim));
    if (!std::isfinite(val))
      throw ParseError(line_no, "weight is not finite");
    w[static_cast<std::size_t>(idx)] = val;
  }
  return w;
}

}  // namespace lazyreg
