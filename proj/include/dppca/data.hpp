// Copyright 2026 The dppca Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Dataset ingestion and preprocessing: categorical one-hot expansion, the
// row-then-column normalization recipe, uniform subsampling, and synthetic
// Gaussian data with a prescribed covariance spectrum.

#ifndef DPPCA_DATA_HPP_
#define DPPCA_DATA_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dppca/bingham.hpp"
#include "dppca/errors.hpp"
#include "dppca/linalg.hpp"
#include "dppca/rng.hpp"

namespace dppca {

// One input feature: either continuous or categorical with a declared
// number of levels. Categorical levels are tracked by label in
// first-appearance order.
struct Feature {
  std::string name;
  bool categorical = false;
  int arity = 0;                    // declared level count when categorical
  std::vector<std::string> labels;  // observed labels, index = encoded value
};

// Pre-expansion table: one row per feature, one column per record.
// Continuous cells hold the value; categorical cells hold the level index.
struct RawTable {
  std::vector<Feature> features;
  Eigen::MatrixXd values;  // features x records

  std::int64_t rows() const { return values.cols(); }
};

// Everything the preprocessing pipeline decided, for provenance.
struct PreprocessReport {
  Eigen::Index input_features = 0;
  std::int64_t input_rows = 0;
  Eigen::Index output_d = 0;
  std::vector<std::pair<std::string, int>> expansion;  // feature -> block width
  std::vector<double> row_scales;                      // per output row, normalize()
  double column_scale = 1.0;                           // single global factor
  double clip_fraction = 0.0;                          // synthetic_gaussian only
  // The row step divides by the maximum absolute entry; recorded because
  // "maximum value" is ambiguous for signed data.
  std::string row_convention = "max-absolute-entry";
};

// Declared schema for CSV ingestion: feature name -> arity, or kContinuous.
inline constexpr int kContinuous = -1;

struct CsvSchema {
  std::vector<std::pair<std::string, int>> columns;
};

// Expands categorical features to indicator blocks. Output dimension is the
// number of continuous features plus the sum of declared arities; block
// layout follows feature order.
inline std::pair<Eigen::MatrixXd, PreprocessReport> one_hot_expand(const RawTable& table) {
  if (table.features.empty() || table.rows() < 1) {
    throw data_error("one_hot_expand: empty table");
  }
  if (static_cast<Eigen::Index>(table.features.size()) != table.values.rows()) {
    throw data_error("one_hot_expand: feature list does not match value rows");
  }
  PreprocessReport report;
  report.input_features = table.values.rows();
  report.input_rows = table.rows();
  Eigen::Index d = 0;
  for (const Feature& f : table.features) {
    const int width = f.categorical ? f.arity : 1;
    if (f.categorical && f.arity < 1) {
      throw data_error("one_hot_expand: feature " + f.name + " has no declared arity");
    }
    report.expansion.emplace_back(f.name, width);
    d += width;
  }
  report.output_d = d;

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, table.rows());
  Eigen::Index row0 = 0;
  for (std::size_t f = 0; f < table.features.size(); ++f) {
    const Feature& feat = table.features[f];
    if (!feat.categorical) {
      out.row(row0) = table.values.row(static_cast<Eigen::Index>(f));
      row0 += 1;
      continue;
    }
    for (std::int64_t r = 0; r < table.rows(); ++r) {
      const double raw = table.values(static_cast<Eigen::Index>(f), r);
      const int level = static_cast<int>(raw);
      if (raw != std::floor(raw) || level < 0 || level >= feat.arity) {
        throw data_error("one_hot_expand: unseen category in feature " + feat.name +
                         " at record " + std::to_string(r));
      }
      out(row0 + level, r) = 1.0;
    }
    row0 += feat.arity;
  }
  return {std::move(out), std::move(report)};
}

// Two-step normalization: every row is divided by its maximum absolute
// entry (all-zero rows pass through), then all columns are divided by one
// global factor, the maximum column norm, so max_i ||x_i|| = 1.
inline std::pair<DatasetMatrix, PreprocessReport> normalize(Eigen::MatrixXd m) {
  if (m.rows() < 1 || m.cols() < 1) throw data_error("normalize: empty matrix");
  PreprocessReport report;
  report.input_features = m.rows();
  report.input_rows = m.cols();
  report.output_d = m.rows();
  report.row_scales.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double mx = m.row(i).cwiseAbs().maxCoeff();
    if (mx > 0.0) m.row(i) /= mx;
    report.row_scales.push_back(mx > 0.0 ? mx : 1.0);
  }
  double max_norm = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) max_norm = std::max(max_norm, m.col(j).norm());
  if (max_norm > 0.0) m /= max_norm;
  report.column_scale = max_norm > 0.0 ? max_norm : 1.0;
  return {DatasetMatrix(std::move(m), 1.0), std::move(report)};
}

// m distinct columns chosen uniformly without replacement (partial
// Fisher-Yates), in shuffled order; m = n yields a uniform permutation.
inline DatasetMatrix subsample(const DatasetMatrix& data, std::int64_t m, std::uint64_t seed) {
  const std::int64_t n = data.n();
  if (m < 1 || m > n) throw parameter_error("subsample: need 1 <= m <= n");
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (std::int64_t i = 0; i < m; ++i) {
    const std::int64_t j =
        i + static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  Eigen::MatrixXd out(data.d(), m);
  for (std::int64_t i = 0; i < m; ++i) out.col(i) = data.entries().col(idx[static_cast<std::size_t>(i)]);
  return DatasetMatrix(std::move(out), data.norm_bound());
}

enum class SyntheticBasis { kIdentity, kRandomOrthogonal };

// i.i.d. zero-mean Gaussian records with covariance Q diag(spectrum) Q^T.
// The privacy model needs column norms <= 1, so by default columns beyond
// unit norm are rescaled onto the sphere and the clipped fraction is
// reported. With clipping disabled the dataset instead carries its observed
// maximum norm as its bound; such data is outside the sensitivity-1 model
// and callers must account for that.
inline std::pair<DatasetMatrix, PreprocessReport> synthetic_gaussian(
    std::int64_t n, const std::vector<double>& spectrum, std::uint64_t seed,
    SyntheticBasis basis = SyntheticBasis::kIdentity, bool clip_to_unit_norm = true) {
  if (n < 1) throw parameter_error("synthetic_gaussian: need n >= 1");
  if (spectrum.empty()) throw parameter_error("synthetic_gaussian: empty spectrum");
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    if (spectrum[i] < 0.0) throw parameter_error("synthetic_gaussian: negative eigenvalue");
    if (i > 0 && spectrum[i] > spectrum[i - 1]) {
      throw parameter_error("synthetic_gaussian: spectrum must be nonincreasing");
    }
  }
  const int d = static_cast<int>(spectrum.size());
  Eigen::VectorXd sd(d);
  for (int i = 0; i < d; ++i) sd[i] = std::sqrt(spectrum[i]);

  Eigen::MatrixXd q;
  if (basis == SyntheticBasis::kRandomOrthogonal) {
    q = uniform_frame(d, d, derive_seed(seed, {hash_label("synthetic-basis")})).columns();
  }
  Rng rng(derive_seed(seed, {hash_label("synthetic-draws")}));

  PreprocessReport report;
  report.input_features = d;
  report.input_rows = n;
  report.output_d = d;
  Eigen::MatrixXd cols(d, n);
  Eigen::VectorXd g(d);
  std::int64_t clipped = 0;
  double max_norm = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    for (int i = 0; i < d; ++i) g[i] = sd[i] * rng.gaussian();
    Eigen::VectorXd x = (basis == SyntheticBasis::kRandomOrthogonal) ? (q * g).eval() : g;
    const double norm = x.norm();
    if (clip_to_unit_norm && norm > 1.0) {
      x /= norm;
      ++clipped;
    }
    max_norm = std::max(max_norm, x.norm());
    cols.col(j) = x;
  }
  report.clip_fraction = static_cast<double>(clipped) / static_cast<double>(n);
  const double bound = clip_to_unit_norm ? 1.0 : std::max(max_norm, 1.0);
  return {DatasetMatrix(std::move(cols), bound), std::move(report)};
}

// CSV ingestion against a declared schema. Dialect: comma separator, one
// header row naming the columns, '.' decimal point, no quoting. Categorical
// cells may be arbitrary tokens; they are encoded by first appearance, and
// more distinct tokens than the declared arity is an error.
inline RawTable parse_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw data_error("parse_csv: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() != schema.columns.size()) {
    throw data_error("parse_csv: header has " + std::to_string(header.size()) +
                     " columns, schema declares " + std::to_string(schema.columns.size()));
  }

  RawTable table;
  std::vector<std::map<std::string, int>> level_of(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != schema.columns[c].first) {
      throw data_error("parse_csv: header column '" + header[c] + "' does not match schema '" +
                       schema.columns[c].first + "'");
    }
    Feature f;
    f.name = header[c];
    f.categorical = schema.columns[c].second != kContinuous;
    f.arity = f.categorical ? schema.columns[c].second : 0;
    table.features.push_back(std::move(f));
  }

  std::vector<std::vector<double>> rows;
  std::int64_t record = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= header.size()) break;
      Feature& f = table.features[c];
      if (f.categorical) {
        auto [it, inserted] = level_of[c].emplace(cell, static_cast<int>(f.labels.size()));
        if (inserted) {
          if (static_cast<int>(f.labels.size()) >= f.arity) {
            throw data_error("parse_csv: feature " + f.name + " exceeds declared arity " +
                             std::to_string(f.arity) + " at record " + std::to_string(record));
          }
          f.labels.push_back(cell);
        }
        vals.push_back(static_cast<double>(it->second));
      } else {
        try {
          vals.push_back(std::stod(cell));
        } catch (const std::exception&) {
          throw data_error("parse_csv: non-numeric value '" + cell + "' in continuous feature " +
                           f.name);
        }
      }
      ++c;
    }
    if (vals.size() != header.size()) {
      throw data_error("parse_csv: record " + std::to_string(record) + " has " +
                       std::to_string(vals.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    rows.push_back(std::move(vals));
    ++record;
  }
  if (rows.empty()) throw data_error("parse_csv: no records");
  table.values.resize(static_cast<Eigen::Index>(header.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      table.values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = rows[r][c];
    }
  }
  return table;
}

// The synthetic covariance spectrum used throughout the experiment presets.
inline const std::vector<double>& synthetic_spectrum() {
  static const std::vector<double> kSpectrum = {0.5,  0.30, 0.04,  0.03,  0.02,
                                                0.01, 0.004, 0.003, 0.001, 0.001};
  return kSpectrum;
}

}  // namespace dppca

#endif  // DPPCA_DATA_HPP_
