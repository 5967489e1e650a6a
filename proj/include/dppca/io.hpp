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
// Serialization of experiment tables and mechanism outputs. Files are
// written atomically (temp file, then rename) and every schema carries a
// version column or field. Keep this header out of the hot path: it pulls
// in the JSON library.

#ifndef DPPCA_IO_HPP_
#define DPPCA_IO_HPP_

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dppca/errors.hpp"
#include "dppca/experiment.hpp"
#include "dppca/mechanisms.hpp"
#include "dppca/stats.hpp"
#include "dppca/version.hpp"

namespace dppca {

inline std::string utc_now_iso8601() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes content to path via a sibling temp file and an atomic rename, so
// readers never observe a partial file.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("atomic_write_file: cannot open " + tmp.string());
    out << content;
    if (!out.flush()) throw data_error("atomic_write_file: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += "\"\"";
    else q += c;
  }
  q += "\"";
  return q;
}

}  // namespace detail

// Long-form results: one row per trial.
// Columns: schema_version,experiment,mechanism,n,epsilon,trial,seed,q_f,q_a,wall_ms,error
inline void write_result_csv(const std::filesystem::path& path, const ResultTable& table) {
  std::ostringstream out;
  out << "schema_version,experiment,mechanism,n,epsilon,trial,seed,q_f,q_a,wall_ms,error\n";
  for (const ResultRow& r : table.rows) {
    out << kResultSchemaVersion << ',' << detail::csv_field(r.experiment) << ','
        << detail::csv_field(r.mechanism) << ',' << r.n << ',' << detail::fmt_double(r.epsilon)
        << ',' << r.trial << ',' << r.seed << ',' << detail::fmt_double(r.q_f) << ','
        << detail::fmt_double(r.q_a) << ',' << detail::fmt_double(r.wall_ms) << ','
        << detail::csv_field(r.error) << '\n';
  }
  atomic_write_file(path, out.str());
}

// Aggregates pooled per (mechanism, n, epsilon) across every other
// coordinate (subsample repeats and restarts jointly).
// Columns: schema_version,experiment,mechanism,n,epsilon,trials,errors,
//          q_f_mean,q_f_std,q_a_mean,q_a_std
inline void write_aggregate_csv(const std::filesystem::path& path, const ResultTable& table) {
  struct Agg {
    std::string experiment;
    std::string mechanism;
    std::int64_t n = 0;
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> qf;
    std::vector<double> qa;
    int errors = 0;
    int trials = 0;
  };
  std::vector<Agg> groups;
  auto find_group = [&groups](const ResultRow& r) -> Agg& {
    for (Agg& g : groups) {
      const bool eps_match = (std::isnan(g.epsilon) && std::isnan(r.epsilon)) ||
                             g.epsilon == r.epsilon;
      if (g.mechanism == r.mechanism && g.n == r.n && eps_match) return g;
    }
    groups.push_back({r.experiment, r.mechanism, r.n, r.epsilon, {}, {}, 0, 0});
    return groups.back();
  };
  for (const ResultRow& r : table.rows) {
    Agg& g = find_group(r);
    ++g.trials;
    if (!r.error.empty()) {
      ++g.errors;
      continue;
    }
    if (!std::isnan(r.q_f)) g.qf.push_back(r.q_f);
    if (!std::isnan(r.q_a)) g.qa.push_back(r.q_a);
  }

  auto mean_of = [](const std::vector<double>& v) {
    return v.empty() ? std::numeric_limits<double>::quiet_NaN() : mean(v);
  };
  auto std_of = [](const std::vector<double>& v) {
    return v.size() < 2 ? std::numeric_limits<double>::quiet_NaN() : sample_stddev(v);
  };

  std::ostringstream out;
  out << "schema_version,experiment,mechanism,n,epsilon,trials,errors,"
         "q_f_mean,q_f_std,q_a_mean,q_a_std\n";
  for (const Agg& g : groups) {
    out << kResultSchemaVersion << ',' << detail::csv_field(g.experiment) << ','
        << detail::csv_field(g.mechanism) << ',' << g.n << ',' << detail::fmt_double(g.epsilon)
        << ',' << g.trials << ',' << g.errors << ',' << detail::fmt_double(mean_of(g.qf)) << ','
        << detail::fmt_double(std_of(g.qf)) << ',' << detail::fmt_double(mean_of(g.qa)) << ','
        << detail::fmt_double(std_of(g.qa)) << '\n';
  }
  atomic_write_file(path, out.str());
}

// Columns: schema_version,trace,sweep,f,log_f
inline void write_burnin_csv(const std::filesystem::path& path, const BurninTable& table) {
  std::ostringstream out;
  out << "schema_version,trace,sweep,f,log_f\n";
  for (const BurninRow& r : table.rows) {
    out << kResultSchemaVersion << ',' << r.trace << ',' << r.sweep << ','
        << detail::fmt_double(r.f) << ',' << detail::fmt_double(r.log_f) << '\n';
  }
  atomic_write_file(path, out.str());
}

// Columns: schema_version,d,epsilon,delta,n,bound,argmin_phi,degenerate
inline void write_bounds_csv(const std::filesystem::path& path, const BoundsTable& table) {
  std::ostringstream out;
  out << "schema_version,d,epsilon,delta,n,bound,argmin_phi,degenerate\n";
  for (const BoundsRow& r : table.rows) {
    out << kResultSchemaVersion << ',' << r.d << ',' << detail::fmt_double(r.epsilon) << ','
        << detail::fmt_double(r.delta) << ',' << r.n << ',' << detail::fmt_double(r.bound) << ','
        << detail::fmt_double(r.argmin_phi) << ',' << (r.degenerate ? 1 : 0) << '\n';
  }
  atomic_write_file(path, out.str());
}

inline nlohmann::json frame_to_json(const OrthonormalFrame& frame) {
  nlohmann::json j;
  j["d"] = frame.d();
  j["k"] = frame.k();
  std::vector<double> row_major;
  row_major.reserve(static_cast<std::size_t>(frame.d() * frame.k()));
  for (Eigen::Index i = 0; i < frame.d(); ++i) {
    for (Eigen::Index c = 0; c < frame.k(); ++c) row_major.push_back(frame.columns()(i, c));
  }
  j["entries_row_major"] = row_major;
  return j;
}

inline nlohmann::json mechanism_output_to_json(const MechanismOutput& output) {
  nlohmann::json j;
  j["schema_version"] = kResultSchemaVersion;
  j["mechanism"] = output.mechanism;
  if (output.params.has_value()) {
    j["epsilon"] = output.params->epsilon;
    if (output.params->delta.has_value()) j["delta"] = *output.params->delta;
  }
  j["seed"] = output.seed;
  j["telemetry"] = output.telemetry;
  j["frame"] = frame_to_json(output.frame);
  return j;
}

// Run provenance: config echo, library version, timestamps, row counts, and
// the aggregation convention.
inline void write_metadata_json(const std::filesystem::path& path, const std::string& experiment,
                                const nlohmann::json& config_echo, std::size_t row_count,
                                std::size_t error_count, const std::string& started,
                                const std::string& finished) {
  nlohmann::json j;
  j["schema_version"] = kResultSchemaVersion;
  j["experiment"] = experiment;
  j["library_version"] = kVersionString;
  j["started_utc"] = started;
  j["finished_utc"] = finished;
  j["config"] = config_echo;
  j["rows"] = row_count;
  j["rows_with_errors"] = error_count;
  j["aggregation"] =
      "aggregate rows pool all trials per (mechanism, n, epsilon): subsample repeats and "
      "mechanism restarts jointly";
  atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace dppca

#endif  // DPPCA_IO_HPP_
