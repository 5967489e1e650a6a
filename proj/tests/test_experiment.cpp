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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dppca/data.hpp"
#include "dppca/experiment.hpp"
#include "dppca/io.hpp"
#include "dppca/linalg.hpp"
#include "dppca/mechanisms.hpp"

namespace {

using Catch::Approx;

bool same_value(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

// Everything but wall time, which legitimately differs between runs.
bool rows_match(const dppca::ResultRow& a, const dppca::ResultRow& b) {
  return a.experiment == b.experiment && a.mechanism == b.mechanism && a.n == b.n &&
         same_value(a.epsilon, b.epsilon) && a.trial == b.trial && a.seed == b.seed &&
         same_value(a.q_f, b.q_f) && same_value(a.q_a, b.q_a) && a.error == b.error;
}

bool tables_match(const dppca::ResultTable& a, const dppca::ResultTable& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (!rows_match(a.rows[i], b.rows[i])) return false;
  }
  return true;
}

dppca::UtilityVsEpsilonConfig small_eps_config() {
  dppca::UtilityVsEpsilonConfig config;
  config.data.n = 300;
  config.k = 2;
  config.epsilon_grid = {0.5, 1.0};
  config.delta = 0.05;
  config.samples_per_point = 2;
  config.sampler.iterations = 50;
  config.sampler.thin = 1;
  config.master_seed = 7;
  config.workers = 1;
  return config;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

TEST_CASE("the epsilon sweep is deterministic and fully enumerated") {
  const auto config = small_eps_config();
  const auto a = dppca::run_utility_vs_epsilon(config);
  const auto b = dppca::run_utility_vs_epsilon(config);
  // 1 exact + 2 randproj + 2 mechanisms x 2 epsilons x 2 samples.
  REQUIRE(a.rows.size() == 11);
  REQUIRE(tables_match(a, b));
  REQUIRE_FALSE(a.any_error());

  int exact = 0, randproj = 0, modsulq = 0, ppca = 0;
  for (const auto& row : a.rows) {
    if (row.mechanism == "exact") {
      ++exact;
      REQUIRE(std::isnan(row.epsilon));
    } else if (row.mechanism == "randproj") {
      ++randproj;
      REQUIRE(std::isnan(row.epsilon));
    } else if (row.mechanism == "modsulq") {
      ++modsulq;
      REQUIRE((row.epsilon == 0.5 || row.epsilon == 1.0));
    } else {
      REQUIRE(row.mechanism == "ppca");
      ++ppca;
    }
    REQUIRE(row.q_f > 0.0);
    REQUIRE(row.q_f <= 1.0 + 1e-9);
    // k = 2 leaves the top-direction score unset.
    REQUIRE(std::isnan(row.q_a));
  }
  REQUIRE(exact == 1);
  REQUIRE(randproj == 2);
  REQUIRE(modsulq == 4);
  REQUIRE(ppca == 4);
}

TEST_CASE("any row of the epsilon sweep can be reproduced from its seed") {
  const auto config = small_eps_config();
  const auto table = dppca::run_utility_vs_epsilon(config);

  const dppca::ResultRow* target = nullptr;
  for (const auto& row : table.rows) {
    if (row.mechanism == "ppca" && row.epsilon == 0.5 && row.trial == 1) target = &row;
  }
  REQUIRE(target != nullptr);

  const std::string experiment = "utility-vs-epsilon";
  const std::uint64_t expected_seed =
      dppca::detail::row_seed(config.master_seed, experiment, "ppca", 0, 0, 1);
  REQUIRE(target->seed == expected_seed);

  const auto data =
      dppca::synthetic_gaussian(
          config.data.n, config.data.spectrum,
          dppca::detail::row_seed(config.master_seed, experiment, "dataset", 0, 0, 0),
          config.data.basis, config.data.clip_to_unit_norm)
          .first;
  const auto a = dppca::second_moment(data);
  const auto out = dppca::run_ppca(data, config.k, dppca::PrivacyParams(0.5), config.sampler,
                                   expected_seed);
  REQUIRE(dppca::utility_qf(out.frame, a) == target->q_f);
}

TEST_CASE("worker count does not change the results") {
  auto config = small_eps_config();
  const auto serial = dppca::run_utility_vs_epsilon(config);
  config.workers = 3;
  const auto pooled = dppca::run_utility_vs_epsilon(config);
  REQUIRE(tables_match(serial, pooled));
}

TEST_CASE("per-task failures become error rows without aborting the sweep") {
  const auto base =
      dppca::synthetic_gaussian(100, {0.5, 0.3}, 21, dppca::SyntheticBasis::kIdentity, false)
          .first;
  dppca::UtilityVsNConfig config;
  config.n_grid = {50};
  config.k = 1;
  config.epsilon = -1.0;  // rejected by the privacy validator inside each task
  config.delta = 0.01;
  config.ppca_restarts = 2;
  config.other_restarts = 2;
  config.subsample_repeats = 2;
  config.sampler.iterations = 10;
  config.master_seed = 3;
  const auto table = dppca::run_utility_vs_n(base, config);

  REQUIRE(table.rows.size() == 14);  // exact 2, ppca 4, modsulq 4, randproj 4
  REQUIRE(table.any_error());
  for (const auto& row : table.rows) {
    if (row.mechanism == "ppca" || row.mechanism == "modsulq") {
      REQUIRE_FALSE(row.error.empty());
      REQUIRE(std::isnan(row.q_f));
    } else {
      REQUIRE(row.error.empty());
      REQUIRE(row.q_f > 0.0);
      REQUIRE_FALSE(std::isnan(row.q_a));  // k = 1 populates the direction score
    }
  }

  const auto out = temp_file("dppca_error_rows.csv");
  const auto agg = temp_file("dppca_error_agg.csv");
  dppca::write_result_csv(out, table);
  dppca::write_aggregate_csv(agg, table);
  const auto agg_lines = read_lines(agg);
  bool saw_all_error_group = false;
  for (std::size_t i = 1; i < agg_lines.size(); ++i) {
    const auto fields = split_csv(agg_lines[i]);
    if (fields[2] == "ppca") {
      REQUIRE(fields[5] == "4");
      REQUIRE(fields[6] == "4");
      // NaN serializes as an empty field.
      REQUIRE(fields[7].empty());
      saw_all_error_group = true;
    }
  }
  REQUIRE(saw_all_error_group);
  std::filesystem::remove(out);
  std::filesystem::remove(agg);
}

TEST_CASE("the n sweep is deterministic and shares subsamples across mechanisms") {
  const auto base =
      dppca::synthetic_gaussian(100, {0.5, 0.3}, 77, dppca::SyntheticBasis::kIdentity, false)
          .first;
  dppca::UtilityVsNConfig config;
  config.n_grid = {40, 80};
  config.k = 1;
  config.epsilon = 1.0;
  config.delta = 0.01;
  config.ppca_restarts = 1;
  config.other_restarts = 2;
  config.subsample_repeats = 2;
  config.sampler.iterations = 20;
  config.master_seed = 11;
  const auto a = dppca::run_utility_vs_n(base, config);
  const auto b = dppca::run_utility_vs_n(base, config);
  REQUIRE(tables_match(a, b));
  REQUIRE(a.rows.size() == 24);
  REQUIRE_FALSE(a.any_error());

  // The exact row for (n index 1, repeat 1) must equal a by-hand replay of
  // the published subsample seed.
  const dppca::ResultRow* target = nullptr;
  for (const auto& row : a.rows) {
    if (row.mechanism == "exact" && row.n == 80 && row.trial == 1) target = &row;
  }
  REQUIRE(target != nullptr);
  const auto sub = dppca::subsample(
      base, 80, dppca::detail::row_seed(config.master_seed, "utility-vs-n", "subsample", 1, 0, 1));
  const auto moment = dppca::second_moment(sub);
  REQUIRE(dppca::utility_qf(dppca::top_k_subspace(moment, 1), moment) == target->q_f);
}

TEST_CASE("experiment configs are validated") {
  dppca::UtilityVsEpsilonConfig eps_config;
  eps_config.epsilon_grid = {};
  REQUIRE_THROWS_AS(dppca::run_utility_vs_epsilon(eps_config), dppca::parameter_error);
  eps_config = dppca::UtilityVsEpsilonConfig{};
  eps_config.samples_per_point = 0;
  REQUIRE_THROWS_AS(dppca::run_utility_vs_epsilon(eps_config), dppca::parameter_error);

  const auto base =
      dppca::synthetic_gaussian(30, {0.5, 0.3}, 5, dppca::SyntheticBasis::kIdentity, false).first;
  dppca::UtilityVsNConfig n_config;
  n_config.n_grid = {};
  REQUIRE_THROWS_AS(dppca::run_utility_vs_n(base, n_config), dppca::parameter_error);
  n_config.n_grid = {31};
  REQUIRE_THROWS_AS(dppca::run_utility_vs_n(base, n_config), dppca::parameter_error);
  n_config.n_grid = {10};
  n_config.subsample_repeats = 0;
  REQUIRE_THROWS_AS(dppca::run_utility_vs_n(base, n_config), dppca::parameter_error);

  dppca::BurninConfig burnin;
  burnin.traces = 0;
  REQUIRE_THROWS_AS(dppca::run_burnin_study(burnin), dppca::parameter_error);
  burnin = dppca::BurninConfig{};
  burnin.d = 4;
  burnin.k = 1;
  burnin.n = 50;
  burnin.traces = 1;
  burnin.sweeps = 10;
  burnin.checkpoints = {0};
  REQUIRE_THROWS_AS(dppca::run_burnin_study(burnin), dppca::parameter_error);
  burnin.checkpoints = {11};
  REQUIRE_THROWS_AS(dppca::run_burnin_study(burnin), dppca::parameter_error);

  dppca::BoundsFigureConfig bounds;
  bounds.d_grid = {};
  REQUIRE_THROWS_AS(dppca::run_bounds_figure(bounds), dppca::parameter_error);
}

TEST_CASE("the burn-in study reports one row per trace and checkpoint") {
  dppca::BurninConfig config;
  config.d = 8;
  config.k = 2;
  config.n = 200;
  config.epsilon = 1.0;
  config.traces = 2;
  config.sweeps = 50;
  config.checkpoints = {1, 10, 50};
  config.master_seed = 5;
  const auto table = dppca::run_burnin_study(config);
  REQUIRE(table.traces == 2);
  REQUIRE(table.rows.size() == 6);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    REQUIRE(row.trace == static_cast<int>(i / 3));
    REQUIRE(row.sweep == config.checkpoints[i % 3]);
    REQUIRE(row.f > 0.0);
    REQUIRE(row.log_f == std::log(row.f));
  }
  REQUIRE(table.rows[0].f == Approx(1.0).margin(1e-12));
  REQUIRE(table.rows[3].f == Approx(1.0).margin(1e-12));
}

TEST_CASE("the default checkpoint ladder is log spaced and ends at the last sweep") {
  dppca::BurninConfig config;
  config.d = 4;
  config.k = 1;
  config.n = 50;
  config.epsilon = 0.5;
  config.traces = 1;
  config.sweeps = 30;
  config.master_seed = 2;
  const auto table = dppca::run_burnin_study(config);
  std::vector<std::int64_t> sweeps;
  for (const auto& row : table.rows) sweeps.push_back(row.sweep);
  REQUIRE(sweeps == std::vector<std::int64_t>{1, 2, 5, 10, 20, 30});
}

TEST_CASE("log spaced grids keep endpoints and stay strictly increasing") {
  const auto grid = dppca::log_spaced_n(100, 100000000, 25);
  REQUIRE(grid.front() == 100);
  REQUIRE(grid.back() == 100000000);
  REQUIRE(grid.size() <= 25);
  for (std::size_t i = 1; i < grid.size(); ++i) REQUIRE(grid[i] > grid[i - 1]);
  REQUIRE(dppca::log_spaced_n(100, 100, 1) == std::vector<std::int64_t>{100});
}

TEST_CASE("the bounds figure sweeps its grids and stays inside the unit interval") {
  dppca::BoundsFigureConfig config;
  config.d_grid = {50};
  config.epsilon_grid = {0.1, 1.0};
  config.delta = 0.01;
  config.n_grid = {1000, 100000, 10000000};
  config.grid_points = 2000;
  const auto table = dppca::run_bounds_figure(config);
  REQUIRE(table.rows.size() == 6);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    REQUIRE(row.bound > 0.0);
    REQUIRE(row.bound <= 1.0);
    REQUIRE(row.d == 50);
    REQUIRE(row.delta == 0.01);
    if (i % 3 != 0) {
      REQUIRE(table.rows[i].bound >= table.rows[i - 1].bound - 1e-12);
    }
  }
}

TEST_CASE("result CSV uses the published schema") {
  dppca::ResultTable table;
  dppca::ResultRow row;
  row.experiment = "utility-vs-n";
  row.mechanism = "ppca";
  row.n = 42;
  row.epsilon = 0.25;
  row.trial = 3;
  row.seed = 99;
  row.q_f = 0.5;
  row.q_a = 0.75;
  row.wall_ms = 1.5;
  row.error = "bad,value \"x\"";
  table.rows.push_back(row);

  const auto path = temp_file("dppca_result_schema.csv");
  dppca::write_result_csv(path, table);
  const auto lines = read_lines(path);
  REQUIRE(lines.size() == 2);
  REQUIRE(lines[0] == "schema_version,experiment,mechanism,n,epsilon,trial,seed,q_f,q_a,wall_ms,error");
  REQUIRE(lines[1].find("1,utility-vs-n,ppca,42,0.25,3,99,0.5,0.75,1.5,") == 0);
  REQUIRE(lines[1].find("\"bad,value \"\"x\"\"\"") != std::string::npos);
  REQUIRE_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  std::filesystem::remove(path);
}

TEST_CASE("aggregate CSV pools per mechanism, size, and epsilon") {
  dppca::ResultTable table;
  auto push = [&table](const std::string& mech, double eps, double qf, const std::string& err) {
    dppca::ResultRow row;
    row.experiment = "utility-vs-n";
    row.mechanism = mech;
    row.n = 10;
    row.epsilon = eps;
    row.q_f = qf;
    row.error = err;
    table.rows.push_back(row);
  };
  push("m", 0.5, 0.2, "");
  push("m", 0.5, 0.5, "");
  push("m", 0.5, 0.8, "");
  push("m", 0.5, std::numeric_limits<double>::quiet_NaN(), "boom");
  dppca::ResultRow exact;
  exact.experiment = "utility-vs-n";
  exact.mechanism = "exact";
  exact.n = 10;
  exact.q_f = 0.7;
  exact.q_a = 0.9;
  table.rows.push_back(exact);

  const auto path = temp_file("dppca_aggregate_schema.csv");
  dppca::write_aggregate_csv(path, table);
  const auto lines = read_lines(path);
  REQUIRE(lines.size() == 3);
  REQUIRE(lines[0] ==
          "schema_version,experiment,mechanism,n,epsilon,trials,errors,"
          "q_f_mean,q_f_std,q_a_mean,q_a_std");

  const auto m_fields = split_csv(lines[1]);
  REQUIRE(m_fields[2] == "m");
  REQUIRE(m_fields[3] == "10");
  REQUIRE(m_fields[5] == "4");
  REQUIRE(m_fields[6] == "1");
  REQUIRE(std::stod(m_fields[7]) == Approx(0.5).margin(1e-12));
  REQUIRE(std::stod(m_fields[8]) == Approx(0.3).margin(1e-12));
  REQUIRE(m_fields[9].empty());  // no q_a values in the group

  const auto exact_fields = split_csv(lines[2]);
  REQUIRE(exact_fields[2] == "exact");
  REQUIRE(exact_fields[4].empty());  // epsilon-free baseline
  REQUIRE(exact_fields[5] == "1");
  REQUIRE(std::stod(exact_fields[7]) == Approx(0.7).margin(1e-12));
  REQUIRE(exact_fields[8].empty());  // single observation has no spread
  REQUIRE(std::stod(exact_fields[9]) == Approx(0.9).margin(1e-12));
  std::filesystem::remove(path);
}

TEST_CASE("burn-in and bounds CSVs use their published schemas") {
  dppca::BurninTable burnin;
  burnin.traces = 1;
  burnin.rows.push_back({0, 10, 0.5, std::log(0.5)});
  const auto burnin_path = temp_file("dppca_burnin_schema.csv");
  dppca::write_burnin_csv(burnin_path, burnin);
  auto lines = read_lines(burnin_path);
  REQUIRE(lines[0] == "schema_version,trace,sweep,f,log_f");
  REQUIRE(lines.size() == 2);
  REQUIRE(lines[1].find("1,0,10,0.5,") == 0);
  std::filesystem::remove(burnin_path);

  dppca::BoundsTable bounds;
  bounds.rows.push_back({50, 0.25, 0.5, 1000, 0.25, 0.75, false});
  const auto bounds_path = temp_file("dppca_bounds_schema.csv");
  dppca::write_bounds_csv(bounds_path, bounds);
  lines = read_lines(bounds_path);
  REQUIRE(lines[0] == "schema_version,d,epsilon,delta,n,bound,argmin_phi,degenerate");
  REQUIRE(lines[1] == "1,50,0.25,0.5,1000,0.25,0.75,0");
  std::filesystem::remove(bounds_path);
}

TEST_CASE("atomic writes land complete files and leave no temporary behind") {
  const auto path = temp_file("dppca_atomic_check.txt");
  dppca::atomic_write_file(path, "line1\nline2\n");
  REQUIRE(std::filesystem::exists(path));
  REQUIRE_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  REQUIRE(content.str() == "line1\nline2\n");
  std::filesystem::remove(path);
}

TEST_CASE("timestamps are UTC ISO-8601") {
  const auto ts = dppca::utc_now_iso8601();
  REQUIRE(ts.size() == 20);
  REQUIRE(ts[4] == '-');
  REQUIRE(ts[10] == 'T');
  REQUIRE(ts.back() == 'Z');
}

TEST_CASE("mechanism outputs serialize with their privacy parameters") {
  const auto rand = dppca::run_random_projection(4, 2, 9);
  const auto jr = dppca::mechanism_output_to_json(rand);
  REQUIRE(jr["mechanism"] == "randproj");
  REQUIRE(jr["seed"] == 9);
  REQUIRE_FALSE(jr.contains("epsilon"));
  REQUIRE(jr["frame"]["d"] == 4);
  REQUIRE(jr["frame"]["k"] == 2);
  REQUIRE(jr["frame"]["entries_row_major"].size() == 8);

  const auto data = dppca::synthetic_gaussian(50, {0.5, 0.3}, 4).first;
  const auto noisy =
      dppca::run_modsulq(data, 1, dppca::PrivacyParams(1.0, 0.05), 17);
  const auto jm = dppca::mechanism_output_to_json(noisy);
  REQUIRE(jm["mechanism"] == "modsulq");
  REQUIRE(jm["epsilon"] == 1.0);
  REQUIRE(jm["delta"] == 0.05);
  REQUIRE(jm["telemetry"].contains("beta"));
}

TEST_CASE("metadata JSON echoes the run configuration") {
  const auto path = temp_file("dppca_metadata_check.json");
  nlohmann::json config_echo;
  config_echo["k"] = 2;
  dppca::write_metadata_json(path, "utility-vs-epsilon", config_echo, 11, 1,
                             "2026-01-01T00:00:00Z", "2026-01-01T00:05:00Z");
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  REQUIRE(j["experiment"] == "utility-vs-epsilon");
  REQUIRE(j["schema_version"] == 1);
  REQUIRE(j["config"]["k"] == 2);
  REQUIRE(j["rows"] == 11);
  REQUIRE(j["rows_with_errors"] == 1);
  REQUIRE(j["started_utc"] == "2026-01-01T00:00:00Z");
  REQUIRE(j.contains("library_version"));
  REQUIRE(j.contains("aggregation"));
  std::filesystem::remove(path);
}
