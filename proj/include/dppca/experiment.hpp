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
// Experiment runners that produce plot-ready tables: utility as a function
// of the privacy level or of the sample size, Gibbs burn-in traces, and the
// utility-ceiling grid. Every trial's seed is derived from the master seed
// plus the row coordinates, so any row can be reproduced in isolation.
// Trial failures are recorded per row and never abort a sweep.

#ifndef DPPCA_EXPERIMENT_HPP_
#define DPPCA_EXPERIMENT_HPP_

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dppca/bingham.hpp"
#include "dppca/bounds.hpp"
#include "dppca/data.hpp"
#include "dppca/linalg.hpp"
#include "dppca/mechanisms.hpp"
#include "dppca/rng.hpp"

namespace dppca {

inline constexpr int kResultSchemaVersion = 1;

struct ResultRow {
  std::string experiment;
  std::string mechanism;
  std::int64_t n = 0;
  double epsilon = std::numeric_limits<double>::quiet_NaN();  // NaN: non-private row
  int trial = 0;
  std::uint64_t seed = 0;
  double q_f = std::numeric_limits<double>::quiet_NaN();
  double q_a = std::numeric_limits<double>::quiet_NaN();  // populated only for k = 1
  double wall_ms = 0.0;
  std::string error;  // empty on success
};

struct ResultTable {
  std::vector<ResultRow> rows;

  bool any_error() const {
    for (const ResultRow& r : rows) {
      if (!r.error.empty()) return true;
    }
    return false;
  }
};

namespace detail {

// Runs fn(0..count-1), fanning out to a small thread pool when workers > 1.
// Each index owns its output slot, so no synchronization beyond the shared
// counter is needed.
inline void run_indexed(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const std::size_t pool_size = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> pool;
  pool.reserve(pool_size);
  for (std::size_t w = 0; w < pool_size; ++w) {
    pool.emplace_back([&next, count, &fn] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

// Seed ledger: one chain of mixes over the row coordinates. Reproducing a
// row needs only these six values.
inline std::uint64_t row_seed(std::uint64_t master, const std::string& experiment,
                              const std::string& mechanism, std::size_t n_index,
                              std::size_t eps_index, std::size_t trial) {
  return derive_seed(master, {hash_label(experiment), hash_label(mechanism),
                              static_cast<std::uint64_t>(n_index),
                              static_cast<std::uint64_t>(eps_index),
                              static_cast<std::uint64_t>(trial)});
}

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

inline void score_frame(const OrthonormalFrame& frame, const SecondMomentMatrix& a, ResultRow* row) {
  row->q_f = utility_qf(frame, a);
  if (frame.k() == 1) row->q_a = utility_qa(frame, a);
}

}  // namespace detail

// Synthetic data source shared by the presets. Clipping is off here: the
// reference spectrum has trace 0.912 and about a third of draws land outside
// the unit ball, so any norm enforcement visibly depresses q_F below the
// reference curves these presets exist to reproduce. The dataset then
// carries its observed maximum column norm as its bound, and mechanisms are
// still calibrated at sensitivity 1; this mirrors the reference experiment
// and is called out in the run metadata.
struct SyntheticSpec {
  std::vector<double> spectrum = synthetic_spectrum();
  std::int64_t n = 5000;
  SyntheticBasis basis = SyntheticBasis::kIdentity;
  bool clip_to_unit_norm = false;
};

struct UtilityVsEpsilonConfig {
  SyntheticSpec data;
  int k = 2;
  std::vector<double> epsilon_grid = {0.1, 0.5, 1.0, 2.0};
  double delta = 0.05;
  int samples_per_point = 100;
  SamplerConfig sampler;
  std::uint64_t master_seed = 0;
  int workers = 1;
};

// Mean utility of each mechanism across a privacy-level grid on one
// synthetic dataset. Non-private and random-projection baselines do not
// depend on epsilon and are emitted with an empty epsilon field.
inline ResultTable run_utility_vs_epsilon(const UtilityVsEpsilonConfig& config) {
  if (config.samples_per_point < 1) throw parameter_error("run_utility_vs_epsilon: need samples >= 1");
  if (config.epsilon_grid.empty()) throw parameter_error("run_utility_vs_epsilon: empty epsilon grid");
  const std::string experiment = "utility-vs-epsilon";
  auto [data, report] =
      synthetic_gaussian(config.data.n, config.data.spectrum,
                         detail::row_seed(config.master_seed, experiment, "dataset", 0, 0, 0),
                         config.data.basis, config.data.clip_to_unit_norm);
  const SecondMomentMatrix a = second_moment(data);

  ResultTable table;
  {
    ResultRow row;
    row.experiment = experiment;
    row.mechanism = "exact";
    row.n = data.n();
    detail::Stopwatch timer;
    detail::score_frame(top_k_subspace(a, config.k), a, &row);
    row.wall_ms = timer.ms();
    table.rows.push_back(std::move(row));
  }

  struct Task {
    std::string mechanism;
    std::size_t eps_index = 0;  // 0 used for the epsilon-free baseline too
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    int trial = 0;
  };
  std::vector<Task> tasks;
  for (int t = 0; t < config.samples_per_point; ++t) {
    tasks.push_back({"randproj", 0, std::numeric_limits<double>::quiet_NaN(), t});
  }
  for (const std::string& mech : {std::string("modsulq"), std::string("ppca")}) {
    for (std::size_t e = 0; e < config.epsilon_grid.size(); ++e) {
      for (int t = 0; t < config.samples_per_point; ++t) {
        tasks.push_back({mech, e, config.epsilon_grid[e], t});
      }
    }
  }

  std::vector<ResultRow> rows(tasks.size());
  detail::run_indexed(tasks.size(), config.workers, [&](std::size_t i) {
    const Task& task = tasks[i];
    ResultRow& row = rows[i];
    row.experiment = experiment;
    row.mechanism = task.mechanism;
    row.n = data.n();
    row.epsilon = task.epsilon;
    row.trial = task.trial;
    row.seed = detail::row_seed(config.master_seed, experiment, task.mechanism, 0, task.eps_index,
                                static_cast<std::size_t>(task.trial));
    detail::Stopwatch timer;
    try {
      if (task.mechanism == "randproj") {
        detail::score_frame(
            run_random_projection(static_cast<int>(data.d()), config.k, row.seed).frame, a, &row);
      } else if (task.mechanism == "modsulq") {
        const PrivacyParams params(task.epsilon, config.delta);
        detail::score_frame(run_modsulq(data, config.k, params, row.seed).frame, a, &row);
      } else {
        const PrivacyParams params(task.epsilon);
        detail::score_frame(run_ppca(data, config.k, params, config.sampler, row.seed).frame, a,
                            &row);
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.wall_ms = timer.ms();
  });
  for (ResultRow& row : rows) table.rows.push_back(std::move(row));
  return table;
}

struct UtilityVsNConfig {
  std::vector<std::int64_t> n_grid;
  int k = 1;
  double epsilon = 0.1;
  double delta = 0.01;
  int ppca_restarts = 10;
  int other_restarts = 100;
  int subsample_repeats = 5;
  SamplerConfig sampler;
  std::uint64_t master_seed = 0;
  int workers = 1;
};

// Utility as a function of subsample size on a fixed base dataset. Trial
// indices fold the subsample repeat and the mechanism restart together as
// trial = repeat * restarts + restart, so the seed ledger stays
// six-coordinate.
inline ResultTable run_utility_vs_n(const DatasetMatrix& base, const UtilityVsNConfig& config) {
  if (config.n_grid.empty()) throw parameter_error("run_utility_vs_n: empty n grid");
  if (config.subsample_repeats < 1 || config.ppca_restarts < 1 || config.other_restarts < 1) {
    throw parameter_error("run_utility_vs_n: trial counts must be >= 1");
  }
  for (std::int64_t n : config.n_grid) {
    if (n < 1 || n > base.n()) {
      throw parameter_error("run_utility_vs_n: grid size " + std::to_string(n) +
                            " outside the base dataset");
    }
  }
  const std::string experiment = "utility-vs-n";

  struct Task {
    std::string mechanism;
    std::size_t n_index = 0;
    int trial = 0;  // repeat * restarts + restart
    std::int64_t n = 0;
  };
  std::vector<Task> tasks;
  auto restarts_for = [&config](const std::string& mech) {
    if (mech == "exact") return 1;
    return mech == "ppca" ? config.ppca_restarts : config.other_restarts;
  };
  const std::vector<std::string> mechs = {"exact", "ppca", "modsulq", "randproj"};
  for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    for (const std::string& mech : mechs) {
      const int restarts = restarts_for(mech);
      for (int rep = 0; rep < config.subsample_repeats; ++rep) {
        for (int r = 0; r < restarts; ++r) {
          tasks.push_back({mech, ni, rep * restarts + r, config.n_grid[ni]});
        }
      }
    }
  }

  std::vector<ResultRow> rows(tasks.size());
  detail::run_indexed(tasks.size(), config.workers, [&](std::size_t i) {
    const Task& task = tasks[i];
    ResultRow& row = rows[i];
    row.experiment = experiment;
    row.mechanism = task.mechanism;
    row.n = task.n;
    row.trial = task.trial;
    row.seed = detail::row_seed(config.master_seed, experiment, task.mechanism, task.n_index, 0,
                                static_cast<std::size_t>(task.trial));
    if (task.mechanism == "modsulq" || task.mechanism == "ppca") row.epsilon = config.epsilon;
    detail::Stopwatch timer;
    try {
      // The subsample is tied to the repeat index, shared across mechanisms
      // so every mechanism sees the same five subsets.
      const int restarts = restarts_for(task.mechanism);
      const int repeat = task.trial / restarts;
      const DatasetMatrix sub = subsample(
          base, task.n,
          detail::row_seed(config.master_seed, experiment, "subsample", task.n_index, 0,
                           static_cast<std::size_t>(repeat)));
      const SecondMomentMatrix a = second_moment(sub);
      if (task.mechanism == "exact") {
        detail::score_frame(top_k_subspace(a, config.k), a, &row);
      } else if (task.mechanism == "randproj") {
        detail::score_frame(
            run_random_projection(static_cast<int>(sub.d()), config.k, row.seed).frame, a, &row);
      } else if (task.mechanism == "modsulq") {
        const PrivacyParams params(config.epsilon, config.delta);
        detail::score_frame(run_modsulq(sub, config.k, params, row.seed).frame, a, &row);
      } else {
        const PrivacyParams params(config.epsilon);
        detail::score_frame(run_ppca(sub, config.k, params, config.sampler, row.seed).frame, a,
                            &row);
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.wall_ms = timer.ms();
  });
  ResultTable table;
  table.rows = std::move(rows);
  return table;
}

struct BurninConfig {
  int d = 50;
  int k = 5;
  std::int64_t n = 10000;
  double epsilon = 1.0;
  // Spectrum of the synthetic source; empty selects a harmonic profile
  // lambda_i proportional to 1/i with unit trace.
  std::vector<double> spectrum;
  int traces = 5;
  std::int64_t sweeps = 20000;
  std::vector<std::int64_t> checkpoints;  // empty selects a log-spaced set
  std::uint64_t master_seed = 0;
};

struct BurninRow {
  int trace = 0;
  std::int64_t sweep = 0;
  double f = 0.0;
  double log_f = 0.0;
};

struct BurninTable {
  std::vector<BurninRow> rows;
  int traces = 0;
};

// Running-mean diagnostic over several independently started chains on the
// Bingham parameter of a synthetic dataset. All chains start from
// independent uniform frames.
inline BurninTable run_burnin_study(const BurninConfig& config) {
  if (config.traces < 1) throw parameter_error("run_burnin_study: need traces >= 1");
  if (config.sweeps < 1) throw parameter_error("run_burnin_study: need sweeps >= 1");
  const std::string experiment = "burnin";
  std::vector<double> spectrum = config.spectrum;
  if (spectrum.empty()) {
    double h = 0.0;
    for (int i = 1; i <= config.d; ++i) h += 1.0 / static_cast<double>(i);
    for (int i = 1; i <= config.d; ++i) spectrum.push_back(1.0 / (static_cast<double>(i) * h));
  }
  auto [data, report] = synthetic_gaussian(
      config.n, spectrum, detail::row_seed(config.master_seed, experiment, "dataset", 0, 0, 0),
      SyntheticBasis::kIdentity, true);
  const SecondMomentMatrix a = second_moment(data);
  const Eigen::MatrixXd b =
      static_cast<double>(data.n()) * (config.epsilon / 2.0) * a.entries();
  const BinghamParam param(b, config.k);

  std::vector<std::int64_t> checkpoints = config.checkpoints;
  if (checkpoints.empty()) {
    for (std::int64_t t : {std::int64_t{1}, std::int64_t{2}, std::int64_t{5}}) {
      std::int64_t scale = 1;
      while (t * scale <= config.sweeps) {
        checkpoints.push_back(t * scale);
        scale *= 10;
      }
    }
    std::sort(checkpoints.begin(), checkpoints.end());
    if (checkpoints.empty() || checkpoints.back() != config.sweeps) {
      checkpoints.push_back(config.sweeps);
    }
  }
  for (std::int64_t t : checkpoints) {
    if (t < 1 || t > config.sweeps) {
      throw parameter_error("run_burnin_study: checkpoint outside sweep range");
    }
  }

  BurninTable table;
  table.traces = config.traces;
  for (int trace_id = 0; trace_id < config.traces; ++trace_id) {
    const std::uint64_t seed = detail::row_seed(config.master_seed, experiment, "chain", 0, 0,
                                                static_cast<std::size_t>(trace_id));
    ChainTrace trace = sample_matrix_bingham(param, config.sweeps, 1, seed);
    BurninDiagnostic diag = burnin_statistic(trace, checkpoints);
    for (const auto& [t, f] : diag.values) {
      table.rows.push_back({trace_id, t, f, std::log(f)});
    }
  }
  return table;
}

struct BoundsFigureConfig {
  std::vector<int> d_grid = {50, 100, 500, 1000};
  std::vector<double> epsilon_grid = {0.01, 0.05, 0.1, 0.5, 1.0, 2.0};
  double delta = 0.01;
  std::vector<std::int64_t> n_grid;  // empty selects a log grid 1e2..1e8
  int grid_points = 10000;
};

struct BoundsRow {
  int d = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t n = 0;
  double bound = 1.0;
  double argmin_phi = 1.0;
  bool degenerate = false;
};

struct BoundsTable {
  std::vector<BoundsRow> rows;
};

inline std::vector<std::int64_t> log_spaced_n(std::int64_t lo, std::int64_t hi, int points) {
  std::vector<std::int64_t> out;
  const double llo = std::log10(static_cast<double>(lo));
  const double lhi = std::log10(static_cast<double>(hi));
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    const auto n = static_cast<std::int64_t>(std::llround(std::pow(10.0, llo + f * (lhi - llo))));
    if (out.empty() || out.back() != n) out.push_back(n);
  }
  return out;
}

// Utility-ceiling surface over (d, epsilon, n).
inline BoundsTable run_bounds_figure(const BoundsFigureConfig& config) {
  if (config.d_grid.empty() || config.epsilon_grid.empty()) {
    throw parameter_error("run_bounds_figure: empty grid");
  }
  std::vector<std::int64_t> n_grid =
      config.n_grid.empty() ? log_spaced_n(100, 100000000, 25) : config.n_grid;
  BoundsTable table;
  for (int d : config.d_grid) {
    for (double eps : config.epsilon_grid) {
      for (std::int64_t n : n_grid) {
        const UtilityBoundResult r =
            modsulq_utility_bound(d, n, eps, config.delta, config.grid_points);
        table.rows.push_back({d, eps, config.delta, n, r.bound, r.argmin_phi, r.degenerate});
      }
    }
  }
  return table;
}

}  // namespace dppca

#endif  // DPPCA_EXPERIMENT_HPP_
