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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <sstream>
#include <vector>

#include "dppca/bingham.hpp"
#include "dppca/stats.hpp"
#include "oracle_data.hpp"

namespace {

using Catch::Approx;

// Piecewise-linear CDF lookup on a frozen quadrature table.
double table_cdf(double t, const double* ts, const double* fs, std::size_t n) {
  if (t <= ts[0]) return fs[0];
  if (t >= ts[n - 1]) return fs[n - 1];
  const double* it = std::upper_bound(ts, ts + n, t);
  const std::size_t hi = static_cast<std::size_t>(it - ts);
  const std::size_t lo = hi - 1;
  const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
  return fs[lo] + w * (fs[hi] - fs[lo]);
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

Eigen::MatrixXd concentration_matrix(double kappa) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
  b(0, 0) = kappa;
  return b;
}

}  // namespace

TEST_CASE("vector Bingham draws are unit vectors") {
  const auto draws = dppca::sample_vector_bingham(concentration_matrix(2.0), 17, 1000);
  REQUIRE(draws.size() == 1000);
  for (const auto& v : draws) {
    REQUIRE(std::abs(v.norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("vector Bingham with zero concentration is uniform on the sphere") {
  const int d = 4;
  const auto draws = dppca::sample_vector_bingham(Eigen::MatrixXd::Zero(d, d), 23, 10000);
  double mean_sq = 0.0;
  for (const auto& v : draws) mean_sq += v[0] * v[0];
  mean_sq /= static_cast<double>(draws.size());
  REQUIRE(mean_sq == Approx(1.0 / d).margin(0.01));
}

TEST_CASE("isotropic concentration accepts every proposal") {
  dppca::SamplerTelemetry telemetry;
  const auto draws = dppca::sample_vector_bingham(3.0 * Eigen::MatrixXd::Identity(4, 4), 29, 5000,
                                                  &telemetry);
  REQUIRE(draws.size() == 5000);
  REQUIRE(telemetry.proposals == 5000);
  REQUIRE(telemetry.accepted == 5000);
  REQUIRE(telemetry.acceptance_rate() == Approx(1.0).margin(1e-15));
}

TEST_CASE("first-axis overlap matches quadrature at several concentrations") {
  const int count = 5000;
  const std::size_t n = std::size(dppca::testing::kBinghamCdfKappa2T);

  SECTION("kappa = 0 closed form") {
    const auto draws = dppca::sample_vector_bingham(Eigen::MatrixXd::Zero(3, 3), 101, count);
    std::vector<double> ts;
    ts.reserve(draws.size());
    for (const auto& v : draws) ts.push_back(v[0] * v[0]);
    const auto ks = dppca::ks_test(ts, [](double t) {
      return std::sqrt(std::clamp(t, 0.0, 1.0));
    });
    REQUIRE(ks.statistic < 0.05);
  }

  SECTION("kappa = 2 quadrature table") {
    const auto draws = dppca::sample_vector_bingham(concentration_matrix(2.0), 103, count);
    std::vector<double> ts;
    ts.reserve(draws.size());
    for (const auto& v : draws) ts.push_back(v[0] * v[0]);
    const auto ks = dppca::ks_test(ts, [n](double t) {
      return table_cdf(t, dppca::testing::kBinghamCdfKappa2T, dppca::testing::kBinghamCdfKappa2F, n);
    });
    REQUIRE(ks.statistic < 0.05);
  }

  SECTION("kappa = 10 quadrature table") {
    const auto draws = dppca::sample_vector_bingham(concentration_matrix(10.0), 107, count);
    std::vector<double> ts;
    ts.reserve(draws.size());
    for (const auto& v : draws) ts.push_back(v[0] * v[0]);
    const auto ks = dppca::ks_test(ts, [n](double t) {
      return table_cdf(t, dppca::testing::kBinghamCdfKappa10T, dppca::testing::kBinghamCdfKappa10F, n);
    });
    REQUIRE(ks.statistic < 0.05);
  }
}

TEST_CASE("vector Bingham is equivariant under rotation of the concentration") {
  const auto q_frame = dppca::uniform_frame(3, 3, 404);
  const Eigen::MatrixXd q = q_frame.columns();
  Eigen::MatrixXd b = q * concentration_matrix(2.0) * q.transpose();
  b = 0.5 * (b + b.transpose()).eval();
  const auto draws = dppca::sample_vector_bingham(b, 109, 5000);
  std::vector<double> ts;
  ts.reserve(draws.size());
  const Eigen::VectorXd axis = q.col(0);
  for (const auto& v : draws) {
    const double dot = axis.dot(v);
    ts.push_back(dot * dot);
  }
  const std::size_t n = std::size(dppca::testing::kBinghamCdfKappa2T);
  const auto ks = dppca::ks_test(ts, [n](double t) {
    return table_cdf(t, dppca::testing::kBinghamCdfKappa2T, dppca::testing::kBinghamCdfKappa2F, n);
  });
  REQUIRE(ks.statistic < 0.05);
}

TEST_CASE("vector Bingham validates its inputs") {
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.2, 1.0;
  REQUIRE_THROWS_AS(dppca::sample_vector_bingham(asym, 1, 10), dppca::parameter_error);
  REQUIRE_THROWS_AS(dppca::sample_vector_bingham(Eigen::MatrixXd::Zero(2, 3), 1, 10),
                    dppca::parameter_error);
  REQUIRE_THROWS_AS(dppca::sample_vector_bingham(Eigen::MatrixXd::Zero(2, 2), 1, -1),
                    dppca::parameter_error);
}

TEST_CASE("ACG envelope scale solves its normalization equation") {
  REQUIRE(dppca::detail::acg_envelope_scale(Eigen::VectorXd::Zero(5)) == Approx(5.0).margin(1e-9));
  Eigen::VectorXd lambda(4);
  lambda << 0.0, 1.5, 3.0, 12.0;
  const double b = dppca::detail::acg_envelope_scale(lambda);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) sum += 1.0 / (b + 2.0 * lambda[i]);
  REQUIRE(sum == Approx(1.0).margin(1e-9));
  REQUIRE(b > 0.0);
  REQUIRE(b <= 4.0);
}

TEST_CASE("exhausting the proposal budget raises a diagnosable sampler error") {
  Eigen::VectorXd lambda(3);
  lambda << 0.0, 5000.0, 5000.0;
  dppca::Rng rng(71);
  dppca::SamplerTelemetry telemetry;
  bool threw = false;
  try {
    (void)dppca::detail::bingham_draw_from_spectrum(lambda, Eigen::MatrixXd::Identity(3, 3), rng,
                                                    &telemetry, /*cap=*/0);
  } catch (const dppca::sampler_error& e) {
    threw = true;
    REQUIRE(e.proposals() == 0);
    REQUIRE(e.accepted() == 0);
    REQUIRE(std::string(e.what()).find("exhausted") != std::string::npos);
  }
  REQUIRE(threw);
}

TEST_CASE("uniform_frame draws orthonormal frames deterministically") {
  const auto f1 = dppca::uniform_frame(6, 3, 1234);
  const auto f2 = dppca::uniform_frame(6, 3, 1234);
  REQUIRE((f1.columns() - f2.columns()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((f1.columns().transpose() * f1.columns() - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-10);
  const auto f3 = dppca::uniform_frame(6, 3, 1235);
  REQUIRE((f1.columns() - f3.columns()).cwiseAbs().maxCoeff() > 0.0);
  REQUIRE_THROWS_AS(dppca::uniform_frame(2, 3, 1), dppca::parameter_error);
  REQUIRE_THROWS_AS(dppca::uniform_frame(2, 0, 1), dppca::parameter_error);
}

TEST_CASE("uniform_frame in one dimension hits both signs evenly") {
  int plus = 0, minus = 0;
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const double v = dppca::uniform_frame(1, 1, seed).columns()(0, 0);
    REQUIRE(std::abs(std::abs(v) - 1.0) < 1e-12);
    (v > 0 ? plus : minus) += 1;
    sum += v;
  }
  REQUIRE(plus > 0);
  REQUIRE(minus > 0);
  REQUIRE(std::abs(sum / 10000.0) < 0.03);
}

TEST_CASE("uniform_frame coordinates have zero mean on the sphere") {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    mean += dppca::uniform_frame(3, 1, 9000 + seed).columns().col(0);
  }
  mean /= 10000.0;
  REQUIRE(mean.cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("uniform_frame projector averages to (k/d) identity") {
  const int d = 5, k = 2;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const Eigen::MatrixXd v = dppca::uniform_frame(d, k, 31000 + seed).columns();
    acc += v * v.transpose();
  }
  acc /= 10000.0;
  const Eigen::MatrixXd want = (static_cast<double>(k) / d) * Eigen::MatrixXd::Identity(d, d);
  REQUIRE((acc - want).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("matrix Bingham parameters are validated") {
  Eigen::MatrixXd asym(3, 3);
  asym.setZero();
  asym(0, 1) = 0.5;
  REQUIRE_THROWS_AS(dppca::BinghamParam(asym, 1), dppca::parameter_error);
  const Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 3);
  REQUIRE_THROWS_AS(dppca::BinghamParam(b, 0), dppca::parameter_error);
  REQUIRE_THROWS_AS(dppca::BinghamParam(b, 4), dppca::parameter_error);
  REQUIRE_NOTHROW(dppca::BinghamParam(b, 3));
}

TEST_CASE("matrix Bingham chains are deterministic and orthonormal") {
  Eigen::MatrixXd b = Eigen::VectorXd::LinSpaced(5, 2.0, 0.0).asDiagonal();
  const dppca::BinghamParam param(b, 2);
  const auto t1 = dppca::sample_matrix_bingham(param, 50, 1, 808);
  const auto t2 = dppca::sample_matrix_bingham(param, 50, 1, 808);
  REQUIRE(t1.frames().size() == 50);
  REQUIRE(t1.d() == 5);
  REQUIRE(t1.k() == 2);
  REQUIRE(t1.seed() == 808);
  REQUIRE(t1.thin() == 1);
  REQUIRE(t1.iterations() == 50);
  for (std::size_t i = 0; i < t1.frames().size(); ++i) {
    REQUIRE((t1.frames()[i] - t2.frames()[i]).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((t1.frames()[i].transpose() * t1.frames()[i] - Eigen::MatrixXd::Identity(2, 2)).norm() <
            1e-8);
  }
  const auto t3 = dppca::sample_matrix_bingham(param, 50, 1, 809);
  REQUIRE((t1.frames()[49] - t3.frames()[49]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("thinning stores every thin-th sweep") {
  const dppca::BinghamParam param(Eigen::MatrixXd::Zero(4, 4), 2);
  const auto trace = dppca::sample_matrix_bingham(param, 10, 3, 4321);
  REQUIRE(trace.frames().size() == 3);
  REQUIRE(trace.thin() == 3);
}

TEST_CASE("matrix Bingham rejects invalid run parameters") {
  const dppca::BinghamParam param(Eigen::MatrixXd::Zero(4, 4), 2);
  REQUIRE_THROWS_AS(dppca::sample_matrix_bingham(param, 0, 1, 1), dppca::parameter_error);
  REQUIRE_THROWS_AS(dppca::sample_matrix_bingham(param, 10, 0, 1), dppca::parameter_error);
  const auto wrong_init = dppca::uniform_frame(4, 3, 2);
  REQUIRE_THROWS_AS(dppca::sample_matrix_bingham(param, 10, 1, 1, wrong_init),
                    dppca::parameter_error);
  const auto good_init = dppca::uniform_frame(4, 2, 2);
  REQUIRE_NOTHROW(dppca::sample_matrix_bingham(param, 10, 1, 1, good_init));
}

TEST_CASE("single-column chains reproduce the exact sampler's marginal") {
  Eigen::MatrixXd b = Eigen::Vector3d(2.0, 0.5, 0.0).asDiagonal();
  const dppca::BinghamParam param(b, 1);
  const auto trace = dppca::sample_matrix_bingham(param, 2000, 1, 515);
  std::vector<double> chain_ts;
  chain_ts.reserve(trace.frames().size());
  for (const auto& f : trace.frames()) chain_ts.push_back(f(0, 0) * f(0, 0));
  const auto exact = dppca::sample_vector_bingham(b, 516, 4000);
  std::vector<double> exact_ts;
  exact_ts.reserve(exact.size());
  for (const auto& v : exact) exact_ts.push_back(v[0] * v[0]);
  REQUIRE(two_sample_ks(chain_ts, exact_ts) < 0.07);
}

TEST_CASE("flat-target chains average to the uniform projector") {
  const int d = 5, k = 2;
  const dppca::BinghamParam param(Eigen::MatrixXd::Zero(d, d), k);
  const auto trace = dppca::sample_matrix_bingham(param, 10000, 1, 626);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  for (const auto& f : trace.frames()) acc += f * f.transpose();
  acc /= static_cast<double>(trace.frames().size());
  const Eigen::MatrixXd want = (static_cast<double>(k) / d) * Eigen::MatrixXd::Identity(d, d);
  REQUIRE((acc - want).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("full-width chains keep d-by-d frames orthonormal") {
  Eigen::MatrixXd b = Eigen::Vector3d(1.5, 0.5, 0.0).asDiagonal();
  const dppca::BinghamParam param(b, 3);
  const auto trace = dppca::sample_matrix_bingham(param, 200, 1, 737);
  REQUIRE(trace.frames().size() == 200);
  for (const auto& f : trace.frames()) {
    REQUIRE((f.transpose() * f - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-8);
  }
}

TEST_CASE("running-mean diagnostic starts at one") {
  const dppca::BinghamParam param(Eigen::MatrixXd::Zero(4, 4), 2);
  const auto trace = dppca::sample_matrix_bingham(param, 50, 1, 848);
  const auto diag = dppca::burnin_statistic(trace, {1, 10, 50});
  REQUIRE(diag.values.size() == 3);
  REQUIRE(diag.values[0].first == 1);
  REQUIRE(diag.values[0].second == Approx(1.0).margin(1e-12));
}

TEST_CASE("running-mean diagnostic is exact on crafted traces") {
  const Eigen::MatrixXd v = dppca::uniform_frame(4, 2, 5150).columns();

  dppca::ChainTrace frozen(4, 2, 0, 1, 6);
  for (int i = 0; i < 6; ++i) frozen.push(v);
  for (const auto& [t, f] : dppca::burnin_statistic(frozen, {1, 2, 3, 6}).values) {
    REQUIRE(f == Approx(1.0).margin(1e-12));
  }

  dppca::ChainTrace alternating(4, 2, 0, 1, 6);
  for (int i = 0; i < 6; ++i) alternating.push(i % 2 == 0 ? v : Eigen::MatrixXd(-v));
  const auto diag = dppca::burnin_statistic(alternating, {1, 2, 3, 4, 5, 6});
  REQUIRE(diag.values[0].second == Approx(1.0).margin(1e-12));
  REQUIRE(diag.values[1].second == Approx(0.0).margin(1e-12));
  REQUIRE(diag.values[2].second == Approx(1.0 / 3.0).margin(1e-12));
  REQUIRE(diag.values[3].second == Approx(0.0).margin(1e-12));
  REQUIRE(diag.values[5].second == Approx(0.0).margin(1e-12));
}

TEST_CASE("running-mean diagnostic validates its inputs") {
  dppca::ChainTrace empty(3, 1, 0, 1, 0);
  REQUIRE_THROWS_AS(dppca::burnin_statistic(empty, {1}), dppca::parameter_error);
  const dppca::BinghamParam param(Eigen::MatrixXd::Zero(3, 3), 1);
  const auto trace = dppca::sample_matrix_bingham(param, 10, 1, 1);
  REQUIRE_THROWS_AS(dppca::burnin_statistic(trace, {0}), dppca::parameter_error);
  REQUIRE_THROWS_AS(dppca::burnin_statistic(trace, {11}), dppca::parameter_error);
}

TEST_CASE("running-mean diagnostic decays for a mixing chain") {
  Eigen::VectorXd diag_entries(6);
  diag_entries << 3.0, 2.0, 1.0, 0.0, 0.0, 0.0;
  const dppca::BinghamParam param(Eigen::MatrixXd(diag_entries.asDiagonal()), 2);
  const auto trace = dppca::sample_matrix_bingham(param, 400, 1, 959);
  const auto diag = dppca::burnin_statistic(trace, {1, 400});
  REQUIRE(diag.values[0].second == Approx(1.0).margin(1e-12));
  REQUIRE(diag.values[1].second < 0.2);
}

TEST_CASE("trace CSV dump carries metadata and one record per frame") {
  const dppca::BinghamParam param(Eigen::MatrixXd::Zero(3, 3), 1);
  const auto trace = dppca::sample_matrix_bingham(param, 4, 2, 11);
  std::ostringstream os;
  dppca::trace_to_csv(trace, os);
  const std::string text = os.str();
  REQUIRE(text.find("# d=3 k=1 seed=11 thin=2") != std::string::npos);
  REQUIRE(text.find("frame_index") != std::string::npos);
  REQUIRE(std::count(text.begin(), text.end(), '\n') == 4);
}
