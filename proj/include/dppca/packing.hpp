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
// Sphere packings with bounded pairwise coherence and the adversarial
// datasets built on them for the lower-bound arguments: families of inputs
// that any private algorithm must confuse.

#ifndef DPPCA_PACKING_HPP_
#define DPPCA_PACKING_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dppca/errors.hpp"
#include "dppca/linalg.hpp"
#include "dppca/rng.hpp"

namespace dppca {

// Unit vectors whose pairwise inner products all have magnitude < phi.
// The coherence condition is a hard invariant checked at construction.
class PackingSet {
 public:
  PackingSet(std::vector<Eigen::VectorXd> vectors, double phi)
      : vectors_(std::move(vectors)), phi_(phi) {
    if (vectors_.empty()) throw parameter_error("PackingSet: empty vector list");
    if (!(phi_ > 0.0 && phi_ < 1.0)) throw parameter_error("PackingSet: need 0 < phi < 1");
    const Eigen::Index d = vectors_.front().size();
    for (const Eigen::VectorXd& v : vectors_) {
      if (v.size() != d) throw parameter_error("PackingSet: mixed dimensions");
      if (std::fabs(v.norm() - 1.0) > 1e-10) {
        throw parameter_error("PackingSet: vectors must be unit norm");
      }
    }
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
      for (std::size_t j = i + 1; j < vectors_.size(); ++j) {
        if (!(std::fabs(vectors_[i].dot(vectors_[j])) < phi_)) {
          throw parameter_error("PackingSet: pair (" + std::to_string(i) + ", " +
                                std::to_string(j) + ") violates the coherence bound");
        }
      }
    }
  }

  const std::vector<Eigen::VectorXd>& vectors() const { return vectors_; }
  double phi() const { return phi_; }
  Eigen::Index d() const { return vectors_.front().size(); }
  std::size_t size() const { return vectors_.size(); }

 private:
  std::vector<Eigen::VectorXd> vectors_;
  double phi_;
};

// Guaranteed packing size K = (1/8) exp((d-1) log(1/sqrt(1-phi^2))) from the
// probabilistic construction. Returns the real value; callers floor it.
inline double packing_size_formula(int d, double phi) {
  if (d < 2) throw parameter_error("packing_size_formula: need d >= 2");
  const double lo = 1.0 / std::sqrt(2.0 * M_PI * static_cast<double>(d));
  if (!(phi >= lo && phi < 1.0)) {
    throw parameter_error("packing_size_formula: phi outside [(2 pi d)^{-1/2}, 1)");
  }
  return 0.125 * std::exp(-0.5 * (static_cast<double>(d) - 1.0) * std::log1p(-phi * phi));
}

// Builds a packing of at least target_k vectors with coherence < phi.
// target_k <= d short-circuits to the standard basis (pairwise inner
// products are exactly zero). Otherwise vectors are drawn uniformly in
// batches sized by the probabilistic argument at t = 1/2 and kept greedily
// when they clear the coherence bound against everything kept so far; the
// greedy filter makes the invariant structural rather than probabilistic.
inline PackingSet construct_packing(int d, double phi, std::size_t target_k, std::uint64_t seed,
                                    int max_batches = 100) {
  if (d < 1) throw parameter_error("construct_packing: need d >= 1");
  if (!(phi > 0.0 && phi < 1.0)) throw parameter_error("construct_packing: need 0 < phi < 1");
  if (target_k < 1) throw parameter_error("construct_packing: need target_k >= 1");

  std::vector<Eigen::VectorXd> kept;
  if (target_k <= static_cast<std::size_t>(d)) {
    for (std::size_t i = 0; i < target_k; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
      e[static_cast<Eigen::Index>(i)] = 1.0;
      kept.push_back(std::move(e));
    }
    return PackingSet(std::move(kept), phi);
  }

  // Random construction needs the coherence regime of the probabilistic
  // bound; below it the greedy filter would almost surely stall.
  const double lo = 1.0 / std::sqrt(2.0 * M_PI * static_cast<double>(d));
  if (!(phi >= lo)) {
    throw parameter_error("construct_packing: phi below (2 pi d)^{-1/2} with target_k > d");
  }
  const double psi = std::exp(0.5 * (static_cast<double>(d) - 1.0) * std::log1p(-phi * phi));
  const std::int64_t batch =
      std::max<std::int64_t>(16, static_cast<std::int64_t>(std::ceil(1.0 + std::log(2.0) / (2.0 * psi))));

  Rng rng(seed);
  Eigen::VectorXd v(d);
  for (int b = 0; b < max_batches && kept.size() < target_k; ++b) {
    for (std::int64_t s = 0; s < batch && kept.size() < target_k; ++s) {
      double norm2 = 0.0;
      for (int i = 0; i < d; ++i) {
        v[i] = rng.gaussian();
        norm2 += v[i] * v[i];
      }
      if (norm2 == 0.0) continue;
      v /= std::sqrt(norm2);
      bool ok = true;
      for (const Eigen::VectorXd& u : kept) {
        if (std::fabs(u.dot(v)) >= phi) {
          ok = false;
          break;
        }
      }
      if (ok) kept.push_back(v);
    }
  }
  if (kept.size() < target_k) {
    throw construction_error("construct_packing: reached " + std::to_string(kept.size()) +
                                 " of " + std::to_string(target_k) + " vectors",
                             kept.size(), target_k);
  }
  return PackingSet(std::move(kept), phi);
}

// Lifts a packing into the hyperplane orthogonal to the last axis of a
// (d+1)-dimensional space, the form the adversarial construction needs.
inline PackingSet embed_in_hyperplane(const PackingSet& packing) {
  std::vector<Eigen::VectorXd> lifted;
  lifted.reserve(packing.size());
  for (const Eigen::VectorXd& v : packing.vectors()) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(v.size() + 1);
    w.head(v.size()) = v;
    lifted.push_back(std::move(w));
  }
  return PackingSet(std::move(lifted), packing.phi());
}

// One member of the lower-bound dataset family, together with the closed
// forms its spectrum must reproduce.
struct AdversarialDataset {
  DatasetMatrix data;
  int index = 0;                  // which packing direction w_i was used
  std::string branch;             // "main" | "beta-exceeds-gap"
  double gap = 0.0;               // requested (and realized) eigengap
  double beta = 0.0;              // nominal perturbed fraction d/(n epsilon)
  double beta_hat = 0.0;          // realized fraction n_perturbed / n
  double m = 0.0;                 // main-branch mass parameter, 0 otherwise
  std::int64_t n_unperturbed = 0;
  std::int64_t n_perturbed = 0;
  double lambda1 = 0.0;           // closed-form top eigenvalue
  double lambda2 = 0.0;           // closed-form second eigenvalue
  Eigen::VectorXd top_eigenvector;  // closed-form direction, unit norm
};

// Builds the i-th dataset of the family used to show the lower bound.
// Main branch (beta <= gap): floor(n (1 - beta)) copies of sqrt(m) e_d and
// the remaining records (e_d + w_i) / sqrt(2), with the mass parameter
// m = sqrt(gap^2 - beta_hat^2) / (1 - beta_hat) computed from the realized
// count fraction beta_hat so the realized eigengap equals gap exactly.
// Alternate branch (beta > gap): zero records plus copies of
// sqrt(gap / beta_hat) w_i, giving spectrum (gap, 0, ..., 0).
inline AdversarialDataset adversarial_dataset(int d, std::int64_t n, double epsilon, double gap,
                                              int index, const PackingSet& packing) {
  if (d < 2) throw parameter_error("adversarial_dataset: need d >= 2");
  if (n < 1) throw parameter_error("adversarial_dataset: need n >= 1");
  if (!(epsilon > 0.0)) throw parameter_error("adversarial_dataset: epsilon must be positive");
  if (!(gap > 0.0 && gap <= 0.5)) {
    throw parameter_error("adversarial_dataset: need 0 < gap <= 1/2");
  }
  if (packing.d() != d) throw parameter_error("adversarial_dataset: packing dimension mismatch");
  if (index < 0 || static_cast<std::size_t>(index) >= packing.size()) {
    throw parameter_error("adversarial_dataset: packing index out of range");
  }
  const Eigen::VectorXd& w = packing.vectors()[static_cast<std::size_t>(index)];
  if (std::fabs(w[d - 1]) > 1e-10) {
    throw parameter_error("adversarial_dataset: packing vectors must be orthogonal to e_d");
  }

  const double nn = static_cast<double>(n);
  const double beta = static_cast<double>(d) / (nn * epsilon);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
  y[d - 1] = 1.0;

  Eigen::MatrixXd cols(d, n);
  AdversarialDataset out{DatasetMatrix(Eigen::MatrixXd::Zero(1, 1), 1.0)};
  out.index = index;
  out.gap = gap;
  out.beta = beta;

  if (beta <= gap) {
    out.branch = "main";
    std::int64_t n1 = static_cast<std::int64_t>(std::floor(nn * (1.0 - beta)));
    std::int64_t n2 = n - n1;
    double beta_hat = static_cast<double>(n2) / nn;
    if (beta_hat > gap) {
      // Remainder-to-perturbed rounding can overshoot the gap at knife-edge
      // parameters; flip the remainder to the unperturbed group instead.
      n2 = static_cast<std::int64_t>(std::floor(nn * beta));
      n1 = n - n2;
      beta_hat = static_cast<double>(n2) / nn;
    }
    out.n_unperturbed = n1;
    out.n_perturbed = n2;
    out.beta_hat = beta_hat;
    out.m = std::sqrt(std::max(gap * gap - beta_hat * beta_hat, 0.0)) / (1.0 - beta_hat);

    const Eigen::VectorXd pure = std::sqrt(out.m) * y;
    const Eigen::VectorXd mixed = (y + w) / std::sqrt(2.0);
    for (std::int64_t j = 0; j < n1; ++j) cols.col(j) = pure;
    for (std::int64_t j = n1; j < n; ++j) cols.col(j) = mixed;

    // Second moment restricted to span{y, w_i}: [[a, b], [b, c]].
    const double a = (1.0 - beta_hat) * out.m + beta_hat / 2.0;
    const double b = beta_hat / 2.0;
    const double c = beta_hat / 2.0;
    const double spread = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
    out.lambda1 = 0.5 * (a + c) + 0.5 * spread;
    out.lambda2 = 0.5 * (a + c) - 0.5 * spread;
    if (b > 0.0) {
      Eigen::VectorXd u = b * y + (out.lambda1 - a) * w;
      out.top_eigenvector = u / u.norm();
    } else {
      // All mass on the pure direction (the perturbed group rounded away).
      out.top_eigenvector = y;
    }
  } else {
    out.branch = "beta-exceeds-gap";
    std::int64_t n1 =
        beta >= 1.0 ? 0 : static_cast<std::int64_t>(std::floor(nn * (1.0 - beta)));
    std::int64_t n2 = n - n1;
    out.n_unperturbed = n1;
    out.n_perturbed = n2;
    out.beta_hat = static_cast<double>(n2) / nn;
    const Eigen::VectorXd rec = std::sqrt(gap / out.beta_hat) * w;
    for (std::int64_t j = 0; j < n1; ++j) cols.col(j).setZero();
    for (std::int64_t j = n1; j < n; ++j) cols.col(j) = rec;
    out.lambda1 = gap;
    out.lambda2 = 0.0;
    out.top_eigenvector = w;
  }

  out.data = DatasetMatrix(std::move(cols), 1.0);
  return out;
}

}  // namespace dppca

#endif  // DPPCA_PACKING_HPP_
