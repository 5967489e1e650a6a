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
// Dense symmetric linear algebra for private PCA: dataset and second-moment
// containers, orthonormal frames, the two subspace utility metrics, and the
// per-record score sensitivity used by the exponential mechanism.

#ifndef DPPCA_LINALG_HPP_
#define DPPCA_LINALG_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "dppca/errors.hpp"

namespace dppca {

// Module tolerances. Fixed here; callers needing different slack construct
// their own checks rather than mutating these.
namespace tol {
inline constexpr double kColumnNormSlack = 1e-9;
inline constexpr double kFrameOrthonormality = 1e-8;
inline constexpr double kEigenResidual = 1e-8;
inline constexpr double kPsdSlack = 1e-10;
inline constexpr double kSignComponent = 1e-12;
inline constexpr double kSymmetrySlack = 1e-9;
}  // namespace tol

// Column-per-record data matrix X = [x_1 ... x_n] in R^{d x n}. Every column
// must satisfy ||x_i|| <= norm_bound; violations are rejected loudly rather
// than rescaled, because privacy calibration downstream assumes the bound.
// norm_bound defaults to 1, the standard model. A dataset constructed with a
// larger bound is outside that model and callers must surface the fact.
class DatasetMatrix {
 public:
  explicit DatasetMatrix(Eigen::MatrixXd entries, double norm_bound = 1.0)
      : entries_(std::move(entries)), norm_bound_(norm_bound) {
    if (entries_.rows() < 1 || entries_.cols() < 1) {
      throw parameter_error("DatasetMatrix: need d >= 1 and n >= 1");
    }
    if (!(norm_bound_ > 0.0)) {
      throw parameter_error("DatasetMatrix: norm bound must be positive");
    }
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      const double nj = entries_.col(j).norm();
      if (nj > norm_bound_ + tol::kColumnNormSlack) {
        throw data_error("DatasetMatrix: column " + std::to_string(j) + " has norm " +
                         std::to_string(nj) + " > bound " + std::to_string(norm_bound_));
      }
    }
  }

  const Eigen::MatrixXd& entries() const { return entries_; }
  Eigen::Index d() const { return entries_.rows(); }
  Eigen::Index n() const { return entries_.cols(); }
  double norm_bound() const { return norm_bound_; }

  double max_column_norm() const {
    double m = 0.0;
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) m = std::max(m, entries_.col(j).norm());
    return m;
  }

 private:
  Eigen::MatrixXd entries_;
  double norm_bound_;
};

namespace detail {

// Symmetric eigensystem, deterministically ordered. Uses the symmetric-only
// solver (Householder tridiagonalization + implicit-shift QL); a general
// nonsymmetric solver would admit complex pairs on near-symmetric input,
// which is precisely the failure mode this library exists to avoid.
// Ordering: eigenvalues nonincreasing; ties keep the solver's ascending
// output order (stable), so A = I yields e_1, e_2, ... in index order.
// Sign: first component of each eigenvector with magnitude > 1e-12 is made
// positive.
inline void symmetric_eigensystem(const Eigen::MatrixXd& a, Eigen::VectorXd* values,
                                  Eigen::MatrixXd* vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw parameter_error("symmetric_eigensystem: eigensolver failed to converge");
  }
  const Eigen::Index d = a.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd& raw = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&raw](Eigen::Index i, Eigen::Index j) { return raw[i] > raw[j]; });
  values->resize(d);
  vectors->resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    (*values)[i] = raw[order[static_cast<std::size_t>(i)]];
    vectors->col(i) = solver.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    for (Eigen::Index r = 0; r < d; ++r) {
      const double c = (*vectors)(r, i);
      if (std::fabs(c) > tol::kSignComponent) {
        if (c < 0.0) vectors->col(i) = -vectors->col(i);
        break;
      }
    }
  }
}

}  // namespace detail

// Symmetric d x d matrix with a cached, deterministically ordered
// eigensystem. Symmetry is exact by storage: the upper triangle is mirrored
// onto the lower at construction.
class SecondMomentMatrix {
 public:
  // A = (1/n) X X^T. PSD and Frobenius-norm invariants are enforced here;
  // the norm bound scales with the dataset's column-norm bound.
  static SecondMomentMatrix from_data(const DatasetMatrix& data) {
    const double n = static_cast<double>(data.n());
    Eigen::MatrixXd a = (data.entries() * data.entries().transpose()) / n;
    SecondMomentMatrix s(std::move(a), tol::kSymmetrySlack);
    const double b2 = data.norm_bound() * data.norm_bound();
    if (s.entries().norm() > b2 + tol::kColumnNormSlack) {
      throw data_error("SecondMomentMatrix: Frobenius norm exceeds squared column bound");
    }
    if (s.eigenvalues()[s.d() - 1] < -tol::kPsdSlack) {
      throw data_error("SecondMomentMatrix: second moment not positive semidefinite");
    }
    return s;
  }

  // Wraps an externally built symmetric matrix (noise-perturbed moments,
  // closed-form test matrices). No PSD requirement.
  static SecondMomentMatrix from_symmetric(Eigen::MatrixXd a,
                                           double symmetry_slack = tol::kSymmetrySlack) {
    return SecondMomentMatrix(std::move(a), symmetry_slack);
  }

  const Eigen::MatrixXd& entries() const { return entries_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  Eigen::Index d() const { return entries_.rows(); }

 private:
  SecondMomentMatrix(Eigen::MatrixXd a, double symmetry_slack) : entries_(std::move(a)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
      throw parameter_error("SecondMomentMatrix: matrix must be square and nonempty");
    }
    const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
    if (asym > symmetry_slack) {
      throw parameter_error("SecondMomentMatrix: input asymmetry " + std::to_string(asym) +
                            " exceeds tolerance");
    }
    // Mirror the upper triangle so A_ij == A_ji holds exactly.
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
      for (Eigen::Index j = 0; j < i; ++j) entries_(i, j) = entries_(j, i);
    }
    detail::symmetric_eigensystem(entries_, &eigenvalues_, &eigenvectors_);
  }

  Eigen::MatrixXd entries_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

// d x k matrix with orthonormal columns, validated at construction.
class OrthonormalFrame {
 public:
  explicit OrthonormalFrame(Eigen::MatrixXd columns) : columns_(std::move(columns)) {
    const Eigen::Index d = columns_.rows();
    const Eigen::Index k = columns_.cols();
    if (k < 1 || k > d) {
      throw parameter_error("OrthonormalFrame: need 1 <= k <= d");
    }
    const double dev =
        (columns_.transpose() * columns_ - Eigen::MatrixXd::Identity(k, k)).norm();
    if (!(dev <= tol::kFrameOrthonormality)) {
      throw parameter_error("OrthonormalFrame: columns deviate from orthonormality by " +
                            std::to_string(dev));
    }
  }

  const Eigen::MatrixXd& columns() const { return columns_; }
  Eigen::Index d() const { return columns_.rows(); }
  Eigen::Index k() const { return columns_.cols(); }

 private:
  Eigen::MatrixXd columns_;
};

struct EigengapReport {
  int k = 0;
  double gap = 0.0;      // lambda_k - lambda_{k+1}
  double lambda1 = 0.0;  // top eigenvalue, reported for bound queries
};

inline SecondMomentMatrix second_moment(const DatasetMatrix& data) {
  return SecondMomentMatrix::from_data(data);
}

// Frame of the k leading eigenvectors, in eigenvalue order.
inline OrthonormalFrame top_k_subspace(const SecondMomentMatrix& a, int k) {
  if (k < 1 || k > a.d()) {
    throw parameter_error("top_k_subspace: k out of range");
  }
  return OrthonormalFrame(a.eigenvectors().leftCols(k));
}

// Captured-energy utility tr(V^T A V).
inline double utility_qf(const OrthonormalFrame& v, const SecondMomentMatrix& a) {
  if (v.d() != a.d()) {
    throw parameter_error("utility_qf: frame and matrix dimensions disagree");
  }
  return (v.columns().transpose() * a.entries() * v.columns()).trace();
}

// Alignment utility |<vhat_1, v_1>| for the k = 1 case.
inline double utility_qa(const OrthonormalFrame& vhat, const SecondMomentMatrix& a) {
  if (vhat.k() != 1) {
    throw parameter_error("utility_qa: defined only for single-column frames");
  }
  if (vhat.d() != a.d()) {
    throw parameter_error("utility_qa: frame and matrix dimensions disagree");
  }
  return std::fabs(vhat.columns().col(0).dot(a.eigenvectors().col(0)));
}

inline EigengapReport eigengap(const SecondMomentMatrix& a, int k) {
  if (k < 1 || k > a.d() - 1) {
    throw parameter_error("eigengap: need 1 <= k <= d-1");
  }
  EigengapReport r;
  r.k = k;
  r.gap = a.eigenvalues()[k - 1] - a.eigenvalues()[k];
  r.lambda1 = a.eigenvalues()[0];
  return r;
}

// Spectral norm of x x^T - x' x'^T, the exact per-record sensitivity of the
// exponential-mechanism score n * v^T A v. For rank-two symmetric
// differences the two nonzero eigenvalues have the closed form
// (|a-b| +- sqrt((a+b)^2 - 4c^2)) / 2 with a = ||x||^2, b = ||x'||^2,
// c = <x, x'>, so no eigensolve is needed.
inline double neighbor_score_sensitivity(const Eigen::VectorXd& x, const Eigen::VectorXd& xprime) {
  if (x.size() != xprime.size()) {
    throw parameter_error("neighbor_score_sensitivity: dimension mismatch");
  }
  const double a = x.squaredNorm();
  const double b = xprime.squaredNorm();
  if (a > 1.0 + tol::kColumnNormSlack || b > 1.0 + tol::kColumnNormSlack) {
    throw parameter_error("neighbor_score_sensitivity: inputs must have norm <= 1");
  }
  const double c = x.dot(xprime);
  const double disc = std::max((a + b) * (a + b) - 4.0 * c * c, 0.0);
  return 0.5 * (std::fabs(a - b) + std::sqrt(disc));
}

// Sum over ordered index pairs i <= j of (x_i x_j - y_i y_j)^2. For unit
// vectors this is at most 2, attained by orthogonal elementary vectors.
inline double pairwise_outer_diff(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw parameter_error("pairwise_outer_diff: dimension mismatch");
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (Eigen::Index j = i; j < x.size(); ++j) {
      const double t = x[i] * x[j] - y[i] * y[j];
      s += t * t;
    }
  }
  return s;
}

}  // namespace dppca

#endif  // DPPCA_LINALG_HPP_
