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
// Sampling from the Bingham distribution on the unit sphere, density
// proportional to exp(v^T B v), and from its matrix-variate extension over
// d x k orthonormal frames via a column-wise Gibbs sweep. The vector core is
// an exact rejection sampler, so the only approximation anywhere in the
// matrix case is the finite chain length.

#ifndef DPPCA_BINGHAM_HPP_
#define DPPCA_BINGHAM_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dppca/errors.hpp"
#include "dppca/linalg.hpp"
#include "dppca/rng.hpp"

namespace dppca {

// Exponent parameter of the matrix Bingham density etr(V^T B V) together
// with the target column count k.
struct BinghamParam {
  Eigen::MatrixXd b;
  int k = 1;

  BinghamParam(Eigen::MatrixXd b_in, int k_in) : b(std::move(b_in)), k(k_in) {
    if (b.rows() != b.cols() || b.rows() < 1) {
      throw parameter_error("BinghamParam: B must be square");
    }
    const double asym = (b - b.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol::kSymmetrySlack) {
      throw parameter_error("BinghamParam: B asymmetry exceeds tolerance");
    }
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      for (Eigen::Index j = 0; j < i; ++j) b(i, j) = b(j, i);
    }
    if (k < 1 || k > b.rows()) {
      throw parameter_error("BinghamParam: need 1 <= k <= d");
    }
  }
};

struct SamplerTelemetry {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;

  double acceptance_rate() const {
    return proposals == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
};

// Proposals allowed per accepted draw before the sampler gives up.
inline constexpr std::uint64_t kRejectionCap = 1000000;

namespace detail {

// Envelope tuning for the angular-central-Gaussian proposal (Kent, Ganeiber
// and Mardia's rejection scheme): given the concentration spectrum
// lambda_i >= 0 with min lambda = 0, solve sum_i 1/(b + 2 lambda_i) = 1 for
// b. The left side decreases from +inf (the lambda = 0 term) to <= 1 at
// b = d, so a root exists in (0, d]; bisection suffices.
inline double acg_envelope_scale(const Eigen::VectorXd& lambda) {
  const double d = static_cast<double>(lambda.size());
  auto g = [&lambda](double b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) s += 1.0 / (b + 2.0 * lambda[i]);
    return s;
  };
  double lo = 1e-12, hi = d;
  if (g(hi) >= 1.0) return hi;  // all lambda ~ 0: root at d up to roundoff
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 1.0) lo = mid;
    else hi = mid;
    if (hi - lo < 1e-15 * d) break;
  }
  return 0.5 * (lo + hi);
}

// One exact draw from density proportional to exp(v^T B v) on S^{d-1},
// given the eigensystem of -B's spread: lambda_i = nu_max - nu_i (so the
// target is exp(-sum lambda_i x_i^2) in the eigenbasis, x on the sphere).
// Proposals are ACG with inverse scales omega_i = 1 + 2 lambda_i / b; the
// bound constant is log M = -(d-b)/2 + (d/2) log(d/b), the maximum of the
// log ratio at s = (d-b)/2. B = c I accepts every proposal.
inline Eigen::VectorXd bingham_draw_from_spectrum(const Eigen::VectorXd& lambda,
                                                  const Eigen::MatrixXd& basis, Rng& rng,
                                                  SamplerTelemetry* telemetry,
                                                  std::uint64_t cap = kRejectionCap) {
  const Eigen::Index d = lambda.size();
  const double dd = static_cast<double>(d);
  const double b = acg_envelope_scale(lambda);
  Eigen::VectorXd inv_sqrt_omega(d);
  for (Eigen::Index i = 0; i < d; ++i) inv_sqrt_omega[i] = 1.0 / std::sqrt(1.0 + 2.0 * lambda[i] / b);
  const double log_m = -(dd - b) / 2.0 + (dd / 2.0) * std::log(dd / b);

  Eigen::VectorXd x(d);
  for (std::uint64_t trial = 0; trial < cap; ++trial) {
    double norm2 = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      x[i] = rng.gaussian() * inv_sqrt_omega[i];
      norm2 += x[i] * x[i];
    }
    if (norm2 == 0.0) continue;
    x /= std::sqrt(norm2);
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) s += lambda[i] * x[i] * x[i];
    const double log_ratio = -s + (dd / 2.0) * std::log1p(2.0 * s / b) - log_m;
    if (telemetry != nullptr) ++telemetry->proposals;
    if (std::log(rng.uniform_positive()) < log_ratio) {
      if (telemetry != nullptr) ++telemetry->accepted;
      return basis * x;
    }
  }
  throw sampler_error("bingham rejection sampler exhausted " + std::to_string(cap) + " proposals",
                      telemetry != nullptr ? telemetry->proposals : cap,
                      telemetry != nullptr ? telemetry->accepted : 0);
}

inline Eigen::VectorXd bingham_draw(const Eigen::MatrixXd& b_sym, Rng& rng,
                                    SamplerTelemetry* telemetry,
                                    std::uint64_t cap = kRejectionCap) {
  Eigen::VectorXd nu;
  Eigen::MatrixXd basis;
  symmetric_eigensystem(b_sym, &nu, &basis);
  Eigen::VectorXd lambda = Eigen::VectorXd::Constant(nu.size(), nu[0]) - nu;
  return bingham_draw_from_spectrum(lambda, basis, rng, telemetry, cap);
}

}  // namespace detail

// Exact i.i.d. draws from density proportional to exp(v^T B v) on the unit
// sphere. The eigendecomposition of B is done once for the whole batch.
inline std::vector<Eigen::VectorXd> sample_vector_bingham(const Eigen::MatrixXd& b, std::uint64_t seed,
                                                          int count,
                                                          SamplerTelemetry* telemetry = nullptr) {
  if (b.rows() != b.cols() || b.rows() < 1) {
    throw parameter_error("sample_vector_bingham: B must be square");
  }
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > tol::kSymmetrySlack) {
    throw parameter_error("sample_vector_bingham: B must be symmetric");
  }
  if (count < 0) {
    throw parameter_error("sample_vector_bingham: count must be nonnegative");
  }
  Eigen::VectorXd nu;
  Eigen::MatrixXd basis;
  detail::symmetric_eigensystem(0.5 * (b + b.transpose()), &nu, &basis);
  Eigen::VectorXd lambda = Eigen::VectorXd::Constant(nu.size(), nu[0]) - nu;
  Rng rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(detail::bingham_draw_from_spectrum(lambda, basis, rng, telemetry));
  }
  return out;
}

// Haar-uniform d x k orthonormal frame: Gaussian matrix, thin QR, columns
// sign-fixed by the diagonal of R so the distribution is exactly invariant.
inline OrthonormalFrame uniform_frame(int d, int k, std::uint64_t seed) {
  if (k < 1 || k > d) {
    throw parameter_error("uniform_frame: need 1 <= k <= d");
  }
  Rng rng(seed);
  Eigen::MatrixXd z(d, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) z(i, j) = rng.gaussian();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return OrthonormalFrame(q);
}

// Ordered record of the thinned states of one Gibbs chain.
class ChainTrace {
 public:
  ChainTrace(int d, int k, std::uint64_t seed, std::int64_t thin, std::int64_t iterations)
      : d_(d), k_(k), seed_(seed), thin_(thin), iterations_(iterations) {}

  void push(const Eigen::MatrixXd& frame) {
    // Validates the orthonormal-frame invariants on every stored state.
    frames_.push_back(OrthonormalFrame(frame).columns());
  }

  const std::vector<Eigen::MatrixXd>& frames() const { return frames_; }
  int d() const { return d_; }
  int k() const { return k_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t thin() const { return thin_; }
  std::int64_t iterations() const { return iterations_; }

 private:
  std::vector<Eigen::MatrixXd> frames_;
  int d_;
  int k_;
  std::uint64_t seed_;
  std::int64_t thin_;
  std::int64_t iterations_;
};

// Column-wise Gibbs sampler for the matrix Bingham distribution (Hoff's
// scheme). Each sweep updates columns in fixed cyclic order; column r is
// redrawn exactly from its full conditional, a vector Bingham on the
// (d-k+1)-sphere of the orthogonal complement of the other columns. With
// k = 1 every sweep is therefore one exact independent draw.
inline ChainTrace sample_matrix_bingham(const BinghamParam& param, std::int64_t iterations,
                                        std::int64_t thin, std::uint64_t seed,
                                        const std::optional<OrthonormalFrame>& init = std::nullopt,
                                        SamplerTelemetry* telemetry = nullptr) {
  const Eigen::Index d = param.b.rows();
  const int k = param.k;
  if (iterations < 1) throw parameter_error("sample_matrix_bingham: iterations must be >= 1");
  if (thin < 1) throw parameter_error("sample_matrix_bingham: thin must be >= 1");
  if (init.has_value() && (init->d() != d || init->k() != k)) {
    throw parameter_error("sample_matrix_bingham: init frame dimensions do not match (d, k)");
  }

  Rng rng(seed);
  Eigen::MatrixXd v;
  if (init.has_value()) {
    v = init->columns();
  } else {
    // Uniform start drawn from the chain's own stream (derived sub-seed so
    // the start does not consume from the sweep stream).
    v = uniform_frame(static_cast<int>(d), k, derive_seed(seed, {hash_label("chain-init")})).columns();
  }

  ChainTrace trace(static_cast<int>(d), k, seed, thin, iterations);
  for (std::int64_t sweep = 1; sweep <= iterations; ++sweep) {
    for (int r = 0; r < k; ++r) {
      try {
        if (k == 1) {
          v.col(0) = detail::bingham_draw(param.b, rng, telemetry);
        } else {
          Eigen::MatrixXd others(d, k - 1);
          int c = 0;
          for (int j = 0; j < k; ++j) {
            if (j != r) others.col(c++) = v.col(j);
          }
          // Orthonormal basis of the complement: trailing columns of the
          // full Q factor of the other columns.
          Eigen::HouseholderQR<Eigen::MatrixXd> qr(others);
          const Eigen::MatrixXd q = qr.householderQ();
          const Eigen::MatrixXd n = q.rightCols(d - (k - 1));
          Eigen::MatrixXd br = n.transpose() * param.b * n;
          br = 0.5 * (br + br.transpose()).eval();
          v.col(r) = n * detail::bingham_draw(br, rng, telemetry);
        }
      } catch (const sampler_error& e) {
        throw sampler_error("sweep " + std::to_string(sweep) + ", column " + std::to_string(r) +
                                ": " + e.what(),
                            e.proposals(), e.accepted());
      }
    }
    if (sweep % thin == 0) trace.push(v);
  }
  return trace;
}

struct BurninDiagnostic {
  // (T, F_k(T)) pairs in the caller's checkpoint order.
  std::vector<std::pair<std::int64_t, double>> values;
};

// Running-mean diagnostic F_k(T) = (1/sqrt(k)) || (1/T) sum_{t<=T} X(t) ||_F.
// The Bingham distribution has mean zero (column sign symmetry), so F decays
// toward 0 as the chain forgets its start; F(1) = 1 for any orthonormal frame.
inline BurninDiagnostic burnin_statistic(const ChainTrace& trace,
                                         const std::vector<std::int64_t>& checkpoints) {
  if (trace.frames().empty()) {
    throw parameter_error("burnin_statistic: empty trace");
  }
  std::int64_t max_t = 0;
  for (std::int64_t t : checkpoints) {
    if (t < 1 || t > static_cast<std::int64_t>(trace.frames().size())) {
      throw parameter_error("burnin_statistic: checkpoint " + std::to_string(t) +
                            " outside trace length");
    }
    max_t = std::max(max_t, t);
  }
  std::map<std::int64_t, double> at;
  Eigen::MatrixXd running = Eigen::MatrixXd::Zero(trace.d(), trace.k());
  const double sqrt_k = std::sqrt(static_cast<double>(trace.k()));
  for (std::int64_t t = 1; t <= max_t; ++t) {
    running += trace.frames()[static_cast<std::size_t>(t - 1)];
    at[t] = running.norm() / (static_cast<double>(t) * sqrt_k);
  }
  BurninDiagnostic diag;
  diag.values.reserve(checkpoints.size());
  for (std::int64_t t : checkpoints) diag.values.emplace_back(t, at[t]);
  return diag;
}

// Trace dump, one frame per record: header row carries the chain metadata,
// then frame entries in row-major order.
inline void trace_to_csv(const ChainTrace& trace, std::ostream& os) {
  os << "# d=" << trace.d() << " k=" << trace.k() << " seed=" << trace.seed()
     << " thin=" << trace.thin() << "\n";
  os << "frame_index";
  for (int i = 0; i < trace.d(); ++i) {
    for (int j = 0; j < trace.k(); ++j) os << ",v_" << i << "_" << j;
  }
  os << "\n";
  os.precision(17);
  for (std::size_t t = 0; t < trace.frames().size(); ++t) {
    os << t;
    const Eigen::MatrixXd& f = trace.frames()[t];
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index j = 0; j < f.cols(); ++j) os << "," << f(i, j);
    }
    os << "\n";
  }
}

}  // namespace dppca

#endif  // DPPCA_BINGHAM_HPP_
