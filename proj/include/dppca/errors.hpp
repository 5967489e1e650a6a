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

#ifndef DPPCA_ERRORS_HPP_
#define DPPCA_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dppca {

// Caller passed arguments outside a routine's documented domain (bad privacy
// budget, non-positive dimensions, non-symmetric input, and so on).
class parameter_error : public std::invalid_argument {
 public:
  explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

// Input data violates a dataset contract (column norms, ragged rows, schema
// mismatches). Distinct from parameter_error so pipelines can report bad
// records separately from bad configuration.
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// A rejection sampler exhausted its proposal budget. Carries how many
// proposals were made and how many were accepted before giving up, so the
// failure is diagnosable from the exception alone.
class sampler_error : public std::runtime_error {
 public:
  sampler_error(const std::string& what, std::uint64_t proposals, std::uint64_t accepted)
      : std::runtime_error(what), proposals_(proposals), accepted_(accepted) {}

  std::uint64_t proposals() const { return proposals_; }
  std::uint64_t accepted() const { return accepted_; }

 private:
  std::uint64_t proposals_;
  std::uint64_t accepted_;
};

// A constructive search (e.g. for a mutually separated direction set) could
// not reach the requested size. Reports the best size achieved.
class construction_error : public std::runtime_error {
 public:
  construction_error(const std::string& what, std::size_t achieved, std::size_t requested)
      : std::runtime_error(what), achieved_(achieved), requested_(requested) {}

  std::size_t achieved() const { return achieved_; }
  std::size_t requested() const { return requested_; }

 private:
  std::size_t achieved_;
  std::size_t requested_;
};

}  // namespace dppca

#endif  // DPPCA_ERRORS_HPP_
