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
// Umbrella header for the core library. I/O (which drags in the JSON
// library) stays behind dppca/io.hpp.

#ifndef DPPCA_DPPCA_HPP_
#define DPPCA_DPPCA_HPP_

#include "dppca/bingham.hpp"
#include "dppca/bounds.hpp"
#include "dppca/data.hpp"
#include "dppca/errors.hpp"
#include "dppca/experiment.hpp"
#include "dppca/linalg.hpp"
#include "dppca/mechanisms.hpp"
#include "dppca/packing.hpp"
#include "dppca/rng.hpp"
#include "dppca/stats.hpp"
#include "dppca/version.hpp"

#endif  // DPPCA_DPPCA_HPP_
