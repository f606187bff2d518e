// Copyright 2026 The qchar Authors
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

// Box-constrained Nelder-Mead simplex minimizer.

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace qchar {

struct NelderMeadOptions {
  double x_tolerance = 1e-6;  // stop when every vertex is this close (max-norm) to the best one
  int max_evaluations = 2000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes f starting from `start` with an axis-aligned initial simplex of
/// size `steps`. Trial points are clipped into [lower, upper] before
/// evaluation, so the returned point always respects the box.
NelderMeadResult nelder_mead_minimize(const std::function<double(std::span<const double>)>& f,
                                      std::vector<double> start, std::span<const double> steps,
                                      std::span<const double> lower, std::span<const double> upper,
                                      const NelderMeadOptions& options = {});

}  // namespace qchar
