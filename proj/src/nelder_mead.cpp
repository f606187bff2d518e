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

#include "qchar/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qchar/errors.hpp"

namespace qchar {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

}  // namespace

NelderMeadResult nelder_mead_minimize(const std::function<double(std::span<const double>)>& f,
                                      std::vector<double> start, std::span<const double> steps,
                                      std::span<const double> lower, std::span<const double> upper,
                                      const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0 || steps.size() != dim || lower.size() != dim || upper.size() != dim) {
    throw InvalidParameter("nelder_mead: dimension mismatch");
  }

  NelderMeadResult result;
  auto clip = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < dim; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  };
  auto eval = [&](std::vector<double> x) {
    clip(x);
    ++result.evaluations;
    double v = f(x);
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    return Vertex{std::move(x), v};
  };

  std::vector<Vertex> simplex;
  simplex.reserve(dim + 1);
  simplex.push_back(eval(start));
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> x = simplex.front().x;
    x[i] += steps[i];
    // Step away from a bound instead of collapsing onto it.
    if (x[i] > upper[i]) x[i] = simplex.front().x[i] - steps[i];
    simplex.push_back(eval(std::move(x)));
  }

  auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t v = 1; v < simplex.size(); ++v) {
      for (std::size_t i = 0; i < dim; ++i) d = std::max(d, std::abs(simplex[v].x[i] - simplex[0].x[i]));
    }
    return d;
  };
  auto affine = [&](const std::vector<double>& c, const std::vector<double>& w, double coef) {
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = c[i] + coef * (w[i] - c[i]);
    return x;
  };

  order();
  while (true) {
    if (diameter() < options.x_tolerance) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evaluations) break;
    ++result.iterations;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v < dim; ++v) {
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v].x[i] / static_cast<double>(dim);
    }
    Vertex& worst = simplex.back();
    Vertex reflected = eval(affine(centroid, worst.x, -1.0));

    if (reflected.f < simplex.front().f) {
      Vertex expanded = eval(affine(centroid, worst.x, -2.0));
      worst = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
    } else if (reflected.f < simplex[dim - 1].f) {
      worst = std::move(reflected);
    } else {
      const bool outside = reflected.f < worst.f;
      Vertex contracted = eval(affine(centroid, worst.x, outside ? -0.5 : 0.5));
      if (contracted.f < (outside ? reflected.f : worst.f)) {
        worst = std::move(contracted);
      } else {
        for (std::size_t v = 1; v < simplex.size(); ++v) {
          simplex[v] = eval(affine(simplex[0].x, simplex[v].x, 0.5));
        }
      }
    }
    order();
  }

  result.x = simplex.front().x;
  result.value = simplex.front().f;
  return result;
}

}  // namespace qchar
