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

#include "qchar/direct_mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qchar/errors.hpp"
#include "qchar/nelder_mead.hpp"
#include "qchar/spectral_estimator.hpp"

namespace qchar {

std::vector<double> AxisSpec::values() const { return linear_axis(lo, hi, count); }

double residual_sum_of_squares(const PolarParams& p, const DataTrace& d) {
  const SpectralDecomposition sd = spectral_decompose(build_hamiltonian(polar_to_couplings(p)));
  const auto t = d.times();
  double ss = 0.0;
  for (std::size_t n = 0; n < d.size(); ++n) {
    const double r = d.frequency(n) - ground_population(sd, t[n]);
    ss += r * r;
  }
  return ss;
}

double direct_log_likelihood(const PolarParams& p, const DataTrace& d) {
  return -0.5 * static_cast<double>(d.size()) * std::log(residual_sum_of_squares(p, d) + kResidualFloor);
}

Grid3 grid_scan3(const DataTrace& d, const Grid3Spec& spec) {
  Grid3 g;
  g.omega_cap_axis = spec.omega_cap.values();
  g.alpha_axis = spec.alpha.values();
  g.epsilon_axis = spec.epsilon.values();
  g.values.resize(g.omega_cap_axis.size() * g.alpha_axis.size() * g.epsilon_axis.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.omega_cap_axis.size(); ++i) {
    for (std::size_t j = 0; j < g.alpha_axis.size(); ++j) {
      for (std::size_t k = 0; k < g.epsilon_axis.size(); ++k) {
        const double v = direct_log_likelihood(g.point(i, j, k), d);
        g.values[g.index(i, j, k)] = v;
        if (v > best) {
          best = v;
          g.argmax = {i, j, k};
        }
      }
    }
  }
  return g;
}

DirectEstimate refine_local(const DataTrace& d, const PolarParams& start, const RefineOptions& options) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::array<double, 3> lower{0.0, 0.0, 0.0};
  const std::array<double, 3> upper{kInf, std::numbers::pi / 2.0, kInf};
  if (!(start.omega_cap >= 0.0) || !(start.alpha >= 0.0 && start.alpha <= upper[1]) ||
      !std::isfinite(start.epsilon) || !std::isfinite(start.omega_cap)) {
    throw InvalidParameter("refinement start outside parameter bounds");
  }
  // p11 is invariant under ε -> -ε, so the search runs in the ε >= 0 gauge.
  auto objective = [&](std::span<const double> x) {
    return -direct_log_likelihood({x[0], x[1], x[2]}, d);
  };
  NelderMeadOptions nm;
  nm.x_tolerance = options.x_tolerance;
  nm.max_evaluations = options.max_evaluations;
  const NelderMeadResult r = nelder_mead_minimize(
      objective, {start.omega_cap, start.alpha, std::abs(start.epsilon)}, options.initial_step, lower, upper, nm);
  DirectEstimate est;
  est.polar = {r.x[0], r.x[1], r.x[2]};
  est.log_likelihood = -r.value;
  est.iterations = r.iterations;
  est.evaluations = r.evaluations;
  est.converged = r.converged;
  return est;
}

namespace {

std::vector<std::array<std::size_t, 3>> local_maxima(const Grid3& g) {
  const long ni = static_cast<long>(g.omega_cap_axis.size());
  const long nj = static_cast<long>(g.alpha_axis.size());
  const long nk = static_cast<long>(g.epsilon_axis.size());
  std::vector<std::array<std::size_t, 3>> out;
  for (long i = 0; i < ni; ++i) {
    for (long j = 0; j < nj; ++j) {
      for (long k = 0; k < nk; ++k) {
        const double v = g.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k));
        bool is_max = true;
        for (long di = -1; di <= 1 && is_max; ++di) {
          for (long dj = -1; dj <= 1 && is_max; ++dj) {
            for (long dk = -1; dk <= 1 && is_max; ++dk) {
              const long a = i + di, b = j + dj, c = k + dk;
              if ((di | dj | dk) == 0 || a < 0 || b < 0 || c < 0 || a >= ni || b >= nj || c >= nk) continue;
              if (g.at(static_cast<std::size_t>(a), static_cast<std::size_t>(b), static_cast<std::size_t>(c)) > v) {
                is_max = false;
              }
            }
          }
        }
        if (is_max) out.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k)});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
    return g.at(x[0], x[1], x[2]) > g.at(y[0], y[1], y[2]);
  });
  return out;
}

double half_spacing(const std::vector<double>& axis, double fallback) {
  return axis.size() > 1 ? 0.5 * (axis[1] - axis[0]) : fallback;
}

}  // namespace

DirectFit estimate_direct(const DataTrace& d, const DirectFitOptions& options) {
  DirectFit fit;
  fit.grid = grid_scan3(d, options.grid);
  auto starts = local_maxima(fit.grid);
  if (starts.empty()) starts.push_back(fit.grid.argmax);
  starts.resize(std::min<std::size_t>(starts.size(), 2 * static_cast<std::size_t>(std::max(options.starts, 1))));

  RefineOptions refine = options.refine;
  refine.initial_step = {half_spacing(fit.grid.omega_cap_axis, refine.initial_step[0]),
                         half_spacing(fit.grid.alpha_axis, refine.initial_step[1]),
                         half_spacing(fit.grid.epsilon_axis, refine.initial_step[2])};
  // Mirror images in ε are the same start once folded into the ε >= 0 gauge.
  std::vector<PolarParams> points;
  for (const auto& cell : starts) {
    PolarParams p = fit.grid.point(cell[0], cell[1], cell[2]);
    p.epsilon = std::abs(p.epsilon);
    if (std::find(points.begin(), points.end(), p) == points.end()) points.push_back(p);
    if (static_cast<int>(points.size()) >= std::max(options.starts, 1)) break;
  }
  bool first = true;
  for (const auto& p : points) {
    const DirectEstimate est = refine_local(d, p, refine);
    if (first || est.log_likelihood > fit.estimate.log_likelihood) fit.estimate = est;
    first = false;
  }
  return fit;
}

}  // namespace qchar
