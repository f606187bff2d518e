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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qchar/errors.hpp"
#include "qchar/nelder_mead.hpp"
#include "test_util.hpp"

namespace qchar {
namespace {

using testing::kReference;
using testing::noiseless_trace;

DataTrace reference_trace() {
  return noiseless_trace(kReference, low_discrepancy_times(100, 0.0, 20.0));
}

PolarParams reference_polar() { return couplings_to_polar(kReference); }

double max_abs_diff(const PolarParams& a, const PolarParams& b) {
  return std::max({std::abs(a.omega_cap - b.omega_cap), std::abs(a.alpha - b.alpha),
                   std::abs(a.epsilon - b.epsilon)});
}

TEST(DirectLikelihood, PerfectFitHitsTheFloor) {
  // Ω = 0 keeps the system in |1>, so every shot succeeds and the residual is exactly zero.
  const DataTrace d = noiseless_trace([](double) { return 1.0; }, uniform_times(40, 0.0, 10.0));
  EXPECT_EQ(residual_sum_of_squares({0.0, 0.3, 0.2}, d), 0.0);
  EXPECT_DOUBLE_EQ(direct_log_likelihood({0.0, 0.3, 0.2}, d), -20.0 * std::log(kResidualFloor));
  EXPECT_TRUE(std::isfinite(direct_log_likelihood({0.0, 0.3, 0.2}, d)));
}

TEST(DirectLikelihood, TruthBeatsEveryOtherPoint) {
  const DataTrace d = reference_trace();
  const double at_truth = direct_log_likelihood(reference_polar(), d);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> om(0.1, 4.0), al(0.0, std::numbers::pi / 2), ep(-1.25, 1.25);
  for (int n = 0; n < 200; ++n) {
    EXPECT_GT(at_truth, direct_log_likelihood({om(rng), al(rng), ep(rng)}, d));
  }
}

TEST(DirectLikelihood, MonotoneInResidualAndMatchesLeastSquares) {
  const DataTrace d = simulate_trace(build_hamiltonian(kReference), low_discrepancy_times(50, 0.0, 20.0), 100, 3);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> om(0.1, 4.0), al(0.0, std::numbers::pi / 2), ep(-1.25, 1.25);
  std::vector<PolarParams> pts;
  for (int n = 0; n < 100; ++n) pts.push_back({om(rng), al(rng), ep(rng)});
  std::size_t best_ll = 0, best_rss = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double ll = direct_log_likelihood(pts[i], d);
    const double rss = residual_sum_of_squares(pts[i], d);
    EXPECT_NEAR(ll, -25.0 * std::log(rss), 1e-9 * std::abs(ll));
    if (ll > direct_log_likelihood(pts[best_ll], d)) best_ll = i;
    if (rss < residual_sum_of_squares(pts[best_rss], d)) best_rss = i;
    for (std::size_t j = 0; j < i; ++j) {
      if (residual_sum_of_squares(pts[j], d) < rss) {
        EXPECT_GT(direct_log_likelihood(pts[j], d), ll);
      }
    }
  }
  EXPECT_EQ(best_ll, best_rss);
}

TEST(DirectLikelihood, DetuningSignIsInvisible) {
  const DataTrace d = simulate_trace(build_hamiltonian(kReference), low_discrepancy_times(50, 0.0, 20.0), 100, 4);
  for (double eps : {0.1, 0.5, 1.2}) {
    EXPECT_NEAR(direct_log_likelihood({1.3, 0.7, eps}, d), direct_log_likelihood({1.3, 0.7, -eps}, d), 1e-9);
  }
}

TEST(GridScan3, SingleCellGrid) {
  const DataTrace d = reference_trace();
  const Grid3 g = grid_scan3(d, {{1.0, 1.0, 1}, {0.5, 0.5, 1}, {0.2, 0.2, 1}});
  ASSERT_EQ(g.values.size(), 1u);
  EXPECT_EQ(g.argmax, (std::array<std::size_t, 3>{0, 0, 0}));
  EXPECT_DOUBLE_EQ(g.values[0], direct_log_likelihood({1.0, 0.5, 0.2}, d));
}

TEST(GridScan3, ShapeAndValuesMatchDirectEvaluation) {
  const DataTrace d = reference_trace();
  const Grid3 g = grid_scan3(d, {{0.5, 3.0, 4}, {0.1, 1.4, 3}, {-1.0, 1.0, 5}});
  ASSERT_EQ(g.values.size(), 60u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 5; ++k)
        EXPECT_DOUBLE_EQ(g.at(i, j, k), direct_log_likelihood(g.point(i, j, k), d));
}

TEST(GridScan3, NoiselessTruthOnTheGridIsTheArgmax) {
  const PolarParams truth = reference_polar();
  const DataTrace d = reference_trace();
  // ε axis holds only non-negative values so the twin does not tie.
  const Grid3 g = grid_scan3(d, {{truth.omega_cap - 0.4, truth.omega_cap + 0.4, 5},
                                 {truth.alpha - 0.2, truth.alpha + 0.2, 5},
                                 {truth.epsilon - 0.5, truth.epsilon + 0.5, 5}});
  EXPECT_EQ(g.argmax, (std::array<std::size_t, 3>{2, 2, 2}));
}

TEST(GridScan3, TiesGoToTheLowestIndex) {
  // With all-success data every Ω = 0 cell fits exactly, so the whole Ω = 0 slab ties.
  const DataTrace d = noiseless_trace([](double) { return 1.0; }, uniform_times(30, 0.0, 10.0));
  const Grid3 g = grid_scan3(d, {{0.0, 2.0, 3}, {0.0, 1.5, 4}, {-1.0, 1.0, 3}});
  ASSERT_EQ(g.at(0, 0, 0), g.at(0, 3, 2));
  EXPECT_EQ(g.argmax, (std::array<std::size_t, 3>{0, 0, 0}));
}

TEST(GridScan3, RejectsEmptyAxes) {
  const DataTrace d = reference_trace();
  EXPECT_THROW(grid_scan3(d, {{0.1, 4.0, 0}, {0.0, 1.0, 3}, {0.0, 1.0, 3}}), InvalidParameter);
}

TEST(RefineLocal, StartingAtTheOptimumStaysThere) {
  const PolarParams truth = reference_polar();
  const DirectEstimate e = refine_local(reference_trace(), truth);
  EXPECT_TRUE(e.converged);
  EXPECT_LT(max_abs_diff(e.polar, truth), 1e-8);
}

TEST(RefineLocal, ConvergesBackFromADisplacedStart) {
  const PolarParams truth = reference_polar();
  // On [0, 20] the fringes are narrow enough that a 0.05 offset lands in a
  // neighbouring local optimum; half the window keeps it in the main basin.
  const DataTrace d = noiseless_trace(kReference, low_discrepancy_times(100, 0.0, 10.0));
  RefineOptions opts;
  opts.x_tolerance = 1e-9;
  const DirectEstimate e =
      refine_local(d, {truth.omega_cap + 0.05, truth.alpha + 0.05, truth.epsilon + 0.05}, opts);
  EXPECT_TRUE(e.converged);
  EXPECT_LT(max_abs_diff(e.polar, truth), 1e-6);
}

TEST(RefineLocal, NegativeDetuningStartIsFolded) {
  const PolarParams truth = reference_polar();
  const DirectEstimate e = refine_local(reference_trace(), {truth.omega_cap, truth.alpha, -truth.epsilon});
  EXPECT_GE(e.polar.epsilon, 0.0);
  EXPECT_LT(max_abs_diff(e.polar, truth), 1e-6);
}

TEST(RefineLocal, StaysInsideTheParameterBox) {
  const DataTrace d = simulate_trace(build_hamiltonian(kReference), low_discrepancy_times(25, 0.0, 20.0), 25, 11);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> om(0.0, 0.3), al(0.0, std::numbers::pi / 2), ep(0.0, 1.0);
  for (int n = 0; n < 20; ++n) {
    // Starts near the edges give the simplex every chance to step out.
    const PolarParams start{om(rng), n % 2 ? al(rng) * 0.05 : std::numbers::pi / 2 - al(rng) * 0.05, ep(rng)};
    const DirectEstimate e = refine_local(d, start);
    EXPECT_GE(e.polar.omega_cap, 0.0);
    EXPECT_GE(e.polar.alpha, 0.0);
    EXPECT_LE(e.polar.alpha, std::numbers::pi / 2);
    EXPECT_GE(e.polar.epsilon, 0.0);
  }
}

TEST(RefineLocal, RejectsStartsOutsideTheBox) {
  const DataTrace d = reference_trace();
  EXPECT_THROW(refine_local(d, {-0.1, 0.5, 0.5}), InvalidParameter);
  EXPECT_THROW(refine_local(d, {1.0, -0.01, 0.5}), InvalidParameter);
  EXPECT_THROW(refine_local(d, {1.0, 1.6, 0.5}), InvalidParameter);
  EXPECT_THROW(refine_local(d, {1.0, 0.5, std::nan("")}), InvalidParameter);
}

TEST(RefineLocal, EvaluationBudgetIsReported) {
  RefineOptions opts;
  opts.max_evaluations = 10;
  const DirectEstimate e = refine_local(reference_trace(), {1.0, 0.5, 0.2}, opts);
  EXPECT_FALSE(e.converged);
  EXPECT_LE(e.evaluations, 12);
}

TEST(EstimateDirect, RecoversNoiselessTruth) {
  const PolarParams truth = reference_polar();
  DirectFitOptions opts;
  opts.refine.x_tolerance = 1e-9;
  const DirectFit fit = estimate_direct(reference_trace(), opts);
  EXPECT_EQ(fit.grid.values.size(), 32u * 32u * 32u);
  EXPECT_LT(max_abs_diff(fit.estimate.polar, truth), 1e-6);
  const Grid3& g = fit.grid;
  EXPECT_GE(fit.estimate.log_likelihood, g.at(g.argmax[0], g.argmax[1], g.argmax[2]));
}

TEST(EstimateDirect, NeverWorseThanTheGrid) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const DataTrace d = simulate_trace(build_hamiltonian(kReference), low_discrepancy_times(50, 0.0, 20.0), 50, seed);
    DirectFitOptions opts;
    opts.grid = {{0.1, 4.0, 12}, {0.0, std::numbers::pi / 2, 12}, {-1.25, 1.25, 12}};
    const DirectFit fit = estimate_direct(d, opts);
    const Grid3& g = fit.grid;
    EXPECT_GE(fit.estimate.log_likelihood, g.at(g.argmax[0], g.argmax[1], g.argmax[2]));
    EXPECT_NEAR(fit.estimate.log_likelihood, direct_log_likelihood(fit.estimate.polar, d), 1e-9);
  }
}

TEST(NelderMead, MinimizesRosenbrock) {
  auto rosen = [](std::span<const double> x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  const std::vector<double> steps{0.5, 0.5}, lo{-5, -5}, hi{5, 5};
  const NelderMeadResult r = nelder_mead_minimize(rosen, {-1.2, 1.0}, steps, lo, hi, {1e-10, 10000});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
}

TEST(NelderMead, ConstrainedOptimumSitsOnTheBound) {
  auto f = [](std::span<const double> x) { return (x[0] + 1) * (x[0] + 1); };
  const std::vector<double> steps{0.3}, lo{0.0}, hi{10.0};
  const NelderMeadResult r = nelder_mead_minimize(f, {2.0}, steps, lo, hi);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 0.0, 1e-6);
}

TEST(NelderMead, DimensionMismatchThrows) {
  auto f = [](std::span<const double>) { return 0.0; };
  const std::vector<double> one{1.0}, two{1.0, 1.0};
  EXPECT_THROW(nelder_mead_minimize(f, {0.0, 0.0}, one, two, two), InvalidParameter);
}

}  // namespace
}  // namespace qchar
