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

#include "qchar/adaptive.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qchar/errors.hpp"
#include "qchar/io.hpp"
#include "qchar/seed.hpp"
#include "test_util.hpp"

namespace qchar {
namespace {

using testing::kReference;

// L(ω, Δω) = -(cw (ω - 1)² + cd (Δω - 0.1)²) on a grid centred on the peak.
LikelihoodSurface quadratic_surface(double cw, double cd) {
  LikelihoodSurface s;
  s.omega_axis = linear_axis(0.9, 1.1, 21);
  s.delta_axis = linear_axis(0.0, 0.2, 21);
  for (double w : s.omega_axis) {
    for (double dw : s.delta_axis) s.values.push_back(-(cw * (w - 1.0) * (w - 1.0) + cd * (dw - 0.1) * (dw - 0.1)));
  }
  return s;
}

TEST(Uncertainty, IsotropicPeakHasUnitAnisotropy) {
  const UncertaintyMetrics u = uncertainty_from_surface(quadratic_surface(50.0, 50.0));
  EXPECT_FALSE(u.flat);
  EXPECT_NEAR(u.anisotropy, 1.0, 1e-6);
  EXPECT_NEAR(u.curvature_eigenvalues[0], 100.0, 1e-6);
  EXPECT_NEAR(u.sigma_omega, u.sigma_delta_omega, 1e-9);
}

TEST(Uncertainty, SqueezedPeakRatio) {
  const UncertaintyMetrics u = uncertainty_from_surface(quadratic_surface(1000.0, 10.0));
  EXPECT_NEAR(u.anisotropy, 100.0, 1.0);
  // σ² = 1 / (ln10 · 2c) per axis.
  EXPECT_NEAR(u.sigma_omega, 1.0 / std::sqrt(std::numbers::ln10 * 2000.0), 1e-9);
  EXPECT_NEAR(u.sigma_delta_omega / u.sigma_omega, 10.0, 1e-6);
}

TEST(Uncertainty, FlatSurfaceIsMarkedInfinite) {
  const UncertaintyMetrics u = uncertainty_from_surface(quadratic_surface(0.0, 0.0));
  EXPECT_TRUE(u.flat);
  EXPECT_TRUE(std::isinf(u.sigma_omega));
  EXPECT_TRUE(std::isinf(u.sigma_delta_omega));
  EXPECT_TRUE(std::isinf(u.anisotropy));
}

TEST(Uncertainty, SaddleIsMarkedFlat) {
  const UncertaintyMetrics u = uncertainty_from_surface(quadratic_surface(10.0, -10.0));
  EXPECT_TRUE(u.flat);
}

std::vector<SignalParams> some_models() {
  return {{{0.5, 0.2, 0.2, 0.1}, 1.9, 0.1},
          {{0.5, 0.2, 0.2, 0.1}, 1.9, 0.12},
          {{0.4, 0.3, 0.2, 0.1}, 2.0, 0.1},
          {{0.6, 0.1, 0.2, 0.1}, 1.8, 0.08}};
}

TEST(Ensemble, WeightsAreNormalizedAndSorted) {
  const std::vector<double> ll{-1.0, 0.0, -0.5, -3.0};
  const ModelEnsemble e = make_ensemble(some_models(), ll);
  double total = 0.0;
  for (std::size_t i = 0; i < e.members.size(); ++i) {
    total += e.members[i].weight;
    EXPECT_GE(e.members[i].weight, 0.0);
    if (i > 0) {
      EXPECT_GE(e.members[i - 1].weight, e.members[i].weight);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_EQ(e.members.front().model.delta_omega, 0.12);
  // Weights are ∝ 10^L.
  EXPECT_NEAR(e.members[0].weight / e.members[1].weight, std::pow(10.0, 0.5), 1e-12);
}

TEST(Ensemble, ShiftInvariance) {
  const std::vector<double> ll{-1.0, 0.0, -0.5, -3.0};
  const ModelEnsemble a = make_ensemble(some_models(), ll);
  for (double shift : {-700.0, 123.4, 1e4}) {
    std::vector<double> shifted = ll;
    for (double& v : shifted) v += shift;
    const ModelEnsemble b = make_ensemble(some_models(), shifted);
    ASSERT_EQ(a.members.size(), b.members.size());
    for (std::size_t i = 0; i < a.members.size(); ++i) {
      EXPECT_NEAR(a.members[i].weight, b.members[i].weight, 1e-14);
      EXPECT_EQ(a.members[i].model.omega, b.members[i].model.omega);
    }
  }
}

TEST(Ensemble, LengthMismatchThrows) {
  const std::vector<double> ll{0.0};
  EXPECT_THROW(make_ensemble(some_models(), ll), InvalidParameter);
}

TEST(Ensemble, FromSurfaceKeepsCellsNearThePeak) {
  const DataTrace d = testing::noiseless_trace(kReference, low_discrepancy_times(100, 0.0, 20.0));
  const SpectralFit fit = estimate_spectral(d);
  EnsembleOptions opts;
  const ModelEnsemble e = ensemble_from_surface(fit.surface, d, opts);
  ASSERT_FALSE(e.members.empty());
  EXPECT_LE(e.members.size(), opts.max_members);
  const double top = e.members.front().log_likelihood;
  for (const auto& m : e.members) {
    EXPECT_GE(m.log_likelihood, top - opts.decades);
    // Amplitudes are the least-squares fit at that cell.
    const OrthoProjection p = orthonormal_projection(design_matrix(m.model.omega, m.model.delta_omega, d.times()), d);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(m.model.a[k], p.a(k), 1e-12);
  }
}

TEST(VarianceTimes, SingleModelIsDegenerate) {
  const std::vector<SignalParams> one{some_models()[0]};
  const std::vector<double> ll{0.0};
  const auto cands = uniform_times(11, 0.0, 10.0);
  const TimeSelection sel = ensemble_variance_times(make_ensemble(one, ll), cands, 3);
  EXPECT_TRUE(sel.degenerate);
  ASSERT_EQ(sel.times.size(), 3u);
  for (double v : sel.variances) EXPECT_EQ(v, 0.0);
  // All tie, so the earliest candidates win.
  EXPECT_EQ(sel.times, (std::vector<double>{0.0, 1.0, 2.0}));
}

TEST(VarianceTimes, TwoMembersPickTheLargestDisagreement) {
  const SignalParams m1{{0.5, 0.2, 0.2, 0.1}, 1.9, 0.10};
  const SignalParams m2{{0.5, 0.2, 0.2, 0.1}, 1.9, 0.13};
  const std::vector<SignalParams> models{m1, m2};
  const std::vector<double> ll{0.0, 0.0};
  const auto cands = uniform_times(401, 0.0, 20.0);
  const TimeSelection sel = ensemble_variance_times(make_ensemble(models, ll), cands, 5);
  EXPECT_FALSE(sel.degenerate);
  auto diff = [&](double t) { return oracle::eval({m1.a, m1.omega, m1.delta_omega}, t) -
                                     oracle::eval({m2.a, m2.omega, m2.delta_omega}, t); };
  double best = 0.0;
  for (double t : cands) best = std::max(best, std::abs(diff(t)));
  EXPECT_NEAR(std::abs(diff(sel.times[0])), best, 1e-12);
  for (std::size_t i = 0; i < sel.times.size(); ++i) {
    EXPECT_NEAR(sel.variances[i], 0.25 * diff(sel.times[i]) * diff(sel.times[i]), 1e-14);
    if (i > 0) {
      EXPECT_GE(sel.variances[i - 1], sel.variances[i]);
    }
  }
}

TEST(VarianceTimes, AskingForTooManyIsFlagged) {
  const std::vector<double> ll{0.0, -0.3, -1.0, -2.0};
  const auto cands = uniform_times(4, 0.0, 3.0);
  const TimeSelection sel = ensemble_variance_times(make_ensemble(some_models(), ll), cands, 10);
  EXPECT_TRUE(sel.truncated);
  EXPECT_EQ(sel.times.size(), 4u);
}

TEST(VarianceTimes, EmptyInputsThrow) {
  const std::vector<double> ll{0.0, 0.0, 0.0, 0.0};
  const ModelEnsemble e = make_ensemble(some_models(), ll);
  EXPECT_THROW(ensemble_variance_times(e, {}, 1), InvalidParameter);
  const std::vector<double> c{1.0};
  EXPECT_THROW(ensemble_variance_times(ModelEnsemble{}, c, 1), InvalidParameter);
}

TEST(HalfPeriod, WorkedArithmetic) {
  const auto t = halfperiod_times(std::numbers::pi, 3, 0.0);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_DOUBLE_EQ(t[0], 0.0);
  EXPECT_DOUBLE_EQ(t[1], 1.0);
  EXPECT_DOUBLE_EQ(t[2], 2.0);
}

TEST(HalfPeriod, SpacingAtTheReportedFrequency) {
  const auto t = halfperiod_times(1.9468, 4, 0.0);
  EXPECT_NEAR(t[1] - t[0], 1.6138, 1e-4);
  EXPECT_NEAR(t[3] - t[2], std::numbers::pi / 1.9468, 1e-12);
}

TEST(HalfPeriod, StartIsRoundedUpToAMultiple) {
  const auto t = halfperiod_times(std::numbers::pi, 2, 1.5);
  EXPECT_DOUBLE_EQ(t[0], 2.0);
  EXPECT_DOUBLE_EQ(halfperiod_times(std::numbers::pi, 1, 1.0)[0], 1.0);
}

TEST(HalfPeriod, EdgeCases) {
  EXPECT_TRUE(halfperiod_times(2.0, 0, 0.0).empty());
  EXPECT_THROW(halfperiod_times(0.0, 3, 0.0), InvalidParameter);
  EXPECT_THROW(halfperiod_times(-1.0, 3, 0.0), InvalidParameter);
}

AdaptiveConfig small_config() {
  AdaptiveConfig c;
  c.grid.omega_count = 60;
  c.grid.delta_count = 60;
  c.direct.grid = {{0.1, 4.0, 10}, {0.0, std::numbers::pi / 2, 10}, {-1.25, 1.25, 10}};
  c.direct.starts = 2;
  return c;
}

TEST(Adaptive, ZeroRoundsIsTheOneShotPipeline) {
  AdaptiveConfig cfg = small_config();
  cfg.rounds = 0;
  cfg.direct_mle = false;
  const Hamiltonian3 h = build_hamiltonian(kReference);
  const AdaptiveReport rep = adaptive_characterize(simulated_source(h, 7), cfg, kReference);

  const auto times = low_discrepancy_times(100, 0.0, 20.0);
  const DataTrace d = simulate_trace(h, times, 100, derive_seed(7, {0}));
  const SpectralFit fit = estimate_spectral(d, cfg.grid);
  ASSERT_EQ(rep.rounds.size(), 1u);
  EXPECT_EQ(rep.final_trace, d);
  ASSERT_TRUE(rep.final_estimate);
  EXPECT_EQ(rep.final_estimate->omega, fit.estimate.omega);
  EXPECT_EQ(rep.final_estimate->delta_omega, fit.estimate.delta_omega);
  EXPECT_EQ(rep.final_estimate->a, fit.estimate.a);
  const ReconstructionResult r = reconstruct_hamiltonian(fit.estimate);
  ASSERT_TRUE(rep.final_two_step_error);
  EXPECT_EQ(*rep.final_two_step_error, *rep.preliminary_error);
  EXPECT_EQ(rep.final_reconstruction->validity, r.validity);
  EXPECT_FALSE(rep.final_direct);
}

TEST(Adaptive, BudgetAccounting) {
  for (auto strategy : {RefineStrategy::kHalfPeriod, RefineStrategy::kEnsembleVariance}) {
    AdaptiveConfig cfg = small_config();
    cfg.rounds = 2;
    cfg.strategy = strategy;
    cfg.direct_mle = false;
    const AdaptiveReport rep = adaptive_characterize(simulated_source(build_hamiltonian(kReference), 3), cfg);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < rep.rounds.size(); ++i) {
      EXPECT_EQ(rep.rounds[i].round, static_cast<int>(i));
      EXPECT_TRUE(rep.rounds[i].error.empty()) << rep.rounds[i].error;
      total += rep.rounds[i].round_shots;
      EXPECT_EQ(rep.rounds[i].cumulative_shots, total);
      if (i > 0) {
        EXPECT_EQ(rep.rounds[i].round_shots,
                  cfg.refine_shots * static_cast<std::int64_t>(rep.rounds[i].chosen_times.size()));
        EXPECT_FALSE(rep.rounds[i].chosen_times.empty());
      }
    }
    EXPECT_EQ(rep.rounds.size(), 3u);
    EXPECT_EQ(rep.final_trace.total_shots(), total);
    EXPECT_EQ(rep.rounds[0].round_shots, 100 * 100);
  }
}

TEST(Adaptive, HalfPeriodRoundFillsTheWindow) {
  AdaptiveConfig cfg = small_config();
  cfg.direct_mle = false;
  const AdaptiveReport rep = adaptive_characterize(simulated_source(build_hamiltonian(kReference), 5), cfg);
  ASSERT_EQ(rep.rounds.size(), 2u);
  const double omega = rep.rounds[0].estimate->omega;
  const auto& t = rep.rounds[1].chosen_times;
  ASSERT_FALSE(t.empty());
  EXPECT_NEAR(t.front(), std::numbers::pi / omega, 1e-12);
  EXPECT_LE(t.back(), 20.0);
  EXPECT_GT(t.back() + std::numbers::pi / omega, 20.0);
}

TEST(Adaptive, Deterministic) {
  AdaptiveConfig cfg = small_config();
  cfg.strategy = RefineStrategy::kEnsembleVariance;
  const Hamiltonian3 h = build_hamiltonian(kReference);
  const auto a = to_json(adaptive_characterize(simulated_source(h, 11), cfg, kReference)).dump();
  const auto b = to_json(adaptive_characterize(simulated_source(h, 11), cfg, kReference)).dump();
  EXPECT_EQ(a, b);
}

TEST(Adaptive, FailedRoundIsRecordedAndTheLoopContinues) {
  AdaptiveConfig cfg = small_config();
  cfg.rounds = 2;
  cfg.direct_mle = false;
  const MeasurementSource inner = simulated_source(build_hamiltonian(kReference), 2);
  const MeasurementSource flaky = [&](std::span<const double> t, std::int64_t shots, std::uint64_t stream) {
    if (stream == 1) throw std::runtime_error("instrument offline");
    return inner(t, shots, stream);
  };
  const AdaptiveReport rep = adaptive_characterize(flaky, cfg);
  ASSERT_EQ(rep.rounds.size(), 3u);
  EXPECT_EQ(rep.rounds[1].error, "instrument offline");
  EXPECT_EQ(rep.rounds[1].round_shots, 0);
  EXPECT_TRUE(rep.rounds[2].error.empty());
  EXPECT_GT(rep.rounds[2].round_shots, 0);
  EXPECT_EQ(rep.final_trace.total_shots(), rep.rounds[0].round_shots + rep.rounds[2].round_shots);
}

TEST(Adaptive, UncertaintyTargetStopsEarly) {
  AdaptiveConfig cfg = small_config();
  cfg.rounds = 3;
  cfg.direct_mle = false;
  cfg.sigma_delta_omega_target = 1e9;
  const AdaptiveReport rep = adaptive_characterize(simulated_source(build_hamiltonian(kReference), 2), cfg);
  EXPECT_EQ(rep.rounds.size(), 1u);
  EXPECT_EQ(rep.stop_reason, "uncertainty target reached");
}

TEST(Adaptive, NegativeRoundsRejected) {
  AdaptiveConfig cfg = small_config();
  cfg.rounds = -1;
  EXPECT_THROW(adaptive_characterize(simulated_source(build_hamiltonian(kReference), 2), cfg), InvalidParameter);
}

}  // namespace
}  // namespace qchar
