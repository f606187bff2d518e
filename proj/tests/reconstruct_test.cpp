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

#include "qchar/reconstruct.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qchar/errors.hpp"
#include "test_util.hpp"

namespace qchar {
namespace {

using testing::kReference;

struct RandomCase {
  CouplingParams c;
  SignalParams sp;
};

// Random physical Hamiltonians whose overlaps all exceed `min_overlap`.
std::vector<RandomCase> random_cases(int n, std::uint64_t seed, double min_overlap) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.2, 2.0), delta(-2.0, 2.0);
  std::vector<RandomCase> out;
  while (static_cast<int>(out.size()) < n) {
    const CouplingParams c{d(rng), d(rng), 0.0, delta(rng)};
    const auto ov = oracle::overlaps({c.d1, c.d2, c.d3, c.delta});
    if (*std::min_element(ov.begin(), ov.end()) < min_overlap) continue;
    out.push_back({c, signal_from_hamiltonian(build_hamiltonian(c))});
  }
  return out;
}

TEST(AmplitudesToOverlaps, ReferenceRoundedAmplitudes) {
  const OverlapFit f = amplitudes_to_overlaps({{0.5253, 0.4157, 0.0396, 0.0195}, 2.0782, 0.2060});
  EXPECT_EQ(f.failure, UnphysicalReason::kNone);
  EXPECT_NEAR(f.c[0], 0.3199, 5e-4);
  EXPECT_NEAR(f.c[1], 0.6497, 5e-4);
  EXPECT_NEAR(f.c[2], 0.0305, 5e-4);
  EXPECT_LE(f.residual, 1e-3);
}

TEST(AmplitudesToOverlaps, TwoLevelLimitIsMissingLine) {
  const OverlapFit f = amplitudes_to_overlaps({{0.5, 0.0, 0.0, 0.5}, 1.0, 0.0});
  EXPECT_EQ(f.failure, UnphysicalReason::kMissingLine);
  const OverlapFit neg = amplitudes_to_overlaps({{0.5, 0.3, -0.01, 0.2}, 1.0, 0.1});
  EXPECT_EQ(neg.failure, UnphysicalReason::kMissingLine);
}

TEST(AmplitudesToOverlaps, ExactInverseOnRandomHamiltonians) {
  for (const auto& rc : random_cases(100, 31, 1e-3)) {
    const OverlapFit f = amplitudes_to_overlaps(rc.sp);
    const auto ov = oracle::overlaps({rc.c.d1, rc.c.d2, rc.c.d3, rc.c.delta});
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(f.c[k], ov[k], 1e-10);
    EXPECT_LE(f.residual, 1e-10);
  }
}

TEST(ReconstructHamiltonian, ReferenceRoundTrip) {
  const ReconstructionResult r = reconstruct_hamiltonian(signal_from_hamiltonian(build_hamiltonian(kReference)));
  ASSERT_TRUE(r.physical());
  ASSERT_TRUE(r.hamiltonian.has_value());
  EXPECT_NEAR(r.hamiltonian->d1, 1.0, 1e-8);
  EXPECT_NEAR(r.hamiltonian->d2, std::numbers::sqrt2, 1e-8);
  EXPECT_NEAR(r.hamiltonian->delta, 2.0, 1e-8);
  EXPECT_EQ(r.hamiltonian->d3, 0.0);
  EXPECT_EQ(r.reason, UnphysicalReason::kNone);
}

TEST(ReconstructHamiltonian, RoundTripOnRandomHamiltonians) {
  for (const auto& rc : random_cases(100, 32, 1e-3)) {
    const ReconstructionResult r = reconstruct_hamiltonian(rc.sp);
    ASSERT_TRUE(r.physical());
    const CouplingParams& h = *r.hamiltonian;
    EXPECT_LE(oracle::relative_error({h.d1, h.d2, h.d3, h.delta}, {rc.c.d1, rc.c.d2, rc.c.d3, rc.c.delta}), 1e-8);
    // Trace identity holds by construction.
    EXPECT_EQ(h.delta, r.eigenvalues[0] + r.eigenvalues[1] + r.eigenvalues[2]);
  }
}

TEST(ReconstructHamiltonian, CanonicalSplittingGivesTheDetuningTwin) {
  // |Δω| with swapped lines describes H(d1, d2, 0, -δ): same data, mirrored detuning.
  for (const auto& rc : random_cases(50, 33, 1e-3)) {
    const ReconstructionResult r = reconstruct_hamiltonian(canonicalize(rc.sp));
    ASSERT_TRUE(r.physical());
    EXPECT_LE(relative_error(fold_detuning(*r.hamiltonian), fold_detuning(rc.c)), 1e-8);
  }
}

TEST(ReconstructHamiltonian, NoiselessNeverUnphysical) {
  for (const auto& rc : random_cases(300, 34, 1e-6)) EXPECT_TRUE(reconstruct_hamiltonian(rc.sp).physical());
}

TEST(ReconstructHamiltonian, VanishingMiddleLineIsFlagged) {
  SignalParams sp = signal_from_hamiltonian(build_hamiltonian(kReference));
  for (double a2 : {1e-3, 1e-5, 1e-8, 0.0}) {
    sp.a[2] = a2;
    const ReconstructionResult r = reconstruct_hamiltonian(sp);
    const bool flagged = !r.physical() || r.residual > 0.1;
    EXPECT_TRUE(flagged) << "a2 = " << a2;
    if (!r.physical()) {
      EXPECT_FALSE(r.hamiltonian.has_value());
    }
  }
}

TEST(ReconstructHamiltonian, NegativeRadicandIsFlaggedWithClampedValue) {
  // Large splitting with a weak fast line: no Hamiltonian of the model fits.
  const SignalParams sp{{0.5, 0.02, 0.45, 0.03}, 2.0, 0.9};
  const ReconstructionResult r = reconstruct_hamiltonian(sp);
  EXPECT_FALSE(r.physical());
  EXPECT_EQ(r.reason, UnphysicalReason::kNegativeRadicand);
  EXPECT_FALSE(r.hamiltonian.has_value());
  ASSERT_TRUE(r.clamped.has_value());
  EXPECT_GE(r.clamped->d1, 0.0);
  EXPECT_GE(r.clamped->d2, 0.0);
}

TEST(RelativeError, Examples) {
  EXPECT_EQ(relative_error(kReference, kReference), 0.0);
  const CouplingParams twice{2.0, 2 * std::numbers::sqrt2, 0.0, 4.0};
  EXPECT_NEAR(relative_error(twice, kReference), 1.0, 1e-15);
  const CouplingParams a{1.01, 1.4142, 0, 2}, b{1.0, 1.4142, 0, 2};
  EXPECT_NEAR(relative_error(a, b), oracle::relative_error({1.01, 1.4142, 0, 2}, {1.0, 1.4142, 0, 2}), 1e-15);
  EXPECT_NEAR(relative_error(a, b), 0.0044721, 1e-6);
  EXPECT_THROW(relative_error(a, CouplingParams{}), InvalidParameter);
}

TEST(RelativeError, MatchesFrobeniusOracle) {
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const oracle::Couplings x{u(rng), u(rng), u(rng), u(rng) - 1}, y{u(rng), u(rng), u(rng), u(rng) - 1};
    EXPECT_NEAR(relative_error({x.d1, x.d2, x.d3, x.delta}, {y.d1, y.d2, y.d3, y.delta}), oracle::relative_error(x, y),
                1e-14);
  }
}

TEST(UnphysicalReason, Names) {
  EXPECT_EQ(to_string(UnphysicalReason::kNone), "none");
  EXPECT_EQ(to_string(UnphysicalReason::kMissingLine), "missing-line");
  EXPECT_EQ(to_string(UnphysicalReason::kNegativeRadicand), "negative-radicand");
}

}  // namespace
}  // namespace qchar
