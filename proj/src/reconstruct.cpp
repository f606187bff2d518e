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

#include <algorithm>
#include <cmath>

#include "qchar/errors.hpp"

namespace qchar {

std::string_view to_string(UnphysicalReason reason) {
  switch (reason) {
    case UnphysicalReason::kNone:
      return "none";
    case UnphysicalReason::kMissingLine:
      return "missing-line";
    case UnphysicalReason::kNegativeRadicand:
      return "negative-radicand";
  }
  return "unknown";
}

OverlapFit amplitudes_to_overlaps(const SignalParams& sp) {
  OverlapFit fit;
  const double a1 = sp.a[1];
  const double a2 = sp.a[2];
  const double a3 = sp.a[3];
  if (!(a1 > 0.0 && a2 > 0.0 && a3 > 0.0)) {
    fit.failure = UnphysicalReason::kMissingLine;
    return fit;
  }
  const std::array<double, 3> raw{std::sqrt(a1 * a3 / (2.0 * a2)), std::sqrt(a1 * a2 / (2.0 * a3)),
                                  std::sqrt(a2 * a3 / (2.0 * a1))};
  const double total = raw[0] + raw[1] + raw[2];
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    fit.c[k] = raw[k] / total;
    sum_sq += fit.c[k] * fit.c[k];
  }
  fit.residual = std::abs(sp.a[0] - sum_sq) + std::abs(1.0 - total);
  return fit;
}

ReconstructionResult reconstruct_hamiltonian(const SignalParams& sp) {
  ReconstructionResult r;
  const OverlapFit ov = amplitudes_to_overlaps(sp);
  r.overlaps = ov.c;
  r.residual = ov.residual;
  if (ov.failure != UnphysicalReason::kNone) {
    r.reason = ov.failure;
    return r;
  }
  const auto& c = ov.c;
  const double gap12 = sp.omega - sp.delta_omega;
  const double gap23 = sp.omega + sp.delta_omega;
  // Σ c_k λ_k = 0 with λ = (μ, μ + gap12, μ + gap12 + gap23) and Σc = 1.
  const double mu = -(c[1] * gap12 + c[2] * (gap12 + gap23));
  const std::array<double, 3> lam{mu, mu + gap12, mu + gap12 + gap23};
  r.eigenvalues = lam;

  const double delta = lam[0] + lam[1] + lam[2];
  const double d1_sq = c[0] * lam[0] * lam[0] + c[1] * lam[1] * lam[1] + c[2] * lam[2] * lam[2];
  const double e2 = lam[0] * lam[1] + lam[0] * lam[2] + lam[1] * lam[2];
  const double d2_sq = -e2 - d1_sq;

  bool negative = false;
  auto root = [&](double radicand) {
    if (radicand < -kRadicandTolerance) negative = true;
    return std::sqrt(std::max(radicand, 0.0));
  };
  const CouplingParams h{root(d1_sq), root(d2_sq), 0.0, delta};
  r.clamped = h;
  if (negative) {
    r.reason = UnphysicalReason::kNegativeRadicand;
    return r;
  }
  r.hamiltonian = h;
  r.validity = Validity::kPhysical;
  return r;
}

ReconstructionResult reconstruct_hamiltonian(const Estimate& est) {
  return reconstruct_hamiltonian(est.signal());
}

double relative_error(const CouplingParams& estimate, const CouplingParams& truth) {
  auto frob = [](double d1, double d2, double d3, double delta) {
    return std::sqrt(2.0 * (d1 * d1 + d2 * d2 + d3 * d3) + delta * delta);
  };
  const double norm = frob(truth.d1, truth.d2, truth.d3, truth.delta);
  if (norm == 0.0) throw InvalidParameter("relative error undefined for a zero Hamiltonian");
  return frob(estimate.d1 - truth.d1, estimate.d2 - truth.d2, estimate.d3 - truth.d3,
              estimate.delta - truth.delta) /
         norm;
}

}  // namespace qchar
