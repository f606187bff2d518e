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

#include "qchar/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>

#include "qchar/errors.hpp"

namespace qchar {

namespace {

void check_level(int level) {
  if (level < 1 || level > 3) {
    throw InvalidParameter("level index must be 1, 2 or 3, got " + std::to_string(level));
  }
}

}  // namespace

Hamiltonian3 build_hamiltonian(const CouplingParams& p) {
  for (double v : {p.d1, p.d2, p.d3, p.delta}) {
    if (!std::isfinite(v)) throw InvalidParameter("Hamiltonian parameters must be finite");
  }
  if (p.d1 < 0.0 || p.d2 < 0.0 || p.d3 < 0.0) {
    throw InvalidParameter("couplings d1, d2, d3 must be non-negative");
  }
  Eigen::Matrix3d m;
  m << 0.0, p.d1, p.d3,
       p.d1, 0.0, p.d2,
       p.d3, p.d2, p.delta;
  return Hamiltonian3(m);
}

SpectralDecomposition spectral_decompose(const Hamiltonian3& h) {
  // The iterative (tridiagonal QR) path; computeDirect() loses ~1e-8 near
  // degenerate spectra, which is not good enough for the reconstruction.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(h.matrix());
  const Eigen::Vector3d& vals = solver.eigenvalues();
  const Eigen::Matrix3d& vecs = solver.eigenvectors();

  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals(a) < vals(b); });

  SpectralDecomposition sd;
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    sd.eigenvalues[k] = vals(order[k]);
    sd.eigenvectors.col(k) = vecs.col(order[k]);
    sd.overlaps[k] = vecs(0, order[k]) * vecs(0, order[k]);
    total += sd.overlaps[k];
  }
  for (double& c : sd.overlaps) c /= total;
  return sd;
}

double transition_probability(const SpectralDecomposition& sd, int k, int l, double t) {
  check_level(k);
  check_level(l);
  std::complex<double> amp{0.0, 0.0};
  for (int j = 0; j < 3; ++j) {
    const double w = sd.eigenvectors(k - 1, j) * sd.eigenvectors(l - 1, j);
    amp += w * std::polar(1.0, -sd.eigenvalues[j] * t);
  }
  return std::clamp(std::norm(amp), 0.0, 1.0);
}

double transition_probability(const Hamiltonian3& h, int k, int l, double t) {
  check_level(k);
  check_level(l);
  return transition_probability(spectral_decompose(h), k, l, t);
}

double ground_population(const SpectralDecomposition& sd, double t) {
  const auto& c = sd.overlaps;
  const auto& lam = sd.eigenvalues;
  const double p = c[0] * c[0] + c[1] * c[1] + c[2] * c[2] +
                   2.0 * c[0] * c[1] * std::cos((lam[1] - lam[0]) * t) +
                   2.0 * c[1] * c[2] * std::cos((lam[2] - lam[1]) * t) +
                   2.0 * c[0] * c[2] * std::cos((lam[2] - lam[0]) * t);
  return std::clamp(p, 0.0, 1.0);
}

BohrFrequencies bohr_frequencies(const SpectralDecomposition& sd) {
  const auto& lam = sd.eigenvalues;
  return {(lam[2] - lam[0]) / 2.0, (lam[2] - 2.0 * lam[1] + lam[0]) / 2.0};
}

CouplingParams fold_detuning(const CouplingParams& c) {
  CouplingParams out = c;
  out.delta = std::abs(c.delta);
  return out;
}

CouplingParams polar_to_couplings(const PolarParams& p) {
  if (!(p.omega_cap >= 0.0)) throw InvalidParameter("Omega must be non-negative");
  if (!(p.alpha >= 0.0 && p.alpha <= std::numbers::pi / 2.0)) {
    throw InvalidParameter("alpha must lie in [0, pi/2]");
  }
  if (!std::isfinite(p.epsilon) || !std::isfinite(p.omega_cap)) {
    throw InvalidParameter("polar parameters must be finite");
  }
  return {p.omega_cap * std::cos(p.alpha), p.omega_cap * std::sin(p.alpha), 0.0, 4.0 * p.epsilon};
}

PolarParams couplings_to_polar(const CouplingParams& c) {
  if (c.d3 != 0.0) throw UnsupportedModel("polar form requires d3 == 0");
  if (c.d1 < 0.0 || c.d2 < 0.0) throw InvalidParameter("couplings must be non-negative");
  return {std::hypot(c.d1, c.d2), std::atan2(c.d2, c.d1), c.delta / 4.0};
}

}  // namespace qchar
