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

// Three-level model of a qubit with a leaky third level.
//
// In the rotating frame the effective Hamiltonian is
//
//        | 0   d1  d3 |
//    H = | d1  0   d2 |
//        | d3  d2  δ  |
//
// with real, non-negative couplings. Everything here works in units where
// ħ = 1, so energies and angular frequencies share the same unit.

#pragma once

#include <array>

#include <Eigen/Dense>

namespace qchar {

struct CouplingParams {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double delta = 0.0;

  friend bool operator==(const CouplingParams&, const CouplingParams&) = default;
};

/// (Ω, α, ε) with d1 = Ω cos α, d2 = Ω sin α, δ = 4ε and d3 = 0.
struct PolarParams {
  double omega_cap = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;

  friend bool operator==(const PolarParams&, const PolarParams&) = default;
};

class Hamiltonian3 {
 public:
  Hamiltonian3() : m_(Eigen::Matrix3d::Zero()) {}

  const Eigen::Matrix3d& matrix() const noexcept { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }
  CouplingParams params() const noexcept { return {m_(0, 1), m_(1, 2), m_(0, 2), m_(2, 2)}; }

 private:
  friend Hamiltonian3 build_hamiltonian(const CouplingParams&);
  explicit Hamiltonian3(const Eigen::Matrix3d& m) : m_(m) {}
  Eigen::Matrix3d m_;
};

struct SpectralDecomposition {
  std::array<double, 3> eigenvalues{};  // ascending
  std::array<double, 3> overlaps{};     // |<1|E_k>|^2
  Eigen::Matrix3d eigenvectors = Eigen::Matrix3d::Identity();  // column k pairs with eigenvalues[k]
};

struct BohrFrequencies {
  double omega = 0.0;        // (λ3 - λ1) / 2
  double delta_omega = 0.0;  // (λ3 - 2λ2 + λ1) / 2, signed
};

/// Throws InvalidParameter for negative or non-finite couplings.
Hamiltonian3 build_hamiltonian(const CouplingParams& params);

/// Symmetric eigensolve with ascending eigenvalues; equal eigenvalues keep
/// the solver's original column order.
SpectralDecomposition spectral_decompose(const Hamiltonian3& h);

/// p_kl(t) = |<k| exp(-iHt) |l>|^2 with 1-based level indices, evaluated
/// from the eigenpairs.
double transition_probability(const Hamiltonian3& h, int k, int l, double t);
double transition_probability(const SpectralDecomposition& sd, int k, int l, double t);

/// Ground-state survival p11(t), the only trace observable in this setting.
double ground_population(const SpectralDecomposition& sd, double t);

BohrFrequencies bohr_frequencies(const SpectralDecomposition& sd);

/// δ -> |δ|. H(d1, d2, 0, δ) and H(d1, d2, 0, -δ) give identical p11(t)
/// (the spectrum is negated, overlaps are unchanged), so estimators built on
/// the ground-state trace report this representative.
CouplingParams fold_detuning(const CouplingParams& c);

/// Throws InvalidParameter if Ω < 0 or α is outside [0, π/2].
CouplingParams polar_to_couplings(const PolarParams& p);

/// Inverse of polar_to_couplings; requires d3 == 0.
PolarParams couplings_to_polar(const CouplingParams& c);

}  // namespace qchar
