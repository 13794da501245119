/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The unde authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef UNDE_PRIOR_HPP
#define UNDE_PRIOR_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "unde/geometry.hpp"

namespace unde {

/// Parameters of the QGGMRF + exponential prior. Scales are in the units of
/// the reflectivity image.
struct PriorParams {
  double p = 1.1;
  double q = 2.0;
  double T = 1.0;
  double sigma_g = 3.0;
  double sigma_e = 15.0;  // +inf disables the exponential term
  double c_min = 1.0;
  double c_max = 10.0;
  double a = 3.0;
  double gamma = 0.0;

  void validate() const;
};

/// QGGMRF potential
///   rho(d) = |d|^p / (p s^p) * u / (1 + u),   u = |d / (T s)|^(q - p).
double qggmrf_rho(double delta, double sigma, const PriorParams& params);

/// rho'(d) / (2 d), the curvature of the symmetric quadratic that majorizes
/// rho at d. Continuous at d = 0 where it equals q / (2 p s^p (T s)^(q-p))
/// for q = 2.
double qggmrf_surrogate_coeff(double delta, double sigma, const PriorParams& params);

/// c = c_min + (c_max - c_min) (depth / max_depth)^a.
double spatial_scale(double depth, double max_depth, const PriorParams& params);

/// Per-pixel neighbor lists with weights b_{s,r}, stored CSR style.
///
/// In-plane: the 8-neighborhood, axial neighbors weighted 2/(4g+12) and
/// diagonal ones 1/(4g+12). Across slices: the two pixels at the same
/// (col, row), each 2g/(4g+12), present only when g > 0. Neighbors outside
/// the grid are dropped without renormalizing.
class NeighborStencil {
 public:
  struct Entry {
    std::size_t index;
    double weight;
  };

  NeighborStencil() = default;
  NeighborStencil(const ImageGrid& grid, double gamma);
  /// n pixels without any neighbors.
  static NeighborStencil isolated(std::size_t n);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const Entry> neighbors(std::size_t s) const {
    return {entries_.data() + offsets_[s], entries_.data() + offsets_[s + 1]};
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

/// Everything the solver needs from the prior for one grid: parameters,
/// stencil and the depth-dependent scales c_s.
class PriorModel {
 public:
  PriorModel(const ImageGrid& grid, const PriorParams& params, bool gibbs_enabled = true);

  const PriorParams& params() const { return params_; }
  const NeighborStencil& stencil() const { return stencil_; }
  double scale(std::size_t s) const { return scales_[s]; }
  double sigma_g(std::size_t s, std::size_t r) const { return params_.sigma_g * std::sqrt(scales_[s] * scales_[r]); }
  /// 1 / sigma_{e,s}; zero when the exponential term is disabled.
  double inv_sigma_e(std::size_t s) const { return inv_sigma_e_[s]; }
  std::size_t size() const { return scales_.size(); }

  /// Gibbs part, each clique {s, r} counted once.
  double gibbs_cost(std::span<const double> x) const;
  double exponential_cost(std::span<const double> x) const;
  /// Full negative log prior (without constants). Throws on negative pixels.
  double cost(std::span<const double> x) const;

 private:
  PriorParams params_;
  NeighborStencil stencil_;
  std::vector<double> scales_;
  std::vector<double> inv_sigma_e_;
};

}  // namespace unde

#endif  // UNDE_PRIOR_HPP
