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
#include "unde/prior.hpp"

#include <cmath>
#include <limits>

#include "unde/common.hpp"

namespace unde {

void PriorParams::validate() const {
  require(p >= 1.0 && p < q, "prior requires 1 <= p < q");
  require(q == 2.0, "prior requires q = 2");
  require(T > 0.0, "prior edge threshold T must be positive");
  require(sigma_g > 0.0, "sigma_g must be positive");
  require(sigma_e > 0.0, "sigma_e must be positive");
  require(c_min > 0.0 && c_max >= c_min, "spatial scales need 0 < c_min <= c_max");
  require(a > 0.0, "spatial exponent a must be positive");
  require(gamma >= 0.0, "gamma must be nonnegative");
}

double qggmrf_rho(double delta, double sigma, const PriorParams& prm) {
  const double d = std::abs(delta);
  if (d == 0.0) return 0.0;
  const double u = std::pow(d / (prm.T * sigma), prm.q - prm.p);
  return std::pow(d, prm.p) / (prm.p * std::pow(sigma, prm.p)) * (u / (1.0 + u));
}

double qggmrf_surrogate_coeff(double delta, double sigma, const PriorParams& prm) {
  const double d = std::abs(delta);
  const double ts = prm.T * sigma;
  const double u = d == 0.0 ? 0.0 : std::pow(d / ts, prm.q - prm.p);
  const double head = prm.q == 2.0 ? 1.0 : std::pow(d, prm.q - 2.0);
  return head / std::pow(ts, prm.q - prm.p) * (prm.q / prm.p + u) /
         (2.0 * std::pow(sigma, prm.p) * (1.0 + u) * (1.0 + u));
}

double spatial_scale(double depth, double max_depth, const PriorParams& prm) {
  require(max_depth > 0.0, "max_depth must be positive");
  require(depth >= 0.0 && depth <= max_depth * (1.0 + 1e-12), "depth outside [0, max_depth]");
  return prm.c_min + (prm.c_max - prm.c_min) * std::pow(std::min(depth / max_depth, 1.0), prm.a);
}

NeighborStencil::NeighborStencil(const ImageGrid& grid, double gamma) {
  require(gamma >= 0.0, "gamma must be nonnegative");
  const double norm = 4.0 * gamma + 12.0;
  const double axial = 2.0 / norm;
  const double diagonal = 1.0 / norm;
  const double across = 2.0 * gamma / norm;

  const long C = static_cast<long>(grid.n_cols);
  const long R = static_cast<long>(grid.n_rows);
  const long S = static_cast<long>(grid.n_slices);
  offsets_.reserve(grid.size() + 1);
  offsets_.push_back(0);
  for (long s = 0; s < S; ++s) {
    for (long c = 0; c < C; ++c) {
      for (long r = 0; r < R; ++r) {
        for (long dc = -1; dc <= 1; ++dc) {
          for (long dr = -1; dr <= 1; ++dr) {
            if (dc == 0 && dr == 0) continue;
            const long cc = c + dc;
            const long rr = r + dr;
            if (cc < 0 || cc >= C || rr < 0 || rr >= R) continue;
            entries_.push_back({grid.index(cc, rr, s), (dc == 0 || dr == 0) ? axial : diagonal});
          }
        }
        if (gamma > 0.0) {
          if (s > 0) entries_.push_back({grid.index(c, r, s - 1), across});
          if (s + 1 < S) entries_.push_back({grid.index(c, r, s + 1), across});
        }
        offsets_.push_back(entries_.size());
      }
    }
  }
}

NeighborStencil NeighborStencil::isolated(std::size_t n) {
  NeighborStencil st;
  st.offsets_.assign(n + 1, 0);
  return st;
}

PriorModel::PriorModel(const ImageGrid& grid, const PriorParams& params, bool gibbs_enabled)
    : params_(params), scales_(grid.size()), inv_sigma_e_(grid.size()) {
  params_.validate();
  stencil_ = gibbs_enabled ? NeighborStencil(grid, params_.gamma) : NeighborStencil::isolated(grid.size());

  const double max_depth = grid.max_depth();
  for (std::size_t s = 0; s < grid.size(); ++s) {
    scales_[s] = max_depth > 0.0 ? spatial_scale(grid.depth(s), max_depth, params_) : params_.c_min;
    inv_sigma_e_[s] = std::isinf(params_.sigma_e) ? 0.0 : 1.0 / (params_.sigma_e * scales_[s]);
  }
}

double PriorModel::gibbs_cost(std::span<const double> x) const {
  double acc = 0.0;
  for (std::size_t s = 0; s < x.size(); ++s)
    for (const auto& [r, b] : stencil_.neighbors(s))
      if (r > s) acc += b * qggmrf_rho(x[s] - x[r], sigma_g(s, r), params_);
  return acc;
}

double PriorModel::exponential_cost(std::span<const double> x) const {
  double acc = 0.0;
  for (std::size_t s = 0; s < x.size(); ++s) acc += x[s] * inv_sigma_e_[s];
  return acc;
}

double PriorModel::cost(std::span<const double> x) const {
  require(x.size() == scales_.size(), "prior cost: image size mismatch");
  for (double v : x)
    if (!(v >= 0.0)) fail(ErrorCode::InvalidArgument, "prior cost: negative or non-finite pixel");
  return gibbs_cost(x) + exponential_cost(x);
}

}  // namespace unde
