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

#include "unde/geometry.hpp"

#include <string>

namespace unde {

ScanGeometry::ScanGeometry(std::vector<Vec3> transducers) : transducers_(std::move(transducers)) {
  require(transducers_.size() >= 2, "scan geometry needs at least two transducers");
  const std::size_t n = transducers_.size();
  pairs_.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs_.emplace_back(i, j);
}

ScanGeometry ScanGeometry::linear_array(std::size_t n, double spacing) {
  require(spacing >= 0.0, "transducer spacing must be nonnegative");
  std::vector<Vec3> pos(n);
  const double half = 0.5 * static_cast<double>(n - 1) * spacing;
  for (std::size_t i = 0; i < n; ++i) pos[i] = {static_cast<double>(i) * spacing - half, 0.0, 0.0};
  return ScanGeometry(std::move(pos));
}

std::size_t ScanGeometry::pair_index(std::size_t i, std::size_t j) const {
  const std::size_t n = transducers_.size();
  if (i >= n || j >= n)
    fail(ErrorCode::OutOfRange, "transducer id out of range: " + std::to_string(i) + "," + std::to_string(j));
  if (i == j) fail(ErrorCode::InvalidArgument, "a pair needs two distinct transducers");
  if (i > j) std::swap(i, j);
  // Pairs (a, *) for a < i occupy sum_{a<i} (n-1-a) = i*n - i*(i+1)/2 slots.
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

double ScanGeometry::travel_time(const Vec3& nu, std::size_t k, double c) const {
  const auto& [i, j] = pairs_[k];
  return (norm(nu - transducers_[i]) + norm(nu - transducers_[j])) / c;
}

double ScanGeometry::direct_time(std::size_t k, double c) const {
  const auto& [i, j] = pairs_[k];
  return norm(transducers_[i] - transducers_[j]) / c;
}

ImageGrid ImageGrid::centered(std::size_t cols, std::size_t rows, double pitch, std::size_t slices) {
  require(cols >= 1 && rows >= 1 && slices >= 1, "grid dimensions must be positive");
  require(pitch > 0.0, "pixel pitch must be positive");
  ImageGrid g;
  g.n_cols = cols;
  g.n_rows = rows;
  g.n_slices = slices;
  g.pitch = pitch;
  g.origin = {-0.5 * static_cast<double>(cols - 1) * pitch, 0.0, 0.0};
  return g;
}

}  // namespace unde
