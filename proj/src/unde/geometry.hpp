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

#ifndef UNDE_GEOMETRY_HPP
#define UNDE_GEOMETRY_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "unde/common.hpp"

namespace unde {

/// Transducer layout of one scan position plus the map from distinct
/// unordered transducer pairs {i, j} to a channel index k in [0, K).
///
/// Pairs are enumerated lexicographically: (0,1), (0,2), ..., (0,n-1),
/// (1,2), ... so the channel order is stable across runs and files.
class ScanGeometry {
 public:
  explicit ScanGeometry(std::vector<Vec3> transducers);

  /// n transducers on the surface line z = 0, centered on x = 0.
  static ScanGeometry linear_array(std::size_t n, double spacing);

  std::size_t n_transducers() const { return transducers_.size(); }
  std::size_t n_pairs() const { return pairs_.size(); }
  const std::vector<Vec3>& transducers() const { return transducers_; }

  /// Channel index of the unordered pair {i, j}. Throws on i == j or bad ids.
  std::size_t pair_index(std::size_t i, std::size_t j) const;
  std::pair<std::size_t, std::size_t> pair(std::size_t k) const { return pairs_.at(k); }

  const Vec3& transmitter(std::size_t k) const { return transducers_[pairs_[k].first]; }
  const Vec3& receiver(std::size_t k) const { return transducers_[pairs_[k].second]; }

  /// Round-trip time r_i -> nu -> r_j at speed c.
  double travel_time(const Vec3& nu, std::size_t k, double c) const;
  /// Straight transmitter-to-receiver time; the direct arrival delay.
  double direct_time(std::size_t k, double c) const;

 private:
  std::vector<Vec3> transducers_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

/// Regular pixel grid of one cross-section (or a stack of slices).
///
/// Pixel order is column-major: top to bottom within a column, columns left
/// to right, slices last. This is the order shared pixels are aligned in when
/// scan positions are stitched.
struct ImageGrid {
  std::size_t n_cols = 0;
  std::size_t n_rows = 0;
  std::size_t n_slices = 1;
  double pitch = 0.01;
  Vec3 origin{};  // center of pixel (col 0, row 0, slice 0)

  /// Grid whose columns are centered laterally on x = 0 and whose first row
  /// lies on the transducer surface.
  static ImageGrid centered(std::size_t cols, std::size_t rows, double pitch, std::size_t slices = 1);

  std::size_t pixels_per_slice() const { return n_cols * n_rows; }
  std::size_t size() const { return n_cols * n_rows * n_slices; }

  std::size_t index(std::size_t col, std::size_t row, std::size_t slice = 0) const {
    return slice * pixels_per_slice() + col * n_rows + row;
  }
  std::size_t col_of(std::size_t n) const { return (n % pixels_per_slice()) / n_rows; }
  std::size_t row_of(std::size_t n) const { return n % n_rows; }
  std::size_t slice_of(std::size_t n) const { return n / pixels_per_slice(); }

  /// In-plane position of pixel n; the slice index does not move the pixel
  /// relative to its own scan line.
  Vec3 position(std::size_t n) const {
    return {origin.x + static_cast<double>(col_of(n)) * pitch, origin.y,
            origin.z + static_cast<double>(row_of(n)) * pitch};
  }
  double depth(std::size_t n) const { return origin.z + static_cast<double>(row_of(n)) * pitch; }
  double max_depth() const { return origin.z + static_cast<double>(n_rows - 1) * pitch; }

  /// The same grid with a single slice.
  ImageGrid slice_grid() const {
    ImageGrid g = *this;
    g.n_slices = 1;
    return g;
  }
};

}  // namespace unde

#endif  // UNDE_GEOMETRY_HPP
