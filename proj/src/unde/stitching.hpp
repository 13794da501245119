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
#ifndef UNDE_STITCHING_HPP
#define UNDE_STITCHING_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "unde/geometry.hpp"
#include "unde/prior.hpp"
#include "unde/solver.hpp"
#include "unde/system_matrix.hpp"

namespace unde {

/// Column placement of the scan positions along one cross-section.
struct ScanLayout {
  std::vector<std::size_t> offsets;  // first joint column of each position
  std::size_t width = 0;             // columns per position

  /// n positions, `stride` columns apart.
  static ScanLayout uniform(std::size_t n, std::size_t width, std::size_t stride);
  /// 18 positions of a 40 cm aperture moved in 4 inch steps, the first and
  /// last centered 8 inches from the specimen edges, on a grid of `pitch`.
  static ScanLayout mira(double pitch);

  std::size_t positions() const { return offsets.size(); }
  std::size_t joint_width() const { return offsets.empty() ? 0 : offsets.back() + width; }
  /// Throws unless offsets start at 0, are non-decreasing and leave no gaps.
  void validate() const;
};

/// Joint pixel index of local pixel n (column-major, `rows` per column) of
/// position l.
std::size_t joint_column_map(const ScanLayout& layout, std::size_t l, std::size_t n, std::size_t rows);

/// Per-position data of a joint image: y_l = A x restricted to footprint l.
std::vector<std::vector<double>> joint_apply(const SystemMatrix& A, const ScanLayout& layout, std::size_t rows,
                                             std::span<const double> x_joint);

/// Joint-MAP reconstruction of one slice over all positions. `prior` must be
/// built on the joint grid (joint_width columns).
Reconstruction joint_reconstruct(const std::vector<std::vector<double>>& records, const SystemMatrix& A,
                                 const DirectArrival& D, const PriorModel& prior, const ScanLayout& layout,
                                 const SolverOptions& options);

/// Independent images placed side by side; overlapping columns are averaged
/// with equal weights.
std::vector<double> naive_stitch(const std::vector<std::vector<double>>& images, const ScanLayout& layout,
                                 std::size_t rows);

/// 2.5D MBIR: records[s][l] is position l of slice s. Data terms stay per
/// slice, the prior couples adjacent slices through `params.gamma`. Slices
/// are visited interleaved: every pass draws one pixel order and updates that
/// pixel in all slices before moving on.
Reconstruction volume_reconstruct_25d(const std::vector<std::vector<std::vector<double>>>& records,
                                      const SystemMatrix& A, const DirectArrival& D, const PriorParams& params,
                                      const ScanLayout& layout, std::size_t rows, double pitch,
                                      const SolverOptions& options);

/// Joint grid of a layout: joint_width columns centered like a single scan.
ImageGrid joint_grid(const ScanLayout& layout, std::size_t rows, double pitch, std::size_t slices = 1);

}  // namespace unde

#endif  // UNDE_STITCHING_HPP
