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
#include "unde/stitching.hpp"

#include <cmath>

#include "unde/common.hpp"

namespace unde {

ScanLayout ScanLayout::uniform(std::size_t n, std::size_t width, std::size_t stride) {
  require(n >= 1 && width >= 1, "layout needs at least one position of nonzero width");
  ScanLayout layout;
  layout.width = width;
  for (std::size_t l = 0; l < n; ++l) layout.offsets.push_back(l * stride);
  layout.validate();
  return layout;
}

ScanLayout ScanLayout::mira(double pitch) {
  require(pitch > 0.0, "pitch must be positive");
  constexpr double inch = 0.0254;
  const auto width = static_cast<std::size_t>(std::lround(0.40 / pitch));
  const auto stride = static_cast<std::size_t>(std::lround(4.0 * inch / pitch));
  // Centers run from 8 in to 84 - 8 in in 4 in steps.
  const auto n = static_cast<std::size_t>(std::lround((84.0 - 2.0 * 8.0) / 4.0)) + 1;
  return uniform(n, width, stride);
}

void ScanLayout::validate() const {
  require(!offsets.empty() && width >= 1, "layout needs at least one position of nonzero width");
  require(offsets.front() == 0, "first position must start at joint column 0");
  for (std::size_t l = 1; l < offsets.size(); ++l) {
    require(offsets[l] >= offsets[l - 1], "layout offsets must be non-decreasing");
    require(offsets[l] <= offsets[l - 1] + width, "layout leaves uncovered columns between positions");
  }
}

std::size_t joint_column_map(const ScanLayout& layout, std::size_t l, std::size_t n, std::size_t rows) {
  if (l >= layout.positions()) fail(ErrorCode::OutOfRange, "scan position out of range");
  if (rows == 0 || n >= layout.width * rows) fail(ErrorCode::OutOfRange, "local pixel out of range");
  return (layout.offsets[l] + n / rows) * rows + n % rows;
}

std::vector<std::vector<double>> joint_apply(const SystemMatrix& A, const ScanLayout& layout, std::size_t rows,
                                             std::span<const double> x_joint) {
  require(A.n_cols() == layout.width * rows, "system matrix does not match the layout width");
  require(x_joint.size() == layout.joint_width() * rows, "joint image size does not match the layout");
  std::vector<std::vector<double>> out;
  std::vector<double> local(A.n_cols());
  for (std::size_t l = 0; l < layout.positions(); ++l) {
    for (std::size_t n = 0; n < local.size(); ++n) local[n] = x_joint[joint_column_map(layout, l, n, rows)];
    out.push_back(A.apply(local));
  }
  return out;
}

ImageGrid joint_grid(const ScanLayout& layout, std::size_t rows, double pitch, std::size_t slices) {
  return ImageGrid::centered(layout.joint_width(), rows, pitch, slices);
}

Reconstruction joint_reconstruct(const std::vector<std::vector<double>>& records, const SystemMatrix& A,
                                 const DirectArrival& D, const PriorModel& prior, const ScanLayout& layout,
                                 const SolverOptions& options) {
  layout.validate();
  require(records.size() == layout.positions(), "one record per scan position is required");
  require(prior.size() % layout.joint_width() == 0, "prior grid does not match the layout");
  const std::size_t rows = prior.size() / layout.joint_width();
  require(A.n_cols() == layout.width * rows, "system matrix does not match the layout width");
  for (const auto& y : records)
    if (y.size() != A.n_rows()) fail(ErrorCode::InvalidArgument, "inconsistent record lengths");

  std::vector<RecordPlacement> placements;
  for (std::size_t l = 0; l < layout.positions(); ++l) placements.push_back({0, layout.offsets[l]});
  const ImageGrid grid = joint_grid(layout, rows, 1.0);
  IcdSolver solver(A, &D, prior, grid, std::move(placements), records, options);
  solver.run();
  return collect(solver);
}

std::vector<double> naive_stitch(const std::vector<std::vector<double>>& images, const ScanLayout& layout,
                                 std::size_t rows) {
  layout.validate();
  require(images.size() == layout.positions(), "one image per scan position is required");
  const std::size_t local = layout.width * rows;
  for (const auto& im : images)
    if (im.size() != local) fail(ErrorCode::InvalidArgument, "inconsistent image heights");
  std::vector<double> sum(layout.joint_width() * rows, 0.0);
  std::vector<double> hits(sum.size(), 0.0);
  for (std::size_t l = 0; l < images.size(); ++l) {
    for (std::size_t n = 0; n < local; ++n) {
      const std::size_t j = joint_column_map(layout, l, n, rows);
      sum[j] += images[l][n];
      hits[j] += 1.0;
    }
  }
  for (std::size_t j = 0; j < sum.size(); ++j) sum[j] /= hits[j];
  return sum;
}

Reconstruction volume_reconstruct_25d(const std::vector<std::vector<std::vector<double>>>& records,
                                      const SystemMatrix& A, const DirectArrival& D, const PriorParams& params,
                                      const ScanLayout& layout, std::size_t rows, double pitch,
                                      const SolverOptions& options) {
  layout.validate();
  require(!records.empty(), "volume reconstruction needs at least one slice");
  std::vector<RecordPlacement> placements;
  std::vector<std::vector<double>> flat;
  for (std::size_t s = 0; s < records.size(); ++s) {
    if (records[s].size() != layout.positions()) fail(ErrorCode::InvalidArgument, "mismatched slice grids");
    for (std::size_t l = 0; l < layout.positions(); ++l) {
      placements.push_back({s, layout.offsets[l]});
      flat.push_back(records[s][l]);
    }
  }
  const ImageGrid grid = joint_grid(layout, rows, pitch, records.size());
  const PriorModel prior(grid, params);
  IcdSolver solver(A, &D, prior, grid, std::move(placements), std::move(flat), options);
  solver.run();
  return collect(solver);
}

}  // namespace unde
