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
#ifndef UNDE_SIMULATOR_HPP
#define UNDE_SIMULATOR_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unde/geometry.hpp"
#include "unde/stitching.hpp"
#include "unde/system_matrix.hpp"

namespace unde {

/// A labeled defect: intensity-free geometry used by the evaluation harness.
struct Target {
  std::string label;
  double x = 0.0;      // centroid, lateral (m)
  double z = 0.0;      // centroid, depth (m)
  double width = 0.0;  // lateral extent (m)
  double height = 0.0; // depth extent (m)
};

/// Binary reflectivity (1 inside defects) on a single-slice grid.
struct Phantom {
  ImageGrid grid;
  std::vector<double> reflectivity;
  std::vector<Target> targets;
};

enum class PhantomKind { Plates, TriangleUp, TriangleDown, Grid, HollowSquare, Points };

PhantomKind parse_phantom_kind(std::string_view name);
std::string_view to_string(PhantomKind kind);

struct PhantomParams {
  /// (col, row) pixels for PhantomKind::Points; empty puts one point at the
  /// grid center.
  std::vector<std::pair<std::size_t, std::size_t>> points;
};

/// Defect layouts echoing the simulated test cases: two thin plates 2 cm
/// below the surface, filled triangles pointing up or down, a lattice of
/// small blocks, a one-pixel hollow square, or isolated points. Shapes scale
/// with the grid; throws OutOfRange when they do not fit.
Phantom make_phantom(PhantomKind kind, const ImageGrid& grid, const PhantomParams& params = {});

struct SynthesisOptions {
  double snr = std::numeric_limits<double>::infinity();  // ||y_clean||^2 / ||w||^2
  std::uint64_t seed = 0;
  std::vector<double> g_true;  // per-pair direct-arrival gains; empty = all ones
  /// Direct arrivals are moved by a per-pair lag drawn uniformly from
  /// [-max_direct_lag, max_direct_lag] samples (speed mismatch).
  long max_direct_lag = 0;
};

/// y = A x + D g_true + w with w white Gaussian, scaled so the realized
/// ||y_clean||^2 / ||w||^2 equals the requested SNR exactly.
std::vector<double> synthesize(std::span<const double> x, const SystemMatrix& A, const DirectArrival& D,
                               const SynthesisOptions& options);

/// Per-position records of a wide phantom: each position sees only the
/// pixels inside its footprint. Noise is drawn sequentially from one
/// generator, so a single position reproduces synthesize().
std::vector<std::vector<double>> multi_position_synthesize(std::span<const double> x_joint, const ScanLayout& layout,
                                                           std::size_t rows, const SystemMatrix& A,
                                                           const DirectArrival& D, const SynthesisOptions& options);

}  // namespace unde

#endif  // UNDE_SIMULATOR_HPP
