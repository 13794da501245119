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
#ifndef UNDE_EVALUATION_HPP
#define UNDE_EVALUATION_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "unde/geometry.hpp"
#include "unde/simulator.hpp"

namespace unde {

struct PRPoint {
  double threshold = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 1.0;  // 1 when nothing is detected
  double recall = 0.0;
};

struct PRCurve {
  std::vector<PRPoint> points;  // thresholds from 1 down to 0 in steps of 0.001
  double area = 0.0;
};

/// 1, 0.999, ..., 0.
std::vector<double> pr_thresholds();

/// Trapezoidal area under precision(recall). Points sharing a recall value are
/// averaged; the curve is extended flat to recall 0. Fewer than two points
/// give 0.
double pr_area(const std::vector<PRPoint>& points);

enum class Normalization { PerImage, PerSet };

/// Pixel-wise detection test. Each image is divided by its own maximum; a
/// pixel is detected at threshold t when its normalized value is positive and
/// >= t. Counts are summed over all (recon, truth) pairs.
PRCurve pixelwise_pr(const std::vector<std::span<const double>>& recons,
                     const std::vector<std::span<const double>>& truths);
PRCurve pixelwise_pr(std::span<const double> recon, std::span<const double> truth);

/// Connected region of a segmented reconstruction.
struct Component {
  double peak = 0.0;  // maximum value (unnormalized)
  double x = 0.0;     // intensity-weighted centroid (m)
  double z = 0.0;
  std::size_t size = 0;
};

/// 8-connected components of the pixels >= floor_fraction * max(image).
std::vector<Component> segment_components(std::span<const double> image, const ImageGrid& grid,
                                          double floor_fraction = 0.02);

struct ComponentOptions {
  double pairing_radius = 0.10;
  double floor_fraction = 0.02;
  Normalization normalization = Normalization::PerImage;
};

/// Component-wise detection test: each target pairs with the component whose
/// centroid is closest to it, if that distance is within the pairing radius.
/// At each threshold a target is a TP when its paired component peaks at or
/// above the threshold, every other component peaking above it is a FP, and
/// FN = #targets - TP.
PRCurve componentwise_pr(const std::vector<std::span<const double>>& recons, const std::vector<ImageGrid>& grids,
                         const std::vector<std::vector<Target>>& targets, const ComponentOptions& options = {});
PRCurve componentwise_pr(std::span<const double> recon, const ImageGrid& grid, const std::vector<Target>& targets,
                         const ComponentOptions& options = {});

/// threshold,tp,fp,fn,precision,recall
void write_pr_csv(std::ostream& os, const PRCurve& curve);

}  // namespace unde

#endif  // UNDE_EVALUATION_HPP
