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
#include "unde/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <ostream>

#include "unde/common.hpp"

namespace unde {

namespace {

constexpr int kSteps = 1000;

void finish(PRPoint& pt) {
  pt.precision = (pt.tp + pt.fp) == 0 ? 1.0 : static_cast<double>(pt.tp) / static_cast<double>(pt.tp + pt.fp);
  pt.recall = (pt.tp + pt.fn) == 0 ? 0.0 : static_cast<double>(pt.tp) / static_cast<double>(pt.tp + pt.fn);
}

double max_of(std::span<const double> v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, a);
  return m;
}

/// For values sorted in decreasing order, the number of entries >= t for each
/// threshold (thresholds decreasing).
std::vector<std::size_t> count_at_or_above(const std::vector<double>& sorted_desc, const std::vector<double>& th) {
  std::vector<std::size_t> out(th.size());
  std::size_t i = 0;
  for (std::size_t j = 0; j < th.size(); ++j) {
    while (i < sorted_desc.size() && sorted_desc[i] >= th[j]) ++i;
    out[j] = i;
  }
  return out;
}

}  // namespace

std::vector<double> pr_thresholds() {
  std::vector<double> th(kSteps + 1);
  for (int i = 0; i <= kSteps; ++i) th[i] = static_cast<double>(kSteps - i) / kSteps;
  return th;
}

double pr_area(const std::vector<PRPoint>& points) {
  if (points.size() < 2) return 0.0;
  std::map<double, std::pair<double, std::size_t>> by_recall;
  for (const auto& p : points) {
    auto& [sum, n] = by_recall[p.recall];
    sum += p.precision;
    ++n;
  }
  std::vector<std::pair<double, double>> curve;
  for (const auto& [r, acc] : by_recall) curve.emplace_back(r, acc.first / static_cast<double>(acc.second));
  if (curve.front().first > 0.0) curve.insert(curve.begin(), {0.0, curve.front().second});
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += 0.5 * (curve[i].second + curve[i - 1].second) * (curve[i].first - curve[i - 1].first);
  return area;
}

PRCurve pixelwise_pr(const std::vector<std::span<const double>>& recons,
                     const std::vector<std::span<const double>>& truths) {
  require(recons.size() == truths.size(), "pixelwise PR: one truth mask per reconstruction");
  const auto th = pr_thresholds();
  PRCurve curve;
  curve.points.resize(th.size());
  for (std::size_t j = 0; j < th.size(); ++j) curve.points[j].threshold = th[j];

  for (std::size_t i = 0; i < recons.size(); ++i) {
    const auto recon = recons[i];
    const auto truth = truths[i];
    require(recon.size() == truth.size(), "pixelwise PR: image and truth sizes differ");
    const double peak = max_of(recon);
    std::vector<double> pos, neg;
    std::size_t n_true = 0;
    for (std::size_t p = 0; p < recon.size(); ++p) {
      const bool is_target = truth[p] > 0.0;
      n_true += is_target;
      const double v = peak > 0.0 ? recon[p] / peak : 0.0;
      if (v > 0.0) (is_target ? pos : neg).push_back(v);
    }
    std::sort(pos.begin(), pos.end(), std::greater<>());
    std::sort(neg.begin(), neg.end(), std::greater<>());
    const auto tp = count_at_or_above(pos, th);
    const auto fp = count_at_or_above(neg, th);
    for (std::size_t j = 0; j < th.size(); ++j) {
      curve.points[j].tp += tp[j];
      curve.points[j].fp += fp[j];
      curve.points[j].fn += n_true - tp[j];
    }
  }
  for (auto& pt : curve.points) finish(pt);
  curve.area = pr_area(curve.points);
  return curve;
}

PRCurve pixelwise_pr(std::span<const double> recon, std::span<const double> truth) {
  return pixelwise_pr(std::vector<std::span<const double>>{recon}, std::vector<std::span<const double>>{truth});
}

std::vector<Component> segment_components(std::span<const double> image, const ImageGrid& grid,
                                          double floor_fraction) {
  const ImageGrid g = grid.slice_grid();
  require(image.size() == g.size(), "segmentation: image does not match grid");
  const double peak = max_of(image);
  std::vector<Component> out;
  if (peak <= 0.0) return out;
  const double floor = floor_fraction * peak;
  auto on = [&](std::size_t n) { return image[n] > 0.0 && image[n] >= floor; };

  std::vector<char> seen(image.size(), 0);
  std::vector<std::size_t> stack;
  const long C = static_cast<long>(g.n_cols), R = static_cast<long>(g.n_rows);
  for (std::size_t seed = 0; seed < image.size(); ++seed) {
    if (seen[seed] || !on(seed)) continue;
    Component comp;
    double wsum = 0.0, wx = 0.0, wz = 0.0;
    stack.assign(1, seed);
    seen[seed] = 1;
    while (!stack.empty()) {
      const std::size_t n = stack.back();
      stack.pop_back();
      const double v = image[n];
      const Vec3 p = g.position(n);
      comp.peak = std::max(comp.peak, v);
      ++comp.size;
      wsum += v;
      wx += v * p.x;
      wz += v * p.z;
      const long c = static_cast<long>(g.col_of(n)), r = static_cast<long>(g.row_of(n));
      for (long dc = -1; dc <= 1; ++dc) {
        for (long dr = -1; dr <= 1; ++dr) {
          const long cc = c + dc, rr = r + dr;
          if (cc < 0 || rr < 0 || cc >= C || rr >= R) continue;
          const std::size_t m = g.index(static_cast<std::size_t>(cc), static_cast<std::size_t>(rr));
          if (!seen[m] && on(m)) {
            seen[m] = 1;
            stack.push_back(m);
          }
        }
      }
    }
    comp.x = wx / wsum;
    comp.z = wz / wsum;
    out.push_back(comp);
  }
  return out;
}

PRCurve componentwise_pr(const std::vector<std::span<const double>>& recons, const std::vector<ImageGrid>& grids,
                         const std::vector<std::vector<Target>>& targets, const ComponentOptions& options) {
  require(recons.size() == grids.size() && recons.size() == targets.size(),
          "componentwise PR: recon, grid and target lists must align");
  double set_peak = 0.0;
  for (auto r : recons) set_peak = std::max(set_peak, max_of(r));

  const auto th = pr_thresholds();
  PRCurve curve;
  curve.points.resize(th.size());
  for (std::size_t j = 0; j < th.size(); ++j) curve.points[j].threshold = th[j];

  for (std::size_t i = 0; i < recons.size(); ++i) {
    require(!targets[i].empty(), "componentwise PR needs at least one target");
    const auto comps = segment_components(recons[i], grids[i], options.floor_fraction);
    const double norm = options.normalization == Normalization::PerSet ? set_peak : max_of(recons[i]);

    std::vector<char> paired(comps.size(), 0);
    std::vector<double> tp_peaks;  // normalized peak of each target's paired component
    for (const auto& t : targets[i]) {
      std::size_t best = comps.size();
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < comps.size(); ++c) {
        const double d = std::hypot(comps[c].x - t.x, comps[c].z - t.z);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (best < comps.size() && best_d <= options.pairing_radius) {
        paired[best] = 1;
        tp_peaks.push_back(comps[best].peak / norm);
      }
    }
    std::vector<double> fp_peaks;
    for (std::size_t c = 0; c < comps.size(); ++c)
      if (!paired[c]) fp_peaks.push_back(comps[c].peak / norm);

    std::sort(tp_peaks.begin(), tp_peaks.end(), std::greater<>());
    std::sort(fp_peaks.begin(), fp_peaks.end(), std::greater<>());
    const auto tp = count_at_or_above(tp_peaks, th);
    const auto fp = count_at_or_above(fp_peaks, th);
    for (std::size_t j = 0; j < th.size(); ++j) {
      curve.points[j].tp += tp[j];
      curve.points[j].fp += fp[j];
      curve.points[j].fn += targets[i].size() - tp[j];
    }
  }
  for (auto& pt : curve.points) finish(pt);
  curve.area = pr_area(curve.points);
  return curve;
}

PRCurve componentwise_pr(std::span<const double> recon, const ImageGrid& grid, const std::vector<Target>& targets,
                         const ComponentOptions& options) {
  return componentwise_pr(std::vector<std::span<const double>>{recon}, std::vector<ImageGrid>{grid},
                          std::vector<std::vector<Target>>{targets}, options);
}

void write_pr_csv(std::ostream& os, const PRCurve& curve) {
  const auto prec = os.precision(10);
  os << "threshold,tp,fp,fn,precision,recall\n";
  for (const auto& p : curve.points)
    os << p.threshold << ',' << p.tp << ',' << p.fp << ',' << p.fn << ',' << p.precision << ',' << p.recall << '\n';
  os.precision(prec);
}

}  // namespace unde
