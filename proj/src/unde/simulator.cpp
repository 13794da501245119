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
#include "unde/simulator.hpp"

#include <cmath>
#include <random>

#include "unde/common.hpp"

namespace unde {

PhantomKind parse_phantom_kind(std::string_view name) {
  if (name == "plates") return PhantomKind::Plates;
  if (name == "triangle_up") return PhantomKind::TriangleUp;
  if (name == "triangle_down") return PhantomKind::TriangleDown;
  if (name == "grid") return PhantomKind::Grid;
  if (name == "hollow_square") return PhantomKind::HollowSquare;
  if (name == "points") return PhantomKind::Points;
  fail(ErrorCode::InvalidArgument, "unknown phantom kind: " + std::string(name));
}

std::string_view to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::Plates: return "plates";
    case PhantomKind::TriangleUp: return "triangle_up";
    case PhantomKind::TriangleDown: return "triangle_down";
    case PhantomKind::Grid: return "grid";
    case PhantomKind::HollowSquare: return "hollow_square";
    case PhantomKind::Points: return "points";
  }
  return "unknown";
}

namespace {

class PhantomBuilder {
 public:
  explicit PhantomBuilder(const ImageGrid& grid) {
    ph_.grid = grid.slice_grid();
    ph_.reflectivity.assign(ph_.grid.size(), 0.0);
  }

  long cols() const { return static_cast<long>(ph_.grid.n_cols); }
  long rows() const { return static_cast<long>(ph_.grid.n_rows); }

  void set(long c, long r) {
    if (c < 0 || r < 0 || c >= cols() || r >= rows()) fail(ErrorCode::OutOfRange, "phantom shape out of bounds");
    ph_.reflectivity[ph_.grid.index(static_cast<std::size_t>(c), static_cast<std::size_t>(r))] = 1.0;
    pixels_.emplace_back(c, r);
  }

  /// Closes the current shape and records it as a target.
  void target(const std::string& label) {
    if (pixels_.empty()) fail(ErrorCode::OutOfRange, "phantom shape does not fit the grid");
    long c0 = pixels_[0].first, c1 = c0, r0 = pixels_[0].second, r1 = r0;
    double sc = 0.0, sr = 0.0;
    for (auto [c, r] : pixels_) {
      c0 = std::min(c0, c), c1 = std::max(c1, c), r0 = std::min(r0, r), r1 = std::max(r1, r);
      sc += static_cast<double>(c);
      sr += static_cast<double>(r);
    }
    const double n = static_cast<double>(pixels_.size());
    const auto& g = ph_.grid;
    ph_.targets.push_back({label, g.origin.x + sc / n * g.pitch, g.origin.z + sr / n * g.pitch,
                           static_cast<double>(c1 - c0 + 1) * g.pitch, static_cast<double>(r1 - r0 + 1) * g.pitch});
    pixels_.clear();
  }

  Phantom take() { return std::move(ph_); }

 private:
  Phantom ph_;
  std::vector<std::pair<long, long>> pixels_;
};

long scaled(double frac, long n) { return static_cast<long>(std::lround(frac * static_cast<double>(n))); }

void filled_triangle(PhantomBuilder& b, bool apex_up) {
  const long C = b.cols(), R = b.rows();
  const long top = scaled(0.40, R), bottom = scaled(0.75, R);
  const double half_base = 0.18 * static_cast<double>(C);
  const double center = 0.5 * static_cast<double>(C - 1);
  if (bottom <= top) fail(ErrorCode::OutOfRange, "triangle does not fit the grid");
  for (long r = top; r <= bottom; ++r) {
    double t = static_cast<double>(r - top) / static_cast<double>(bottom - top);
    if (!apex_up) t = 1.0 - t;
    const double hw = t * half_base;
    for (long c = 0; c < C; ++c)
      if (std::abs(static_cast<double>(c) - center) <= hw + 0.5) b.set(c, r);
  }
  b.target(apex_up ? "triangle_up" : "triangle_down");
}

}  // namespace

Phantom make_phantom(PhantomKind kind, const ImageGrid& grid, const PhantomParams& params) {
  PhantomBuilder b(grid);
  const long C = b.cols(), R = b.rows();
  switch (kind) {
    case PhantomKind::Plates: {
      const long row = static_cast<long>(std::lround((0.02 - grid.origin.z) / grid.pitch));
      const long len = std::max(1L, scaled(0.15, C));
      const long left = scaled(0.20, C), right = C - left - len;
      if (right <= left + len) fail(ErrorCode::OutOfRange, "plates do not fit the grid");
      for (long c = left; c < left + len; ++c) b.set(c, row);
      b.target("plate_left");
      for (long c = right; c < right + len; ++c) b.set(c, row);
      b.target("plate_right");
      break;
    }
    case PhantomKind::TriangleUp: filled_triangle(b, true); break;
    case PhantomKind::TriangleDown: filled_triangle(b, false); break;
    case PhantomKind::Grid: {
      // 4 x 2 lattice of 2 x 2 pixel blocks.
      for (long i = 0; i < 4; ++i) {
        for (long j = 0; j < 2; ++j) {
          const long c = scaled(0.2 + 0.2 * static_cast<double>(i), C) - 1;
          const long r = scaled(0.4 + 0.3 * static_cast<double>(j), R) - 1;
          for (long dc = 0; dc < 2; ++dc)
            for (long dr = 0; dr < 2; ++dr) b.set(c + dc, r + dr);
          b.target("block_" + std::to_string(i) + "_" + std::to_string(j));
        }
      }
      break;
    }
    case PhantomKind::HollowSquare: {
      const long side = std::max(3L, scaled(0.4, std::min(C, R)));
      const long c0 = (C - side) / 2, r0 = scaled(0.55, R) - side / 2;
      for (long c = c0; c < c0 + side; ++c)
        for (long r = r0; r < r0 + side; ++r)
          if (c == c0 || c == c0 + side - 1 || r == r0 || r == r0 + side - 1) b.set(c, r);
      b.target("hollow_square");
      break;
    }
    case PhantomKind::Points: {
      auto pts = params.points;
      if (pts.empty()) pts.emplace_back(grid.n_cols / 2, grid.n_rows / 2);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        b.set(static_cast<long>(pts[i].first), static_cast<long>(pts[i].second));
        b.target("point_" + std::to_string(i));
      }
      break;
    }
  }
  return b.take();
}

namespace {

std::vector<double> direct_component(const DirectArrival& D, const SynthesisOptions& opt, std::mt19937_64& rng) {
  std::vector<double> g = opt.g_true;
  if (g.empty()) g.assign(D.n_pairs(), 1.0);
  require(g.size() == D.n_pairs(), "g_true must have one entry per pair");
  if (opt.max_direct_lag == 0) return D.apply(g);
  DirectArrival moved = D;
  std::uniform_int_distribution<long> lag(-opt.max_direct_lag, opt.max_direct_lag);
  for (std::size_t k = 0; k < moved.n_pairs(); ++k) moved.shift_column(k, lag(rng));
  return moved.apply(g);
}

void add_noise(std::vector<double>& y, double snr, std::mt19937_64& rng) {
  if (std::isinf(snr)) return;
  require(snr > 0.0, "snr must be positive");
  double clean = 0.0;
  for (double v : y) clean += v * v;
  if (clean == 0.0) fail(ErrorCode::InvalidArgument, "cannot set a finite SNR on a zero clean signal");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> w(y.size());
  double energy = 0.0;
  for (double& v : w) {
    v = normal(rng);
    energy += v * v;
  }
  const double scale = std::sqrt(clean / (snr * energy));
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += scale * w[i];
}

}  // namespace

std::vector<double> synthesize(std::span<const double> x, const SystemMatrix& A, const DirectArrival& D,
                               const SynthesisOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<double> y = A.apply(x);
  const std::vector<double> d = direct_component(D, options, rng);
  require(d.size() == y.size(), "direct-arrival matrix does not match A");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += d[i];
  add_noise(y, options.snr, rng);
  return y;
}

std::vector<std::vector<double>> multi_position_synthesize(std::span<const double> x_joint, const ScanLayout& layout,
                                                           std::size_t rows, const SystemMatrix& A,
                                                           const DirectArrival& D, const SynthesisOptions& options) {
  std::mt19937_64 rng(options.seed);
  auto records = joint_apply(A, layout, rows, x_joint);
  for (auto& y : records) {
    const std::vector<double> d = direct_component(D, options, rng);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += d[i];
    add_noise(y, options.snr, rng);
  }
  return records;
}

}  // namespace unde
