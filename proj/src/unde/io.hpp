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
#ifndef UNDE_IO_HPP
#define UNDE_IO_HPP

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "unde/evaluation.hpp"
#include "unde/geometry.hpp"
#include "unde/simulator.hpp"
#include "unde/solver.hpp"

namespace unde {

/// `key = value` lines, `#` starts a comment. Keys are case sensitive and may
/// appear once. Typed getters remember which keys were read so leftovers can
/// be reported as unknown.
class Config {
 public:
  Config() = default;
  static Config parse(std::istream& is, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Keys present but never read.
  std::vector<std::string> unused() const;

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
  std::string source_;
};

/// Recorded A-scans of one acquisition: `slices` x `positions` records, each
/// K pairs of M samples, stored as 32-bit floats.
struct Measurement {
  std::size_t n_transducers = 0;
  std::size_t n_pairs = 0;
  std::size_t n_samples = 0;
  double sampling_freq = 0.0;
  double speed = 0.0;
  std::size_t slices = 1;
  std::vector<std::size_t> offsets{0};  // scan layout, in grid columns
  std::size_t width = 0;
  std::vector<float> data;  // slice-major, then position, pair, time

  std::size_t positions() const { return offsets.size(); }
  std::size_t record_size() const { return n_pairs * n_samples; }
  void validate() const;
  /// Record (slice, position) as doubles.
  std::vector<double> record(std::size_t slice, std::size_t position) const;
  void set_record(std::size_t slice, std::size_t position, std::span<const double> y);
};

void write_measurement(std::ostream& os, const Measurement& m);
Measurement read_measurement(std::istream& is);

/// Float image with its grid and optional ground-truth targets.
struct ImageFile {
  ImageGrid grid;
  std::vector<float> data;
  std::vector<Target> targets;

  std::vector<double> values() const { return {data.begin(), data.end()}; }
};

void write_image(std::ostream& os, const ImageFile& img);
ImageFile read_image(std::istream& is);

/// 8-bit binary graymap of one slice (rows down, columns across), min-max
/// scaled. A constant image maps to 0.
void write_pgm(std::ostream& os, std::span<const double> image, const ImageGrid& grid);

/// iteration,data,prior,total
void write_history_csv(std::ostream& os, const std::vector<CostTerms>& history);

/// Writes through `writer` into a temporary file beside `path`, then renames
/// it over `path`. The target is untouched if the writer throws.
void atomic_write(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer,
                  bool binary = true);


Measurement load_measurement(const std::filesystem::path& path);
ImageFile load_image(const std::filesystem::path& path);

}  // namespace unde

#endif  // UNDE_IO_HPP
