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
#include "unde/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "unde/common.hpp"

namespace unde {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  fail(ErrorCode::Format, "config key '" + key + "': '" + value + "' is not " + what);
}

void write_floats(std::ostream& os, std::span<const float> v) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(float)));
  } else {
    for (float f : v) {
      auto u = std::bit_cast<std::uint32_t>(f);
      const char b[4] = {char(u), char(u >> 8), char(u >> 16), char(u >> 24)};
      os.write(b, 4);
    }
  }
}

void read_floats(std::istream& is, std::span<float> v) {
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(float)));
  if (static_cast<std::size_t>(is.gcount()) != v.size() * sizeof(float))
    fail(ErrorCode::Format, "payload shorter than the header announces");
  if constexpr (std::endian::native != std::endian::little) {
    for (float& f : v) {
      auto u = std::bit_cast<std::uint32_t>(f);
      u = (u >> 24) | ((u >> 8) & 0xff00u) | ((u << 8) & 0xff0000u) | (u << 24);
      f = std::bit_cast<float>(u);
    }
  }
}

// Header lines "key value..." up to a line reading "end".
std::vector<std::pair<std::string, std::string>> read_header(std::istream& is, const std::string& magic) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != magic) fail(ErrorCode::Format, "missing '" + magic + "' header");
  std::vector<std::pair<std::string, std::string>> out;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line == "end") return out;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) fail(ErrorCode::Format, "malformed header line '" + line + "'");
    out.emplace_back(line.substr(0, sp), trim(line.substr(sp + 1)));
  }
  fail(ErrorCode::Format, "header not terminated");
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    bad_value(key, v, "a number");
  }
  if (used != v.size()) bad_value(key, v, "a number");
  return d;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long n = 0;
  try {
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    n = std::stoull(v, &used);
  } catch (const std::exception&) {
    bad_value(key, v, "a nonnegative integer");
  }
  if (used != v.size()) bad_value(key, v, "a nonnegative integer");
  return static_cast<std::size_t>(n);
}

std::ostream& full_precision(std::ostream& os) {
  os.precision(std::numeric_limits<double>::max_digits10);
  return os;
}

}  // namespace

Config Config::parse(std::istream& is, const std::string& source) {
  Config c;
  c.source_ = source;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) fail(ErrorCode::Format, where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(ErrorCode::Format, where + ": empty key or value");
    if (!c.values_.emplace(key, value).second) fail(ErrorCode::Format, where + ": duplicate key '" + key + "'");
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config " + path.string());
  return parse(in, path.string());
}

const std::string* Config::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto* v = find(key);
  return v ? *v : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto* v = find(key);
  return v ? to_double(key, *v) : fallback;
}

long Config::get_long(const std::string& key, long fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::size_t used = 0;
  long n = 0;
  try {
    n = std::stol(*v, &used);
  } catch (const std::exception&) {
    bad_value(key, *v, "an integer");
  }
  if (used != v->size()) bad_value(key, *v, "an integer");
  return n;
}

std::size_t Config::get_size(const std::string& key, std::size_t fallback) const {
  const auto* v = find(key);
  return v ? to_size(key, *v) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "on" || *v == "yes") return true;
  if (*v == "0" || *v == "false" || *v == "off" || *v == "no") return false;
  bad_value(key, *v, "a boolean");
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

void Measurement::validate() const {
  require(n_transducers >= 2, "measurement: need at least two transducers");
  require(n_pairs == n_transducers * (n_transducers - 1) / 2, "measurement: pair count does not match transducers");
  require(n_samples > 0 && sampling_freq > 0.0 && speed > 0.0, "measurement: header fields must be positive");
  require(slices > 0 && !offsets.empty() && width > 0, "measurement: empty scan layout");
  require(data.size() == slices * positions() * record_size(), "measurement: payload length mismatch");
}

std::vector<double> Measurement::record(std::size_t slice, std::size_t position) const {
  if (slice >= slices || position >= positions()) fail(ErrorCode::OutOfRange, "measurement record out of range");
  const auto base = data.begin() + static_cast<long>((slice * positions() + position) * record_size());
  return {base, base + static_cast<long>(record_size())};
}

void Measurement::set_record(std::size_t slice, std::size_t position, std::span<const double> y) {
  if (slice >= slices || position >= positions()) fail(ErrorCode::OutOfRange, "measurement record out of range");
  require(y.size() == record_size(), "record size mismatch");
  data.resize(slices * positions() * record_size());
  std::transform(y.begin(), y.end(), data.begin() + static_cast<long>((slice * positions() + position) * record_size()),
                 [](double v) { return static_cast<float>(v); });
}

void write_measurement(std::ostream& os, const Measurement& m) {
  m.validate();
  full_precision(os);
  os << "UNDE-MEASUREMENT 1\n"
     << "n_transducers " << m.n_transducers << '\n'
     << "pairs " << m.n_pairs << '\n'
     << "samples " << m.n_samples << '\n'
     << "sampling_freq " << m.sampling_freq << '\n'
     << "speed " << m.speed << '\n'
     << "slices " << m.slices << '\n'
     << "width " << m.width << '\n'
     << "offsets";
  for (auto o : m.offsets) os << ' ' << o;
  os << "\nend\n";
  write_floats(os, m.data);
  if (!os) fail(ErrorCode::Io, "failed writing measurement");
}

Measurement read_measurement(std::istream& is) {
  Measurement m;
  m.offsets.clear();
  for (const auto& [k, v] : read_header(is, "UNDE-MEASUREMENT 1")) {
    if (k == "n_transducers") m.n_transducers = to_size(k, v);
    else if (k == "pairs") m.n_pairs = to_size(k, v);
    else if (k == "samples") m.n_samples = to_size(k, v);
    else if (k == "sampling_freq") m.sampling_freq = to_double(k, v);
    else if (k == "speed") m.speed = to_double(k, v);
    else if (k == "slices") m.slices = to_size(k, v);
    else if (k == "width") m.width = to_size(k, v);
    else if (k == "offsets") {
      std::istringstream ss(v);
      std::string tok;
      while (ss >> tok) m.offsets.push_back(to_size(k, tok));
    } else {
      fail(ErrorCode::Format, "unknown measurement header field '" + k + "'");
    }
  }
  if (m.offsets.empty()) fail(ErrorCode::Format, "measurement header lacks offsets");
  m.data.resize(m.slices * m.positions() * m.record_size());
  read_floats(is, m.data);
  m.validate();
  return m;
}

void write_image(std::ostream& os, const ImageFile& img) {
  require(img.data.size() == img.grid.size(), "image payload does not match its grid");
  full_precision(os);
  const auto& g = img.grid;
  os << "UNDE-IMAGE 1\n"
     << "cols " << g.n_cols << '\n'
     << "rows " << g.n_rows << '\n'
     << "slices " << g.n_slices << '\n'
     << "pitch " << g.pitch << '\n'
     << "origin " << g.origin.x << ' ' << g.origin.y << ' ' << g.origin.z << '\n';
  for (const auto& t : img.targets) {
    require(!t.label.empty() && t.label.find_first_of(" \t\n") == std::string::npos,
            "target labels must be nonempty single words");
    os << "target " << t.label << ' ' << t.x << ' ' << t.z << ' ' << t.width << ' ' << t.height << '\n';
  }
  os << "end\n";
  write_floats(os, img.data);
  if (!os) fail(ErrorCode::Io, "failed writing image");
}

ImageFile read_image(std::istream& is) {
  ImageFile img;
  for (const auto& [k, v] : read_header(is, "UNDE-IMAGE 1")) {
    if (k == "cols") img.grid.n_cols = to_size(k, v);
    else if (k == "rows") img.grid.n_rows = to_size(k, v);
    else if (k == "slices") img.grid.n_slices = to_size(k, v);
    else if (k == "pitch") img.grid.pitch = to_double(k, v);
    else if (k == "origin") {
      std::istringstream ss(v);
      if (!(ss >> img.grid.origin.x >> img.grid.origin.y >> img.grid.origin.z))
        fail(ErrorCode::Format, "bad image origin");
    } else if (k == "target") {
      std::istringstream ss(v);
      Target t;
      if (!(ss >> t.label >> t.x >> t.z >> t.width >> t.height)) fail(ErrorCode::Format, "bad target line");
      img.targets.push_back(t);
    } else {
      fail(ErrorCode::Format, "unknown image header field '" + k + "'");
    }
  }
  if (img.grid.n_cols == 0 || img.grid.n_rows == 0 || img.grid.n_slices == 0 || !(img.grid.pitch > 0.0))
    fail(ErrorCode::Format, "image header fields must be positive");
  img.data.resize(img.grid.size());
  read_floats(is, img.data);
  return img;
}

void write_pgm(std::ostream& os, std::span<const double> image, const ImageGrid& grid) {
  const ImageGrid g = grid.slice_grid();
  require(image.size() >= g.size(), "graymap: image smaller than its grid");
  const auto [lo_it, hi_it] = std::minmax_element(image.begin(), image.begin() + static_cast<long>(g.size()));
  const double lo = *lo_it, hi = *hi_it;
  os << "P5\n" << g.n_cols << ' ' << g.n_rows << "\n255\n";
  std::vector<unsigned char> row(g.n_cols);
  for (std::size_t r = 0; r < g.n_rows; ++r) {
    for (std::size_t c = 0; c < g.n_cols; ++c) {
      const double v = hi > lo ? (image[g.index(c, r)] - lo) / (hi - lo) : 0.0;
      row[c] = static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!os) fail(ErrorCode::Io, "failed writing graymap");
}

void write_history_csv(std::ostream& os, const std::vector<CostTerms>& history) {
  const auto prec = os.precision(std::numeric_limits<double>::max_digits10);
  os << "iteration,data,prior,total\n";
  for (std::size_t i = 0; i < history.size(); ++i)
    os << i << ',' << history[i].data << ',' << history[i].prior << ',' << history[i].total << '\n';
  os.precision(prec);
}

void atomic_write(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer, bool binary) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  try {
    {
      std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
      if (!out) fail(ErrorCode::Io, "cannot write " + tmp.string());
      writer(out);
      out.flush();
      if (!out) fail(ErrorCode::Io, "failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

Measurement load_measurement(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open measurement " + path.string());
  return read_measurement(in);
}

ImageFile load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open image " + path.string());
  return read_image(in);
}

}  // namespace unde
