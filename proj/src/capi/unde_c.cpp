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
#include "unde/unde.h"

#include <exception>
#include <memory>
#include <new>
#include <string>

#include "unde/common.hpp"
#include "unde/io.hpp"
#include "unde/pipeline.hpp"
#include "unde/preprocess.hpp"

struct unde_settings {
  unde::Config config;
};
struct unde_problem {
  unde::Problem problem;
};
struct unde_measurement {
  unde::Measurement m;
};
struct unde_image {
  unde::ImageFile file;
};
struct unde_result {
  unde::ReconstructionOutput out;
};
struct unde_pr {
  unde::PRCurve curve;
};

namespace {

thread_local std::string last_error;

unde_status to_status(unde::ErrorCode c) { return static_cast<unde_status>(static_cast<int>(c)); }

template <class F>
unde_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return UNDE_OK;
  } catch (const unde::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return UNDE_ERR_INTERNAL;
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return UNDE_ERR_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
    return UNDE_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return UNDE_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) unde::fail(unde::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* unde_version(void) { return "1.0.0"; }
const char* unde_last_error(void) { return last_error.c_str(); }

const char* unde_status_name(unde_status s) {
  switch (s) {
    case UNDE_OK: return "ok";
    case UNDE_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case UNDE_ERR_OUT_OF_RANGE: return "out_of_range";
    case UNDE_ERR_IO: return "io";
    case UNDE_ERR_FORMAT: return "format";
    case UNDE_ERR_NUMERIC: return "numeric";
    case UNDE_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

unde_status unde_settings_create(unde_settings** out) {
  return guard([&] {
    need(out, "out");
    *out = new unde_settings{};
  });
}

unde_status unde_settings_load(const char* path, unde_settings** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    auto s = std::make_unique<unde_settings>();
    s->config = unde::Config::load(path);
    *out = s.release();
  });
}

unde_status unde_settings_set(unde_settings* settings, const char* key, const char* value) {
  return guard([&] {
    need(settings, "settings");
    need(key, "key");
    need(value, "value");
    settings->config.set(key, value);
  });
}

void unde_settings_destroy(unde_settings* settings) { delete settings; }

unde_status unde_problem_create(const unde_settings* settings, unde_problem** out) {
  return guard([&] {
    need(settings, "settings");
    need(out, "out");
    const unde::RunSettings rs = unde::settings_from_config(settings->config);
    *out = new unde_problem{unde::build_problem(rs)};
  });
}

unde_status unde_problem_info(const unde_problem* p, size_t* n_pairs, size_t* n_samples, size_t* n_pixels,
                              size_t* nnz) {
  return guard([&] {
    need(p, "problem");
    if (n_pairs) *n_pairs = p->problem.A.n_pairs();
    if (n_samples) *n_samples = p->problem.A.n_samples();
    if (n_pixels) *n_pixels = p->problem.A.n_cols();
    if (nnz) *nnz = p->problem.A.nnz();
  });
}

void unde_problem_destroy(unde_problem* problem) { delete problem; }

unde_status unde_simulate(const unde_problem* p, unde_measurement** measurement, unde_image** truth) {
  return guard([&] {
    need(p, "problem");
    auto sim = unde::simulate(p->problem);
    auto m = std::make_unique<unde_measurement>(unde_measurement{std::move(sim.measurement)});
    auto t = std::make_unique<unde_image>(unde_image{std::move(sim.truth)});
    if (measurement) *measurement = m.release();
    if (truth) *truth = t.release();
  });
}

unde_status unde_measurement_load(const char* path, unde_measurement** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new unde_measurement{unde::load_measurement(path)};
  });
}

unde_status unde_measurement_save(const unde_measurement* m, const char* path) {
  return guard([&] {
    need(m, "measurement");
    need(path, "path");
    unde::atomic_write(path, [&](std::ostream& os) { unde::write_measurement(os, m->m); });
  });
}

unde_status unde_measurement_create(const unde_problem* p, const double* data, size_t count,
                                    unde_measurement** out) {
  return guard([&] {
    need(p, "problem");
    need(data, "data");
    need(out, "out");
    const auto& s = p->problem.settings;
    const auto layout = s.layout();
    unde::Measurement m;
    m.n_transducers = s.n_transducers;
    m.n_pairs = p->problem.geometry.n_pairs();
    m.n_samples = s.pulse.n_samples;
    m.sampling_freq = s.pulse.sampling_freq;
    m.speed = s.pulse.speed;
    m.slices = s.slices;
    m.offsets = layout.offsets;
    m.width = layout.width;
    if (count != m.slices * m.positions() * m.record_size())
      unde::fail(unde::ErrorCode::InvalidArgument, "sample count does not match slices * positions * pairs * samples");
    m.data.assign(data, data + count);
    m.validate();
    *out = new unde_measurement{std::move(m)};
  });
}

unde_status unde_measurement_info(const unde_measurement* m, size_t* slices, size_t* positions, size_t* n_pairs,
                                  size_t* n_samples) {
  return guard([&] {
    need(m, "measurement");
    if (slices) *slices = m->m.slices;
    if (positions) *positions = m->m.positions();
    if (n_pairs) *n_pairs = m->m.n_pairs;
    if (n_samples) *n_samples = m->m.n_samples;
  });
}

unde_status unde_measurement_data(const unde_measurement* m, const float** data, size_t* count) {
  return guard([&] {
    need(m, "measurement");
    need(data, "data");
    need(count, "count");
    *data = m->m.data.data();
    *count = m->m.data.size();
  });
}

void unde_measurement_destroy(unde_measurement* m) { delete m; }

unde_status unde_reconstruct(const unde_problem* p, const unde_measurement* m, const char* method,
                             unde_result** out) {
  return guard([&] {
    need(p, "problem");
    need(m, "measurement");
    need(method, "method");
    need(out, "out");
    const auto meth = unde::parse_method(method);
    *out = new unde_result{unde::reconstruct(p->problem, m->m, meth)};
  });
}

unde_status unde_result_image(const unde_result* r, unde_image** out) {
  return guard([&] {
    need(r, "result");
    need(out, "out");
    *out = new unde_image{r->out.image};
  });
}

unde_status unde_result_history_size(const unde_result* r, size_t* count) {
  return guard([&] {
    need(r, "result");
    need(count, "count");
    *count = r->out.history.size();
  });
}

unde_status unde_result_cost(const unde_result* r, size_t index, double* data, double* prior, double* total) {
  return guard([&] {
    need(r, "result");
    if (index >= r->out.history.size()) unde::fail(unde::ErrorCode::OutOfRange, "history index out of range");
    const auto& c = r->out.history[index];
    if (data) *data = c.data;
    if (prior) *prior = c.prior;
    if (total) *total = c.total;
  });
}

unde_status unde_result_sigma(const unde_result* r, double* sigma) {
  return guard([&] {
    need(r, "result");
    need(sigma, "sigma");
    *sigma = r->out.sigma;
  });
}

unde_status unde_result_save_history(const unde_result* r, const char* path) {
  return guard([&] {
    need(r, "result");
    need(path, "path");
    unde::atomic_write(path, [&](std::ostream& os) { unde::write_history_csv(os, r->out.history); }, false);
  });
}

void unde_result_destroy(unde_result* r) { delete r; }

unde_status unde_image_load(const char* path, unde_image** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new unde_image{unde::load_image(path)};
  });
}

unde_status unde_image_save(const unde_image* img, const char* path) {
  return guard([&] {
    need(img, "image");
    need(path, "path");
    unde::atomic_write(path, [&](std::ostream& os) { unde::write_image(os, img->file); });
  });
}

unde_status unde_image_save_pgm(const unde_image* img, size_t slice, const char* path) {
  return guard([&] {
    need(img, "image");
    need(path, "path");
    const auto& g = img->file.grid;
    if (slice >= g.n_slices) unde::fail(unde::ErrorCode::OutOfRange, "slice index out of range");
    const auto v = img->file.values();
    const std::size_t pps = g.pixels_per_slice();
    const std::span<const double> one(v.data() + slice * pps, pps);
    unde::atomic_write(path, [&](std::ostream& os) { unde::write_pgm(os, one, g.slice_grid()); });
  });
}

unde_status unde_image_info(const unde_image* img, size_t* cols, size_t* rows, size_t* slices, double* pitch) {
  return guard([&] {
    need(img, "image");
    const auto& g = img->file.grid;
    if (cols) *cols = g.n_cols;
    if (rows) *rows = g.n_rows;
    if (slices) *slices = g.n_slices;
    if (pitch) *pitch = g.pitch;
  });
}

unde_status unde_image_data(const unde_image* img, const float** data, size_t* count) {
  return guard([&] {
    need(img, "image");
    need(data, "data");
    need(count, "count");
    *data = img->file.data.data();
    *count = img->file.data.size();
  });
}

void unde_image_destroy(unde_image* img) { delete img; }

unde_status unde_evaluate(const unde_image* recon, const unde_image* truth, int per_set, double pairing_radius,
                          unde_pr** pixelwise, unde_pr** componentwise) {
  return guard([&] {
    need(recon, "recon");
    need(truth, "truth");
    if (!(pairing_radius > 0.0)) unde::fail(unde::ErrorCode::InvalidArgument, "pairing radius must be positive");
    auto ev = unde::evaluate(recon->file, truth->file,
                             per_set ? unde::Normalization::PerSet : unde::Normalization::PerImage, pairing_radius);
    auto px = std::make_unique<unde_pr>(unde_pr{std::move(ev.pixelwise)});
    auto cw = std::make_unique<unde_pr>(unde_pr{std::move(ev.componentwise)});
    if (pixelwise) *pixelwise = px.release();
    if (componentwise) *componentwise = cw.release();
  });
}

unde_status unde_pr_area(const unde_pr* pr, double* area) {
  return guard([&] {
    need(pr, "pr");
    need(area, "area");
    *area = pr->curve.area;
  });
}

unde_status unde_pr_size(const unde_pr* pr, size_t* count) {
  return guard([&] {
    need(pr, "pr");
    need(count, "count");
    *count = pr->curve.points.size();
  });
}

unde_status unde_pr_point(const unde_pr* pr, size_t index, double* threshold, size_t* tp, size_t* fp, size_t* fn,
                          double* precision, double* recall) {
  return guard([&] {
    need(pr, "pr");
    if (index >= pr->curve.points.size()) unde::fail(unde::ErrorCode::OutOfRange, "PR index out of range");
    const auto& p = pr->curve.points[index];
    if (threshold) *threshold = p.threshold;
    if (tp) *tp = p.tp;
    if (fp) *fp = p.fp;
    if (fn) *fn = p.fn;
    if (precision) *precision = p.precision;
    if (recall) *recall = p.recall;
  });
}

unde_status unde_pr_save_csv(const unde_pr* pr, const char* path) {
  return guard([&] {
    need(pr, "pr");
    need(path, "path");
    unde::atomic_write(path, [&](std::ostream& os) { unde::write_pr_csv(os, pr->curve); }, false);
  });
}

void unde_pr_destroy(unde_pr* pr) { delete pr; }

unde_status unde_preprocess(const double* raw, size_t n_records, size_t stride, double* out, size_t out_count) {
  return guard([&] {
    need(raw, "raw");
    need(out, "out");
    const unde::PreprocessOptions opt;
    if (out_count != n_records * opt.output_length)
      unde::fail(unde::ErrorCode::InvalidArgument, "output buffer must hold n_records * 409 values");
    const auto v = unde::preprocess_records({raw, n_records * stride}, n_records, stride, opt);
    std::copy(v.begin(), v.end(), out);
  });
}

}  // extern "C"
