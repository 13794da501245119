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
#include "unde/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "unde/common.hpp"
#include "unde/saft.hpp"

namespace unde {

void RunSettings::validate() const {
  require(n_transducers >= 2, "need at least two transducers");
  require(transducer_spacing > 0.0, "transducer spacing must be positive");
  require(cols > 0 && rows > 1 && slices > 0 && positions > 0, "grid dimensions must be positive");
  require(pitch > 0.0, "pixel pitch must be positive");
  require(positions == 1 || (stride > 0 && stride <= cols), "scan stride must be in [1, cols]");
  pulse.validate();
  prior.validate();
  require(solver.shift_window >= 0, "shift window must be nonnegative");
}

RunSettings settings_from_config(const Config& c) {
  RunSettings s;
  s.n_transducers = c.get_size("n_transducers", s.n_transducers);
  s.transducer_spacing = c.get_double("transducer_spacing", s.transducer_spacing);
  s.cols = c.get_size("cols", s.cols);
  s.rows = c.get_size("rows", s.rows);
  s.pitch = c.get_double("pitch", s.pitch);
  s.slices = c.get_size("slices", s.slices);
  s.positions = c.get_size("positions", s.positions);
  s.stride = c.get_size("stride", s.stride);
  s.apodize = c.get_bool("apodize", s.apodize);
  s.joint = c.get_bool("joint", s.joint);
  s.threads = static_cast<unsigned>(c.get_size("threads", s.threads));

  auto& p = s.pulse;
  p.carrier_freq = c.get_double("carrier_freq", p.carrier_freq);
  p.sampling_freq = c.get_double("sampling_freq", p.sampling_freq);
  p.alpha0 = c.get_double("alpha0", p.alpha0);
  p.speed = c.get_double("speed", p.speed);
  p.lambda = c.get_double("lambda", p.lambda);
  p.fractional_bandwidth = c.get_double("fractional_bandwidth", p.fractional_bandwidth);
  p.t0 = c.get_double("t0", p.t0);
  p.n_samples = c.get_size("samples", p.n_samples);
  p.table_oversample = c.get_size("table_oversample", p.table_oversample);

  auto& q = s.prior;
  q.p = c.get_double("prior_p", q.p);
  q.q = c.get_double("prior_q", q.q);
  q.T = c.get_double("prior_T", q.T);
  q.sigma_g = c.get_double("sigma_g", q.sigma_g);
  const std::string se = c.get_string("sigma_e", "");
  if (se == "inf" || se == "off") q.sigma_e = std::numeric_limits<double>::infinity();
  else q.sigma_e = c.get_double("sigma_e", q.sigma_e);
  q.c_min = c.get_double("c_min", q.c_min);
  q.c_max = c.get_double("c_max", q.c_max);
  q.a = c.get_double("spatial_a", q.a);
  q.gamma = c.get_double("gamma", q.gamma);

  auto& o = s.solver;
  o.max_iterations = c.get_size("iterations", o.max_iterations);
  o.tolerance = c.get_double("tolerance", o.tolerance);
  o.seed = c.get_size("seed", o.seed);
  o.shift_window = c.get_long("shift_window", o.shift_window);
  o.model_direct_arrival = c.get_bool("model_direct_arrival", o.model_direct_arrival);
  o.estimate_shift = c.get_bool("estimate_shift", o.estimate_shift);
  o.sigma = c.get_double("noise_sigma", o.sigma);

  s.phantom = c.get_string("phantom", s.phantom);
  const std::string snr = c.get_string("snr", "");
  if (snr == "inf") s.snr = std::numeric_limits<double>::infinity();
  else s.snr = c.get_double("snr", s.snr);
  s.sim_seed = c.get_size("sim_seed", s.sim_seed);
  s.max_direct_lag = c.get_long("max_direct_lag", s.max_direct_lag);

  if (const auto extra = c.unused(); !extra.empty()) fail(ErrorCode::Format, "unknown config key '" + extra[0] + "'");
  s.validate();
  return s;
}

namespace {

ImpulseTable make_table(const RunSettings& s, const ScanGeometry& geom, const ImageGrid& grid) {
  const double tau_max = max_travel_time(geom, grid, s.pulse.speed);
  return ImpulseTable(s.pulse, 0.0, tau_max);
}

}  // namespace

Problem build_problem(const RunSettings& settings) {
  settings.validate();
  ScanGeometry geom = ScanGeometry::linear_array(settings.n_transducers, settings.transducer_spacing);
  const ImageGrid grid = settings.local_grid();
  ImpulseTable table = make_table(settings, geom, grid);
  SystemMatrix A = build_system_matrix(geom, grid, table, settings.pulse, settings.apodize, settings.threads);
  DirectArrival D = build_direct_arrival(geom, table, settings.pulse);
  return Problem{settings, std::move(geom), grid, std::move(table), std::move(A), std::move(D)};
}

Method parse_method(std::string_view name) {
  if (name == "saft") return Method::Saft;
  if (name == "l1") return Method::L1;
  if (name == "mbir2d") return Method::Mbir2d;
  if (name == "mbir25d") return Method::Mbir25d;
  fail(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "' (saft, l1, mbir2d, mbir25d)");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Saft: return "saft";
    case Method::L1: return "l1";
    case Method::Mbir2d: return "mbir2d";
    case Method::Mbir25d: return "mbir25d";
  }
  return "?";
}

SimulationOutput simulate(const Problem& pb) {
  const RunSettings& s = pb.settings;
  const ScanLayout layout = s.layout();
  const ImageGrid slice = joint_grid(layout, s.rows, s.pitch);
  const Phantom ph = make_phantom(parse_phantom_kind(s.phantom), slice);

  SimulationOutput out;
  Measurement& m = out.measurement;
  m.n_transducers = s.n_transducers;
  m.n_pairs = pb.geometry.n_pairs();
  m.n_samples = s.pulse.n_samples;
  m.sampling_freq = s.pulse.sampling_freq;
  m.speed = s.pulse.speed;
  m.slices = s.slices;
  m.offsets = layout.offsets;
  m.width = layout.width;
  m.data.assign(m.slices * m.positions() * m.record_size(), 0.0f);

  for (std::size_t sl = 0; sl < s.slices; ++sl) {
    SynthesisOptions opt;
    opt.snr = s.snr;
    opt.seed = s.sim_seed + sl;
    opt.max_direct_lag = s.max_direct_lag;
    const auto ys = multi_position_synthesize(ph.reflectivity, layout, s.rows, pb.A, pb.D, opt);
    for (std::size_t l = 0; l < ys.size(); ++l) m.set_record(sl, l, ys[l]);
  }

  out.truth.grid = s.full_grid();
  out.truth.targets = ph.targets;
  out.truth.data.reserve(out.truth.grid.size());
  for (std::size_t sl = 0; sl < s.slices; ++sl)
    for (double v : ph.reflectivity) out.truth.data.push_back(static_cast<float>(v));
  return out;
}

void check_compatible(const Problem& pb, const Measurement& m) {
  m.validate();
  const RunSettings& s = pb.settings;
  if (m.n_transducers != s.n_transducers || m.n_samples != s.pulse.n_samples)
    fail(ErrorCode::InvalidArgument, "measurement does not match the configured array or record length");
  if (m.width != s.cols) fail(ErrorCode::InvalidArgument, "measurement scan width differs from the configured cols");
  if (std::abs(m.sampling_freq - s.pulse.sampling_freq) > 1e-9 * s.pulse.sampling_freq)
    fail(ErrorCode::InvalidArgument, "measurement sampling frequency differs from the configuration");
  ScanLayout layout{m.offsets, m.width};
  layout.validate();
}

ReconstructionOutput reconstruct(const Problem& pb, const Measurement& m, Method method) {
  check_compatible(pb, m);
  const RunSettings& s = pb.settings;
  const ScanLayout layout{m.offsets, m.width};
  const std::size_t rows = s.rows;
  const std::size_t L = layout.positions();
  const ImageGrid slice_grid = joint_grid(layout, rows, s.pitch);

  ReconstructionOutput out;
  out.image.grid = joint_grid(layout, rows, s.pitch, m.slices);
  out.image.data.reserve(out.image.grid.size());
  auto append = [&](const std::vector<double>& img) {
    for (double v : img) out.image.data.push_back(static_cast<float>(v));
  };
  auto keep = [&](const Reconstruction& r) {
    out.history = r.history;
    out.sigma = r.sigma;
    out.iterations = r.iterations;
  };
  const ScanLayout single = ScanLayout::uniform(1, layout.width, 0);

  if (method == Method::Mbir25d) {
    if (s.joint || L == 1) {
      std::vector<std::vector<std::vector<double>>> recs(m.slices);
      for (std::size_t sl = 0; sl < m.slices; ++sl)
        for (std::size_t l = 0; l < L; ++l) recs[sl].push_back(m.record(sl, l));
      const auto r = volume_reconstruct_25d(recs, pb.A, pb.D, s.prior, layout, rows, s.pitch, s.solver);
      keep(r);
      append(r.x);
      return out;
    }
    // Independent volumes per position, stitched slice by slice.
    std::vector<std::vector<std::vector<double>>> per_slice(m.slices, std::vector<std::vector<double>>(L));
    const std::size_t local = layout.width * rows;
    for (std::size_t l = 0; l < L; ++l) {
      std::vector<std::vector<std::vector<double>>> recs(m.slices);
      for (std::size_t sl = 0; sl < m.slices; ++sl) recs[sl].push_back(m.record(sl, l));
      const auto r = volume_reconstruct_25d(recs, pb.A, pb.D, s.prior, single, rows, s.pitch, s.solver);
      keep(r);
      for (std::size_t sl = 0; sl < m.slices; ++sl)
        per_slice[sl][l].assign(r.x.begin() + static_cast<long>(sl * local),
                                r.x.begin() + static_cast<long>((sl + 1) * local));
    }
    for (const auto& imgs : per_slice) append(naive_stitch(imgs, layout, rows));
    return out;
  }

  const PriorModel joint_prior(slice_grid, s.prior);
  for (std::size_t sl = 0; sl < m.slices; ++sl) {
    if (method == Method::Mbir2d && s.joint && L > 1) {
      std::vector<std::vector<double>> recs;
      for (std::size_t l = 0; l < L; ++l) recs.push_back(m.record(sl, l));
      const auto r = joint_reconstruct(recs, pb.A, pb.D, joint_prior, layout, s.solver);
      keep(r);
      append(r.x);
      continue;
    }
    std::vector<std::vector<double>> images;
    for (std::size_t l = 0; l < L; ++l) {
      const auto y = m.record(sl, l);
      switch (method) {
        case Method::Saft:
          images.push_back(saft_reconstruct(y, pb.geometry, pb.grid, s.pulse, s.apodize));
          break;
        case Method::L1: {
          const auto r = l1_reconstruct(y, pb.A, s.prior, pb.grid, s.solver);
          keep(r);
          images.push_back(r.x);
          break;
        }
        default: {
          const PriorModel prior(pb.grid, s.prior);
          const auto r = mbir_reconstruct(y, pb.A, pb.D, prior, pb.grid, s.solver);
          keep(r);
          images.push_back(r.x);
          break;
        }
      }
    }
    append(L == 1 ? images.front() : naive_stitch(images, layout, rows));
  }
  return out;
}

EvaluationOutput evaluate(const ImageFile& recon, const ImageFile& truth, Normalization normalization,
                          double pairing_radius) {
  const ImageGrid& g = recon.grid;
  const ImageGrid& t = truth.grid;
  if (g.n_cols != t.n_cols || g.n_rows != t.n_rows || g.n_slices != t.n_slices)
    fail(ErrorCode::InvalidArgument, "reconstruction and truth grids differ");
  if (truth.targets.empty()) fail(ErrorCode::InvalidArgument, "truth file lists no targets");

  const auto rv = recon.values();
  const auto tv = truth.values();
  const std::size_t pps = g.pixels_per_slice();
  std::vector<std::span<const double>> rs, ts;
  std::vector<ImageGrid> grids;
  std::vector<std::vector<Target>> targets;
  for (std::size_t sl = 0; sl < g.n_slices; ++sl) {
    rs.emplace_back(rv.data() + sl * pps, pps);
    ts.emplace_back(tv.data() + sl * pps, pps);
    grids.push_back(g.slice_grid());
    targets.push_back(truth.targets);
  }
  ComponentOptions co;
  co.pairing_radius = pairing_radius;
  co.normalization = normalization;
  return {pixelwise_pr(rs, ts), componentwise_pr(rs, grids, targets, co)};
}

}  // namespace unde
