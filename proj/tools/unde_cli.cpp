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
#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "unde/unde.h"

namespace {

struct Failure {
  unde_status status;
};

void check(unde_status s) {
  if (s != UNDE_OK) throw Failure{s};
}

template <class T, void (*Destroy)(T*)>
struct Owned {
  T* p = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Destroy(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Settings = Owned<unde_settings, unde_settings_destroy>;
using Problem = Owned<unde_problem, unde_problem_destroy>;
using MeasurementH = Owned<unde_measurement, unde_measurement_destroy>;
using Image = Owned<unde_image, unde_image_destroy>;
using Result = Owned<unde_result, unde_result_destroy>;
using Pr = Owned<unde_pr, unde_pr_destroy>;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Flags shared by simulate and reconstruct, mapped onto config keys.
struct Overrides {
  std::string config;
  std::size_t iters = 0;
  long long seed = -1;
  std::string snr;
  std::string apodize;
  std::string joint;
  std::string phantom;
  double gamma = -1.0;
  double sigma_g = -1.0;
  std::string sigma_e;
  std::vector<double> spatial;

  void apply(unde_settings* s, bool simulating) const {
    auto set = [&](const char* k, const std::string& v) { check(unde_settings_set(s, k, v.c_str())); };
    if (iters > 0) set("iterations", std::to_string(iters));
    if (seed >= 0) set(simulating ? "sim_seed" : "seed", std::to_string(seed));
    if (!snr.empty()) set("snr", snr);
    if (!apodize.empty()) set("apodize", apodize);
    if (!joint.empty()) set("joint", joint);
    if (!phantom.empty()) set("phantom", phantom);
    if (gamma >= 0.0) set("gamma", fmt(gamma));
    if (sigma_g > 0.0) set("sigma_g", fmt(sigma_g));
    if (!sigma_e.empty()) set("sigma_e", sigma_e);
    if (spatial.size() == 3) {
      set("spatial_a", fmt(spatial[0]));
      set("c_min", fmt(spatial[1]));
      set("c_max", fmt(spatial[2]));
    }
  }
};

void add_model_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "random seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--apodize", o.apodize, "transducer beam pattern")->check(CLI::IsMember({"on", "off"}));
}

void load_settings(Settings& s, const Overrides& o, bool simulating) {
  if (o.config.empty()) check(unde_settings_create(s.out()));
  else check(unde_settings_load(o.config.c_str(), s.out()));
  o.apply(s.get(), simulating);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultrasonic NDE reconstruction: simulate, reconstruct, evaluate, render"};
  app.require_subcommand(1);

  Overrides sim_o, rec_o;
  std::string sim_out, sim_truth, sim_truth_pgm;
  auto* sim = app.add_subcommand("simulate", "synthesize measurements of a phantom");
  add_model_flags(sim, sim_o);
  sim->add_option("--snr", sim_o.snr, "signal to noise ratio, or inf");
  sim->add_option("--phantom", sim_o.phantom, "plates, triangle_up, triangle_down, grid, hollow_square, points");
  sim->add_option("-o,--out", sim_out, "measurement file")->required();
  sim->add_option("--truth", sim_truth, "truth image file")->required();
  sim->add_option("--truth-pgm", sim_truth_pgm, "truth graymap");

  std::string method, rec_data, rec_out, rec_pgm, rec_history;
  auto* rec = app.add_subcommand("reconstruct", "reconstruct an image from measurements");
  add_model_flags(rec, rec_o);
  rec->add_option("-m,--method", method, "saft, l1, mbir2d or mbir25d")
      ->required()
      ->check(CLI::IsMember({"saft", "l1", "mbir2d", "mbir25d"}));
  rec->add_option("-d,--data", rec_data, "measurement file")->required()->check(CLI::ExistingFile);
  rec->add_option("-o,--out", rec_out, "image file")->required();
  rec->add_option("--pgm", rec_pgm, "graymap of the first slice");
  rec->add_option("--history", rec_history, "cost history CSV");
  rec->add_option("--iters", rec_o.iters, "ICD iterations")->check(CLI::PositiveNumber);
  rec->add_option("--gamma", rec_o.gamma, "inter-slice prior weight")->check(CLI::NonNegativeNumber);
  rec->add_option("--sigma-g", rec_o.sigma_g, "Gibbs prior scale")->check(CLI::PositiveNumber);
  rec->add_option("--sigma-e", rec_o.sigma_e, "exponential prior scale, or inf");
  rec->add_option("--spatial", rec_o.spatial, "a,c_min,c_max")->expected(3)->delimiter(',');
  rec->add_option("--joint", rec_o.joint, "joint-MAP stitching")->check(CLI::IsMember({"on", "off"}));

  std::string ev_recon, ev_truth, ev_out, ev_comp, ev_norm = "image";
  double ev_radius = 0.10;
  auto* ev = app.add_subcommand("evaluate", "precision/recall against a truth image");
  ev->add_option("-r,--recon", ev_recon, "reconstructed image file")->required()->check(CLI::ExistingFile);
  ev->add_option("-t,--truth", ev_truth, "truth image file")->required()->check(CLI::ExistingFile);
  ev->add_option("-o,--out", ev_out, "pixel-wise PR CSV")->required();
  ev->add_option("--components", ev_comp, "component-wise PR CSV");
  ev->add_option("--normalize", ev_norm, "component test normalization")->check(CLI::IsMember({"image", "set"}));
  ev->add_option("--radius", ev_radius, "pairing radius (m)")->check(CLI::PositiveNumber);

  std::string rd_image, rd_out;
  std::size_t rd_slice = 0;
  auto* rd = app.add_subcommand("render", "write an image file as a graymap");
  rd->add_option("-i,--image", rd_image, "image file")->required()->check(CLI::ExistingFile);
  rd->add_option("-o,--out", rd_out, "graymap file")->required();
  rd->add_option("--slice", rd_slice, "slice index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 2;
  }

  try {
    if (*sim) {
      Settings s;
      load_settings(s, sim_o, true);
      Problem p;
      check(unde_problem_create(s.get(), p.out()));
      MeasurementH m;
      Image truth;
      check(unde_simulate(p.get(), m.out(), truth.out()));
      check(unde_measurement_save(m.get(), sim_out.c_str()));
      check(unde_image_save(truth.get(), sim_truth.c_str()));
      if (!sim_truth_pgm.empty()) check(unde_image_save_pgm(truth.get(), 0, sim_truth_pgm.c_str()));
    } else if (*rec) {
      Settings s;
      load_settings(s, rec_o, false);
      Problem p;
      check(unde_problem_create(s.get(), p.out()));
      MeasurementH m;
      check(unde_measurement_load(rec_data.c_str(), m.out()));
      Result r;
      const auto t0 = std::chrono::steady_clock::now();
      check(unde_reconstruct(p.get(), m.get(), method.c_str(), r.out()));
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::size_t n = 0;
      check(unde_result_history_size(r.get(), &n));
      for (std::size_t i = 0; i < n; ++i) {
        double d = 0, pr = 0, tot = 0;
        check(unde_result_cost(r.get(), i, &d, &pr, &tot));
        std::printf("iter %zu cost %.10e data %.10e prior %.10e\n", i, tot, d, pr);
      }
      std::printf("wall_time_s %.3f\n", wall);
      Image img;
      check(unde_result_image(r.get(), img.out()));
      check(unde_image_save(img.get(), rec_out.c_str()));
      if (!rec_pgm.empty()) check(unde_image_save_pgm(img.get(), 0, rec_pgm.c_str()));
      if (!rec_history.empty()) check(unde_result_save_history(r.get(), rec_history.c_str()));
    } else if (*ev) {
      Image recon, truth;
      check(unde_image_load(ev_recon.c_str(), recon.out()));
      check(unde_image_load(ev_truth.c_str(), truth.out()));
      Pr px, cw;
      check(unde_evaluate(recon.get(), truth.get(), ev_norm == "set", ev_radius, px.out(), cw.out()));
      double a_px = 0, a_cw = 0;
      check(unde_pr_area(px.get(), &a_px));
      check(unde_pr_area(cw.get(), &a_cw));
      check(unde_pr_save_csv(px.get(), ev_out.c_str()));
      if (!ev_comp.empty()) check(unde_pr_save_csv(cw.get(), ev_comp.c_str()));
      std::printf("pixelwise_area %.6f\ncomponentwise_area %.6f\n", a_px, a_cw);
    } else if (*rd) {
      Image img;
      check(unde_image_load(rd_image.c_str(), img.out()));
      check(unde_image_save_pgm(img.get(), rd_slice, rd_out.c_str()));
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s: %s\n", unde_status_name(f.status), unde_last_error());
    return 1;
  }
  return 0;
}
