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
#ifndef UNDE_UNDE_H
#define UNDE_UNDE_H

/* C interface to the unde ultrasonic reconstruction library.
 *
 * Every function returning unde_status reports failures through the status
 * code; unde_last_error() then holds a one-line description for the calling
 * thread. Objects are opaque and owned by the caller once returned; release
 * them with the matching *_destroy function (NULL is accepted). */

#include <stddef.h>

#if defined(UNDE_BUILDING)
#define UNDE_API __attribute__((visibility("default")))
#else
#define UNDE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum unde_status {
  UNDE_OK = 0,
  UNDE_ERR_INVALID_ARGUMENT = 1,
  UNDE_ERR_OUT_OF_RANGE = 2,
  UNDE_ERR_IO = 3,
  UNDE_ERR_FORMAT = 4,
  UNDE_ERR_NUMERIC = 5,
  UNDE_ERR_INTERNAL = 6
} unde_status;

typedef struct unde_settings unde_settings;
typedef struct unde_problem unde_problem;
typedef struct unde_measurement unde_measurement;
typedef struct unde_image unde_image;
typedef struct unde_result unde_result;
typedef struct unde_pr unde_pr;

UNDE_API const char* unde_version(void);
/* Message of the last failure on this thread, "" if none. */
UNDE_API const char* unde_last_error(void);
/* Short name of a status code, e.g. "invalid_argument". */
UNDE_API const char* unde_status_name(unde_status status);

/* Settings: the key = value configuration. Keys set later override loaded
 * ones; unknown keys are rejected when the problem is built. */
UNDE_API unde_status unde_settings_create(unde_settings** out);
UNDE_API unde_status unde_settings_load(const char* path, unde_settings** out);
UNDE_API unde_status unde_settings_set(unde_settings* settings, const char* key, const char* value);
UNDE_API void unde_settings_destroy(unde_settings* settings);

/* Problem: geometry, pulse, system matrix and direct-arrival templates. */
UNDE_API unde_status unde_problem_create(const unde_settings* settings, unde_problem** out);
UNDE_API unde_status unde_problem_info(const unde_problem* problem, size_t* n_pairs, size_t* n_samples,
                                       size_t* n_pixels, size_t* nnz);
UNDE_API void unde_problem_destroy(unde_problem* problem);

/* Simulation from the configured phantom. Either output may be NULL. */
UNDE_API unde_status unde_simulate(const unde_problem* problem, unde_measurement** measurement, unde_image** truth);

UNDE_API unde_status unde_measurement_load(const char* path, unde_measurement** out);
UNDE_API unde_status unde_measurement_save(const unde_measurement* measurement, const char* path);
/* Wraps preprocessed records (slices * positions * pairs * samples values,
 * same order as the file payload) with the problem's header and layout. */
UNDE_API unde_status unde_measurement_create(const unde_problem* problem, const double* data, size_t count,
                                             unde_measurement** out);
UNDE_API unde_status unde_measurement_info(const unde_measurement* measurement, size_t* slices, size_t* positions,
                                           size_t* n_pairs, size_t* n_samples);
UNDE_API unde_status unde_measurement_data(const unde_measurement* measurement, const float** data, size_t* count);
UNDE_API void unde_measurement_destroy(unde_measurement* measurement);

/* method: "saft", "l1", "mbir2d" or "mbir25d". */
UNDE_API unde_status unde_reconstruct(const unde_problem* problem, const unde_measurement* measurement,
                                      const char* method, unde_result** out);
UNDE_API unde_status unde_result_image(const unde_result* result, unde_image** out);
UNDE_API unde_status unde_result_history_size(const unde_result* result, size_t* count);
UNDE_API unde_status unde_result_cost(const unde_result* result, size_t index, double* data, double* prior,
                                      double* total);
UNDE_API unde_status unde_result_sigma(const unde_result* result, double* sigma);
UNDE_API unde_status unde_result_save_history(const unde_result* result, const char* path);
UNDE_API void unde_result_destroy(unde_result* result);

UNDE_API unde_status unde_image_load(const char* path, unde_image** out);
UNDE_API unde_status unde_image_save(const unde_image* image, const char* path);
/* 8-bit graymap of one slice, min-max scaled. */
UNDE_API unde_status unde_image_save_pgm(const unde_image* image, size_t slice, const char* path);
UNDE_API unde_status unde_image_info(const unde_image* image, size_t* cols, size_t* rows, size_t* slices,
                                     double* pitch);
UNDE_API unde_status unde_image_data(const unde_image* image, const float** data, size_t* count);
UNDE_API void unde_image_destroy(unde_image* image);

/* Pixel-wise and component-wise PR curves. per_set selects set-wide rather
 * than per-slice normalization for the component test. Either output may be
 * NULL. */
UNDE_API unde_status unde_evaluate(const unde_image* recon, const unde_image* truth, int per_set,
                                   double pairing_radius, unde_pr** pixelwise, unde_pr** componentwise);
UNDE_API unde_status unde_pr_area(const unde_pr* pr, double* area);
UNDE_API unde_status unde_pr_size(const unde_pr* pr, size_t* count);
UNDE_API unde_status unde_pr_point(const unde_pr* pr, size_t index, double* threshold, size_t* tp, size_t* fp,
                                   size_t* fn, double* precision, double* recall);
UNDE_API unde_status unde_pr_save_csv(const unde_pr* pr, const char* path);
UNDE_API void unde_pr_destroy(unde_pr* pr);

/* Trigger skip, anti-alias filter and 5x decimation of raw 1 MHz records of
 * at least 2048 samples, `stride` apart. Writes n_records * 409 values. */
UNDE_API unde_status unde_preprocess(const double* raw, size_t n_records, size_t stride, double* out,
                                     size_t out_count);

#ifdef __cplusplus
}
#endif

#endif /* UNDE_UNDE_H */
