/* qrect — quantitative-rectifiability statistics of finite point clouds.
 *
 * C API: opaque handles, integer status codes, JSON-string reports. All
 * returned strings are owned by the library; release them with
 * qrect_string_free. Thread safety: handles are immutable after creation and
 * may be shared across threads; qrect_last_error is thread-local.
 */
#ifndef QRECT_H
#define QRECT_H

#ifdef __cplusplus
extern "C" {
#endif

#define QRECT_VERSION "0.1.0"

typedef enum qrect_status {
  QRECT_OK = 0,
  QRECT_ERR_INVALID_ARGUMENT = 1,
  QRECT_ERR_IO = 2,
  QRECT_ERR_NUMERIC = 3
} qrect_status;

typedef struct qrect_cloud qrect_cloud;

const char* qrect_version(void);

/* Message for the most recent failure on this thread ("" if none). */
const char* qrect_last_error(void);

/* Worker cap for parallel per-ball / per-cube work. Results are identical
 * for any thread count. */
qrect_status qrect_set_threads(int threads);

/* spec_json: {"kind":"cantor4"|"koch"|"lipschitz_graph"|"segment"|"arc",
 *             "lambda":..,"ratio":..,"lipschitz":..,"radius":..,"angle":..,
 *             "depth":..,"count":..,"seed":..,"product_samples":..}
 * Unknown keys are rejected. */
qrect_status qrect_cloud_generate(const char* spec_json, qrect_cloud** out_cloud);

/* Cloud file: one JSON header line + CSV coordinate rows. */
qrect_status qrect_cloud_load(const char* path, qrect_cloud** out_cloud);
qrect_status qrect_cloud_save(const qrect_cloud* cloud, const char* path);

/* {"ambient_dim":..,"resolution":..,"count":..,"weights":..,
 *  "ground_truth":{...}} (ground truth present for generated clouds). */
qrect_status qrect_cloud_info(const qrect_cloud* cloud, char** out_json);

void qrect_cloud_free(qrect_cloud* cloud);

/* command: "content" | "beta" | "tst" | "pbp" | "dimension" | "bjcheck".
 * params_json: command-specific parameters (see README); pass "{}" for
 * defaults. The report embeds the fully resolved configuration. */
qrect_status qrect_analyze(const qrect_cloud* cloud, const char* command,
                           const char* params_json, char** out_report_json);

/* Capacity lower bound from scalar inputs:
 * {"content_e":..,"measure_sigma":..,"gamma_hat":..,"constant":..,"d":..} */
qrect_status qrect_capacity(const char* params_json, char** out_report_json);

void qrect_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* QRECT_H */
