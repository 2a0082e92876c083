#ifndef EDGESCHED_H
#define EDGESCHED_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EsAlgorithm {
  ES_ALGORITHM_AMR2 = 0,
  ES_ALGORITHM_AMDP = 1,
  ES_ALGORITHM_AMDP_HETERO = 2,
  ES_ALGORITHM_GREEDY = 3,
  ES_ALGORITHM_EXACT = 4,
} EsAlgorithm;

typedef enum EsStatus {
  ES_STATUS_OK = 0,
  // No schedule meets the deadline.
  ES_STATUS_INFEASIBLE = 1,
  // Malformed arguments or instance data.
  ES_STATUS_INVALID_INPUT = 2,
  // The algorithm does not apply to this instance.
  ES_STATUS_PRECONDITION = 3,
  ES_STATUS_INTERNAL = 4,
  ES_STATUS_NULL_POINTER = 5,
  ES_STATUS_BUFFER_TOO_SMALL = 6,
  ES_STATUS_PANIC = 7,
} EsStatus;

// Problem instance.
typedef struct EsInstance EsInstance;

// Result of one solve.
typedef struct EsReport EsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on the calling thread, or null. Valid until
// the next failing call on the same thread.
const char *es_last_error_message(void);

// Builds an instance from `m + 1` accuracies, a row-major `(m + 1) x n`
// time matrix (last row is the ES) and optional `n` communication times.
enum EsStatus es_instance_new(size_t m,
                              size_t n,
                              const double *accuracies,
                              const double *times,
                              const double *comm_times,
                              double deadline,
                              struct EsInstance **out);

// Parses an instance from a NUL-terminated JSON document.
enum EsStatus es_instance_from_json(const char *json, struct EsInstance **out);

void es_instance_free(struct EsInstance *instance);

// Number of jobs, or 0 for null.
size_t es_instance_jobs(const struct EsInstance *instance);

// Number of ED models, or 0 for null.
size_t es_instance_models(const struct EsInstance *instance);

// Runs `algorithm`. A `delta` of 0 selects the default AMDP grid (1 ms).
enum EsStatus es_solve(const struct EsInstance *instance,
                       enum EsAlgorithm algorithm,
                       double delta,
                       struct EsReport **out);

void es_report_free(struct EsReport *report);

// Total accuracy, or NaN for null.
double es_report_total_accuracy(const struct EsReport *report);

double es_report_makespan(const struct EsReport *report);

double es_report_ed_load(const struct EsReport *report);

double es_report_es_load(const struct EsReport *report);

// Percentage by which the makespan exceeds the deadline.
double es_report_violation_pct(const struct EsReport *report);

// LP relaxation value, or NaN when the algorithm does not solve one.
double es_report_lp_objective(const struct EsReport *report);

size_t es_report_fractional_jobs(const struct EsReport *report);

double es_report_runtime_ms(const struct EsReport *report);

// Copies the model index of every job into `buffer` (ES is index `m`).
// `len` must be at least the job count.
enum EsStatus es_report_assignment(const struct EsReport *report, size_t *buffer, size_t len);

// Library version as a static NUL-terminated string.
const char *es_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EDGESCHED_H */
