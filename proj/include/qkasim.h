#ifndef QKASIM_H
#define QKASIM_H

/*
 * C interface to the key-agreement simulator.
 *
 * A scenario handle holds one batch request as a JSON document.  Build it
 * from a JSON string or field by field with the setters (dotted keys
 * address nested fields, e.g. "protocol.parties" or "attack.kind"), then
 * execute it.  Result strings are heap-allocated JSON documents owned by
 * the caller; release them with qkasim_string_free.
 *
 * Every function that can fail returns a status code and leaves a
 * description in qkasim_last_error(), which is thread-local.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qkasim_status {
  QKASIM_OK = 0,
  QKASIM_ERR_INVALID_ARGUMENT = 1,
  QKASIM_ERR_PARSE = 2,
  QKASIM_ERR_IO = 3,
  QKASIM_ERR_INTERNAL = 4
} qkasim_status;

typedef struct qkasim_scenario qkasim_scenario;

/* Library version, static storage. */
const char* qkasim_version(void);

/* Message for the calling thread's most recent failure, static storage. */
const char* qkasim_last_error(void);

/* Fresh scenario with every field at its default. */
qkasim_scenario* qkasim_scenario_create(void);

/* Scenario from a JSON document; NULL on parse failure. */
qkasim_scenario* qkasim_scenario_from_json(const char* json_text);

void qkasim_scenario_destroy(qkasim_scenario* scenario);

/* Field setters.  The dotted key names the JSON path; intermediate objects
 * are created as needed.  Value validation happens at execution time. */
qkasim_status qkasim_scenario_set_int(qkasim_scenario* scenario,
                                      const char* key, int64_t value);
qkasim_status qkasim_scenario_set_double(qkasim_scenario* scenario,
                                         const char* key, double value);
qkasim_status qkasim_scenario_set_string(qkasim_scenario* scenario,
                                         const char* key, const char* value);

/* Assigns a parsed JSON value (array, object, bool, ...) at the key. */
qkasim_status qkasim_scenario_set_json(qkasim_scenario* scenario,
                                       const char* key,
                                       const char* json_text);

/* Executes the scenario's Monte Carlo batch.  On success *report_json
 * holds the report document; when the scenario names an output_path the
 * same bytes are also written there (failure to write is QKASIM_ERR_IO). */
qkasim_status qkasim_run(qkasim_scenario* scenario, char** report_json);

/* Exact detection statistics for the scenario's attack, no sampling. */
qkasim_status qkasim_oracle(qkasim_scenario* scenario, char** oracle_json);

/* Numeric verification of the protocol's algebraic identities. */
qkasim_status qkasim_verify_identities(char** result_json);

void qkasim_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* QKASIM_H */
