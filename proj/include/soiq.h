/* Copyright 2026 the soiq authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* soiq — knowledge-graph-grounded research ideation.
 *
 * C API of the shared library. All state lives behind the opaque
 * soiq_engine handle; every command returns a status code and, on
 * success, a heap-allocated JSON summary the caller releases with
 * soiq_free(). On failure soiq_last_error() carries the message.
 *
 * The status values double as the CLI exit codes.
 */

#ifndef SOIQ_H
#define SOIQ_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum soiq_status {
  SOIQ_OK = 0,
  SOIQ_USAGE_ERROR = 1,
  SOIQ_CONFIG_ERROR = 2,
  SOIQ_EXTRACTION_ERROR = 3,
  SOIQ_PROVIDER_ERROR = 4,
  SOIQ_VALIDATION_ERROR = 5,
  SOIQ_IO_ERROR = 6,
  SOIQ_INTERNAL_ERROR = 7
} soiq_status;

typedef struct soiq_engine soiq_engine;

const char* soiq_version(void);

/* Parses and validates the JSON run config; relative paths inside the
 * config resolve against its directory. The engine initializes lazily on
 * the first command, so options set beforehand take full effect. */
soiq_status soiq_open(const char* config_path, soiq_engine** out_engine);

/* Same, from an in-memory JSON document; base_dir (may be NULL) anchors
 * relative paths. */
soiq_status soiq_open_json(const char* config_json, const char* base_dir,
                           soiq_engine** out_engine);

void soiq_close(soiq_engine* engine);

/* Message of the most recent failure on this engine; owned by the engine,
 * valid until the next call on it. */
const char* soiq_last_error(const soiq_engine* engine);

/* Overrides before the first command: "seed", "workers", "run_id",
 * "dry_run" ("0"/"1"). */
soiq_status soiq_set_option(soiq_engine* engine, const char* key, const char* value);

/* Ingest every paper file in corpus_dir into the motivation graph. */
soiq_status soiq_build_graph(soiq_engine* engine, const char* corpus_dir,
                             char** out_summary_json);

/* Synthesize parent nodes; kind is "problem", "challenge", or "both". */
soiq_status soiq_hierarchy(soiq_engine* engine, const char* kind, char** out_summary_json);

/* Run exploration + deliberation sessions for every topic (one per line)
 * in topics_file. */
soiq_status soiq_ideate(soiq_engine* engine, const char* topics_file, char** out_summary_json);

/* sets_json: {"<method name>": "<idea-set directory>", ...}. */
soiq_status soiq_evaluate(soiq_engine* engine, const char* sets_json, char** out_report_json);

/* Full invariant scan of the stored graph. The report is produced even
 * when violations exist; the status is then SOIQ_VALIDATION_ERROR. */
soiq_status soiq_validate_graph(soiq_engine* engine, char** out_report_json);

void soiq_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* SOIQ_H */
