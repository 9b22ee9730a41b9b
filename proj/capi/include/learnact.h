/* C API for the learnact core: opaque handles, integer status codes,
 * JSON strings for structured results. Every function that can fail
 * returns la_status; the thread-local la_last_error() message describes
 * the most recent failure on the calling thread. Strings returned
 * through char** are heap-allocated and must be released with
 * la_string_free().
 */
#ifndef LEARNACT_H
#define LEARNACT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define LA_API __declspec(dllexport)
#else
#define LA_API __attribute__((visibility("default")))
#endif

typedef enum la_status {
  LA_OK = 0,
  LA_ERR_INVALID_ARG = 1,
  LA_ERR_PARSE = 2,
  LA_ERR_VALIDATION = 3,
  LA_ERR_STATE = 4,
  LA_ERR_IO = 5,
  LA_ERR_BACKEND = 6,
  LA_ERR_INTERNAL = 7
} la_status;

typedef struct la_domain la_domain;
typedef struct la_instance la_instance;
typedef struct la_library la_library;
typedef struct la_env la_env;

LA_API const char* la_version(void);
LA_API const char* la_last_error(void);
LA_API void la_string_free(char* s);

/* -- planning domains ---------------------------------------------------- */
LA_API la_status la_domain_parse(const char* text, la_domain** out);
LA_API la_status la_domain_load(const char* path, la_domain** out);
LA_API void la_domain_free(la_domain* domain);
LA_API const char* la_domain_name(const la_domain* domain);
LA_API int la_domain_schema_count(const la_domain* domain);

/* -- problem instances ---------------------------------------------------- */
LA_API la_status la_instance_parse(const la_domain* domain, const char* text, const char* id,
                                   la_instance** out);
LA_API la_status la_instance_load(const la_domain* domain, const char* path, la_instance** out);
LA_API void la_instance_free(la_instance* instance);

/* -- learned-action libraries --------------------------------------------- */
LA_API la_status la_library_load(const char* path, la_library** out);
LA_API la_status la_library_parse_json(const char* json_text, la_library** out);
LA_API void la_library_free(la_library* library);
LA_API la_status la_library_validate(const la_library* library, const la_domain* domain);

/* -- episode environments -------------------------------------------------
 * Results come back as JSON: {"text":...,"valid":...,"done":...}.
 * library may be NULL for the plain atomic action space. */
LA_API la_status la_env_create(const la_domain* domain, const la_instance* instance,
                               const la_library* library, int max_steps, la_env** out);
LA_API void la_env_free(la_env* env);
LA_API la_status la_env_reset(la_env* env, char** out_json);
LA_API la_status la_env_step(la_env* env, const char* invocation, char** out_json);
/* Canonical goal sentence for the instance, e.g. "The goal is to
 * satisfy the following conditions: ...". */
LA_API la_status la_env_goal_text(const la_env* env, char** out_text);
/* Episode record summary: reward, step counters, per-step entries. */
LA_API la_status la_env_record(const la_env* env, char** out_json);
/* Serves the adapter protocol on stdin/stdout until EOF. */
LA_API la_status la_env_serve_stdio(la_env* env);

/* -- experiment pipeline ---------------------------------------------------
 * config_text uses the key = value config format (docs/config_format.md). */
LA_API la_status la_config_parse(const char* config_text, char** out_json);
LA_API la_status la_split(const char* config_text, char** out_json);
LA_API la_status la_run_train(const char* config_text, char** out_json);
LA_API la_status la_run_test(const char* config_text, const char* library_path, char** out_json);
LA_API la_status la_report_table(const char* report_json, char** out_text);
LA_API la_status la_report_compare(const char* before_json, const char* after_json,
                                   char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* LEARNACT_H */
