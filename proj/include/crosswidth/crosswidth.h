#ifndef CROSSWIDTH_H
#define CROSSWIDTH_H

#include <stddef.h>

#if defined(CW_BUILDING_LIBRARY)
#define CW_API __attribute__((visibility("default")))
#else
#define CW_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum cw_status {
  CW_OK = 0,
  CW_ERR_USAGE = 1,      /* bad arguments, config or expression syntax */
  CW_ERR_VALIDATION = 2, /* structural assumptions fail */
  CW_ERR_NUMERICAL = 3   /* non-convergence and other numerical failures */
} cw_status;

typedef struct cw_session cw_session;

typedef struct cw_run_flags {
  int has_h;
  double h;
  const double* h_list; /* overrides the config sweep when h_list_len > 0 */
  size_t h_list_len;
  int has_seed_index;
  int seed_index;
  int seed_offset;
  int has_theta;
  double theta;
  int has_x;
  double x;
  const char* variant; /* "one_switch" (default) or "full" */
  int m;               /* stphase */
  const char* phi;
  const char* sigma;
  double a, b, x0;
} cw_run_flags;

CW_API const char* cw_version(void);

/* Message of the last failure on the calling thread, or "" */
CW_API const char* cw_last_error(void);

CW_API void cw_flags_init(cw_run_flags* flags);

CW_API cw_status cw_session_from_file(const char* path, cw_session** out);
CW_API cw_status cw_session_from_string(const char* text, cw_session** out);
CW_API void cw_session_free(cw_session* session);

/* Runs a subcommand. *out receives JSON or CSV (free with cw_string_free); on
   failure it holds a JSON diagnostics document. session may be NULL for stphase. */
CW_API cw_status cw_run(const cw_session* session, const char* subcommand, const cw_run_flags* flags, char** out,
                        int* is_csv);

CW_API cw_status cw_action_loop(const cw_session* session, double energy, double* out);
CW_API cw_status cw_width_coefficient(const cw_session* session, double energy, double h, int full, double* out);

CW_API void cw_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
