#ifndef ARLANG_H
#define ARLANG_H

/* C API for the arlang actor-reactor language runtime.
 *
 * A program is loaded (parsed, checked, and its reactor behaviours compiled
 * to dependency graphs) into an opaque arl_program handle. The handle is
 * immutable; arl_run may be called on it any number of times.
 *
 * All functions return arl_status. On failure, arl_last_error() returns a
 * human-readable diagnostic for the calling thread.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct arl_program arl_program;

typedef enum arl_status {
  ARL_OK = 0,
  ARL_ERR_LOAD = 1,    /* parse, purity, or graph-compile error */
  ARL_ERR_RUNTIME = 2, /* run-time error (fail-stop) */
  ARL_ERR_ARG = 3      /* invalid argument to an API function */
} arl_status;

typedef enum arl_scheduler_mode {
  ARL_SCHED_DETERMINISTIC = 0, /* single flow, virtual time, reproducible */
  ARL_SCHED_CONCURRENT = 1     /* one thread per process, real time */
} arl_scheduler_mode;

/* Sink for program output / diagnostics. Called with complete lines. */
typedef void (*arl_write_fn)(const char* data, size_t len, void* userdata);

typedef struct arl_run_options {
  int scheduler; /* arl_scheduler_mode */
  int has_seed;  /* when 0, the RNG is seeded nondeterministically */
  uint64_t seed;
  uint64_t max_turns; /* total turn budget; 0 = unbounded */
  int trace_propagation;
  int trace_sct;
  arl_write_fn out_write; /* NULL = stdout */
  void* out_userdata;
  arl_write_fn err_write; /* NULL = stderr; receives traces + diagnostics */
  void* err_userdata;
} arl_run_options;

typedef struct arl_run_stats {
  uint64_t turns;
  uint64_t messages_sent;
  uint64_t publications_delivered;
  uint64_t stale_publications_dropped;
  uint64_t propagations;
  uint64_t stream_emissions;
  uint64_t actors_spawned;
  uint64_t reactors_spawned;
} arl_run_stats;

/* Fills opts with defaults: deterministic scheduler, no seed, unbounded
 * turns, no traces, stdio sinks. */
void arl_run_options_init(arl_run_options* opts);

/* Loads program text (UTF-8). len may be 0 if source is NUL-terminated. */
arl_status arl_program_load(const char* source, size_t len, arl_program** out);
arl_status arl_program_load_file(const char* path, arl_program** out);
void arl_program_free(arl_program* prog);

/* Spawns Main with its start constructor and drives the scheduler until all
 * mailboxes drain, max_turns is reached, or an error aborts the run.
 * stats may be NULL. */
arl_status arl_run(const arl_program* prog, const arl_run_options* opts,
                   arl_run_stats* stats);

/* Renders the compiled dependency graph of one reactor behaviour as text.
 * *out_text is heap-allocated; release it with arl_string_free. */
arl_status arl_dump_dag(const arl_program* prog, const char* behaviour,
                        char** out_text);
void arl_string_free(char* text);

/* Last error message recorded on this thread, or "" if none. */
const char* arl_last_error(void);

const char* arl_version(void);

#ifdef __cplusplus
}
#endif

#endif /* ARLANG_H */
