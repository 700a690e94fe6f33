#ifndef SPLITEQ_H
#define SPLITEQ_H

#include <stdint.h>

#if defined(SPLITEQ_BUILDING)
#define SPLITEQ_API __attribute__((visibility("default")))
#else
#define SPLITEQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct spliteq_game spliteq_game;
typedef struct spliteq_solution spliteq_solution;

typedef enum {
  SPLITEQ_OK = 0,
  SPLITEQ_VERIFY_FAILED = 1,
  SPLITEQ_INPUT_ERROR = 2,
  SPLITEQ_BUDGET_ERROR = 3,
  SPLITEQ_INTERNAL_ERROR = 4
} spliteq_status;

typedef enum { SPLITEQ_MODE_EXACT = 0, SPLITEQ_MODE_FLOAT = 1, SPLITEQ_MODE_WIDE = 2 } spliteq_mode;

/* Message of the last failed call on this thread; empty when none. */
SPLITEQ_API const char* spliteq_last_error(void);
/* Strings returned through char** out-parameters are released with this. */
SPLITEQ_API void spliteq_string_free(char* s);

SPLITEQ_API spliteq_status spliteq_game_parse(const char* text, spliteq_game** out);
SPLITEQ_API spliteq_status spliteq_game_load(const char* path, spliteq_game** out);
SPLITEQ_API spliteq_status spliteq_game_serialize(const spliteq_game* g, char** out);
SPLITEQ_API void spliteq_game_free(spliteq_game* g);
SPLITEQ_API int spliteq_game_vertices(const spliteq_game* g);
SPLITEQ_API int spliteq_game_edges(const spliteq_game* g);
SPLITEQ_API int spliteq_game_players(const spliteq_game* g);

SPLITEQ_API spliteq_status spliteq_gen_example8(spliteq_game** out);
/* family: "general", "parallel" or "grid" (grid uses n as width and m as height). */
SPLITEQ_API spliteq_status spliteq_gen_random(uint64_t seed, const char* family, int n, int m, int k,
                                              int player_independent, spliteq_game** out);
/* U and V are row-major n*n arrays of 0/1; beta and delta are rational strings. */
SPLITEQ_API spliteq_status spliteq_gen_gadget(int n, const int* U, const int* V, const char* beta,
                                              const char* delta, spliteq_game** out);

/* max_pivots <= 0 selects the default budget. */
SPLITEQ_API spliteq_status spliteq_trace(const spliteq_game* g, spliteq_mode mode, long max_pivots,
                                         spliteq_solution** out);
SPLITEQ_API void spliteq_solution_free(spliteq_solution* s);
SPLITEQ_API int spliteq_solution_breakpoints(const spliteq_solution* s);
SPLITEQ_API long spliteq_solution_pivots(const spliteq_solution* s);
/* json != 0 selects the JSON layout; digits < 0 writes exact fractions. */
SPLITEQ_API spliteq_status spliteq_solution_emit(const spliteq_solution* s, int json, int digits, char** out);

/* Flow documents use the "spliteq-flow 1" text layout. */
SPLITEQ_API spliteq_status spliteq_solve_at(const spliteq_game* g, const char* lambda, spliteq_mode mode,
                                            long max_pivots, char** flow_doc);
/* lambda may be NULL to take it from the flow document. Returns SPLITEQ_VERIFY_FAILED on violations. */
SPLITEQ_API spliteq_status spliteq_verify(const spliteq_game* g, const char* flow_doc, const char* lambda,
                                          const char* tolerance, char** report);
/* method: "best-response", "potential-min" or "exhaustive-support". */
SPLITEQ_API spliteq_status spliteq_oracle(const spliteq_game* g, const char* lambda, const char* method,
                                          char** flow_doc);
/* Homotopy at lambda = 1 against an oracle. Returns SPLITEQ_VERIFY_FAILED on a mismatch. */
SPLITEQ_API spliteq_status spliteq_compare(const spliteq_game* g, spliteq_mode mode, char** report);
SPLITEQ_API spliteq_status spliteq_extract(const spliteq_game* g, const char* flow_doc, char** report);

#ifdef __cplusplus
}
#endif

#endif
