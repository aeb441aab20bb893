/* Copyright 2026 The lswap authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C API of the lswap shared library: linear-swap-regret minimization and
 * linear correlated equilibria for oracle-described convex games.
 *
 * All objects are opaque handles created and destroyed by this library.
 * Every fallible call returns an lsw_status; on failure,
 * lsw_last_error() describes the problem (thread-local storage).
 * Strings returned through char** are owned by the caller and must be
 * released with lsw_string_free().
 */

#ifndef LSWAP_H
#define LSWAP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lsw_status {
  LSW_OK = 0,
  LSW_ERR_INVALID_ARGUMENT = 1,
  LSW_ERR_PARSE = 2,
  LSW_ERR_DIMENSION = 3,
  LSW_ERR_NUMERICAL = 4,
  LSW_ERR_UNSUPPORTED = 5,
  LSW_ERR_INTERNAL = 6
} lsw_status;

typedef struct lsw_body lsw_body;
typedef struct lsw_learner lsw_learner;
typedef struct lsw_ogd lsw_ogd;
typedef struct lsw_game lsw_game;
typedef struct lsw_solution lsw_solution;

const char* lsw_version(void);
const char* lsw_last_error(void);
void lsw_string_free(char* s);

/* ---- convex bodies -------------------------------------------------- */

lsw_status lsw_body_from_json(const char* json, lsw_body** out);
lsw_status lsw_body_to_json(const lsw_body* body, char** out_json);
void lsw_body_free(lsw_body* body);
int lsw_body_dim(const lsw_body* body);

lsw_status lsw_body_membership(const lsw_body* body, const double* x, int n,
                               double tol, int* out_member);
/* out_inside=1: x in the body; otherwise normal_out (length n) and
 * offset_out describe a halfspace containing the body and excluding x. */
lsw_status lsw_body_separate(const lsw_body* body, const double* x, int n,
                             double tol, int* out_inside, double* normal_out,
                             double* offset_out);
lsw_status lsw_body_linopt(const lsw_body* body, const double* c, int n,
                           double tol, double* x_out, double* value_out);
lsw_status lsw_body_project(const lsw_body* body, const double* y, int n,
                            double tol, double* x_out);
/* minimizes 0.5*||M x + b||^2; M is n*n row-major. */
lsw_status lsw_body_quadmin(const lsw_body* body, const double* M,
                            const double* b, int n, double tol, double* x_out,
                            double* value_out);

/* ---- linear-swap regret minimization -------------------------------- */

lsw_status lsw_learner_new(const lsw_body* body, long horizon, double fp_tol,
                           lsw_learner** out);
lsw_status lsw_learner_next(const lsw_learner* learner, double* play_out);
lsw_status lsw_learner_observe(lsw_learner* learner, const double* loss, int n);
void lsw_learner_free(lsw_learner* learner);

lsw_status lsw_ogd_new(const lsw_body* body, long horizon, lsw_ogd** out);
lsw_status lsw_ogd_next(const lsw_ogd* learner, double* play_out);
lsw_status lsw_ogd_observe(lsw_ogd* learner, const double* loss, int n);
void lsw_ogd_free(lsw_ogd* learner);

/* Exact linear-swap regret of a play/loss history over the body's
 * endomorphisms (simplex or H-polytope bodies). plays/losses are T*n
 * row-major. */
lsw_status lsw_exact_linswap_regret(const lsw_body* body, const double* plays,
                                    const double* losses, long rounds,
                                    double* regret_out, double* best_value_out,
                                    double* realized_out);

/* ---- convex games and equilibria ------------------------------------ */

lsw_status lsw_game_from_json(const char* json, lsw_game** out);
lsw_status lsw_game_to_json(const lsw_game* game, char** out_json);
void lsw_game_free(lsw_game* game);
int lsw_game_players(const lsw_game* game);
int lsw_game_dim(const lsw_game* game, int player);
lsw_status lsw_game_body(const lsw_game* game, int player, lsw_body** out);
/* profile: concatenated per-player strategies (sum of dims); g_out must hold
 * dim(player)+1 entries (leading entry = constant term). */
lsw_status lsw_game_gradient(const lsw_game* game, int player,
                             const double* profile, int profile_len,
                             double* g_out);
lsw_status lsw_game_utility(const lsw_game* game, int player,
                            const double* profile, int profile_len,
                            double* u_out);

lsw_status lsw_compute_lce(const lsw_game* game, double eps,
                           lsw_solution** out);
lsw_status lsw_solution_new(const lsw_game* game, const double* atoms,
                            long n_atoms, const double* weights,
                            lsw_solution** out);
lsw_status lsw_solution_from_json(const char* json, lsw_solution** out);
lsw_status lsw_solution_to_json(const lsw_solution* solution, char** out_json);
long lsw_solution_atom_count(const lsw_solution* solution);
lsw_status lsw_solution_weight(const lsw_solution* solution, long atom,
                               double* w_out);
lsw_status lsw_solution_strategy(const lsw_solution* solution, long atom,
                                 int player, double* x_out);
void lsw_solution_free(lsw_solution* solution);

lsw_status lsw_lce_gap(const lsw_solution* solution, const lsw_game* game,
                       int player, double* gap_out);

/* ---- hardness demonstration ----------------------------------------- */

/* Builds the capped-ball witness in dimension d >= 2 and reports (as JSON)
 * the negative-scaling map's spectral norm, its ball-endomorphism check, its
 * capped-ball violation at the witness point, the fixed point returned by
 * semi-separation on both bodies, and the disjoint-cap family size. */
lsw_status lsw_demo_hardness(int d, char** report_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LSWAP_H */
