/* C ABI for the qsteer two-qubit steering and discord library.
 *
 * States are opaque handles; create them with one of the qsteer_state_*
 * constructors, release them with qsteer_state_free. All functions return a
 * status code (QSTEER_OK on success) and write results through out
 * parameters. Directions are unit 3-vectors, correlation matrices are 3x3
 * row-major, entropic quantities are in bits.
 */

#ifndef QSTEER_H
#define QSTEER_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. */
#define QSTEER_OK 0
#define QSTEER_ERR_NULL_ARGUMENT 1
#define QSTEER_ERR_PARSE 2
#define QSTEER_ERR_NON_PHYSICAL 3
#define QSTEER_ERR_NUMERIC 4
#define QSTEER_ERR_SINGULAR_FILTER 5
#define QSTEER_ERR_DEGENERATE_OUTCOME 6
#define QSTEER_ERR_OUT_OF_DOMAIN 7
#define QSTEER_ERR_PURE_BOB_MARGINAL 8

/* Branch codes reported by qsteer_max_distance / qsteer_report. */
#define QSTEER_BRANCH_CANONICAL 0
#define QSTEER_BRANCH_Y_EIGVEC 1
#define QSTEER_BRANCH_XSTATE_SIGMA_Z 2
#define QSTEER_BRANCH_XSTATE_SIGMA_X 3
#define QSTEER_BRANCH_XSTATE_INTERIOR 4
#define QSTEER_BRANCH_NUMERIC 5

/* Opaque two-qubit state handle. */
typedef struct QsteerState QsteerState;

/* Flat correlation report. */
typedef struct QsteerReport {
    double mutual_info;
    double classical_corr;
    double discord;
    double q_star;
    double n_discord[3];
    double n_star[3];
    int32_t branch;
} QsteerReport;

/* Constructors. x, y: length 3; t: length 9 row-major. */
int32_t qsteer_state_from_bloch(const double *x, const double *y,
                                const double *t, QsteerState **out);

/* JSON text in either accepted state-file shape. */
int32_t qsteer_state_from_json(const char *text, QsteerState **out);

/* Two-parameter X-state family, 0 <= a <= 1, a - 1 <= b <= 1 - a. */
int32_t qsteer_two_param_state(double a, double b, QsteerState **out);

void qsteer_state_free(QsteerState *state);

/* Accessors and computations. */
int32_t qsteer_state_bloch(const QsteerState *state, double *x, double *y,
                           double *t);

int32_t qsteer_max_distance(const QsteerState *state, double *value,
                            double *direction, int32_t *branch);

int32_t qsteer_discord(const QsteerState *state, double *value,
                       double *direction);

int32_t qsteer_q_star(const QsteerState *state, double *value,
                      double *direction);

int32_t qsteer_mutual_information(const QsteerState *state, double *value);

int32_t qsteer_is_zero_discord(const QsteerState *state, int32_t *result);

int32_t qsteer_report(const QsteerState *state, QsteerReport *report);

/* Static strings; do not free. */
const char *qsteer_strerror(int32_t code);
const char *qsteer_version(void);

#ifdef __cplusplus
}
#endif

#endif /* QSTEER_H */
