#include <math.h>
#include <stdio.h>
#include "qdt.h"

int main(void) {
    const size_t dims[2] = {2, 2};
    const double h = 0.70710678118654752;
    const double re[4] = {h, 0.0, 0.0, h};
    QdtState *s = NULL;
    if (qdt_state_new(dims, 2, re, NULL, 4, &s) != QDT_STATUS_OK) {
        fprintf(stderr, "%s\n", qdt_last_error());
        return 1;
    }
    QdtMeasurement m;
    QdtStatus st = qdt_entanglement_production(s, NULL, 2.0, &m);
    qdt_state_free(s);
    if (st != QDT_STATUS_OK) {
        fprintf(stderr, "%s\n", qdt_last_error());
        return 1;
    }
    printf("epsilon_formula=%.12f epsilon_variational=%.12f\n", m.epsilon_formula, m.epsilon_variational);
    return fabs(m.epsilon_variational - 1.0) < 1e-12 ? 0 : 1;
}
