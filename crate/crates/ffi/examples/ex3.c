#include <stdio.h>
#include "gme.h"

int main(void) {
    GmeState *s = NULL;
    GmeTensor *t = NULL;
    GmeCriterionReport r;
    if (gme_state_ex3(1.0, &s) != GME_STATUS_OK || gme_tensor_compute(s, &t) != GME_STATUS_OK) {
        fprintf(stderr, "%s\n", gme_last_error());
        return 1;
    }
    for (uint32_t k = 1; k <= 8; k++) {
        gme_kyfan_criterion(t, k, &r);
        printf("k=%u value=%.6f bound=%.6f detected=%d\n", k, r.value, r.bound, r.detected);
    }
    gme_concurrence_bound(t, &r);
    printf("concurrence >= %.6f\n", r.concurrence_lower_bound);
    gme_tensor_free(t);
    gme_state_free(s);
    return 0;
}
