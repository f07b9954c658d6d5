#include <math.h>
#include <stdio.h>

#include "tuplenorm.h"

static const char *DOC =
    "{\"domain\": {\"dim\": 2, \"p\": 2}, \"outer_p\": \"inf\","
    " \"T\": [{\"codomain\": {\"dim\": 2, \"p\": 2}, \"matrix\": [[1, 0], [0, 1]]},"
    "        {\"codomain\": {\"dim\": 2, \"p\": 2}, \"matrix\": [[0.5, 0], [0, 0.5]]}],"
    " \"S\": [{\"codomain\": {\"dim\": 2, \"p\": 2}, \"matrix\": [[0, 1], [0, 0]]},"
    "        {\"codomain\": {\"dim\": 2, \"p\": 2}, \"matrix\": [[1, 0], [0, 1]]}]}";

int main(void) {
    TnInstance *golden = NULL;
    double dist = 0.0, lo = 0.0, hi = 0.0;
    if (tn_instance_golden(&golden) != TN_STATUS_OK) return 1;
    if (tn_dist(golden, NULL, &dist) != TN_STATUS_OK) return 2;
    if (fabs(dist - sqrt(5.0) / 2.0) > 1e-6) return 3;
    tn_instance_free(golden);

    TnInstance *inst = NULL;
    if (tn_instance_from_json(DOC, &inst) != TN_STATUS_OK) return 4;
    int orthogonal = 0, certified = 0;
    double margin = 0.0;
    TnOptions opts = {42, 0, 0.0};
    if (tn_bj(inst, &opts, &orthogonal, &margin, &certified) != TN_STATUS_OK) return 5;
    if (tn_rho(inst, &opts, &lo, &hi) != TN_STATUS_OK || lo > hi + 1e-9) return 6;
    char *json = NULL;
    if (tn_report_json(inst, TN_COMMAND_NORM, NULL, &json) != TN_STATUS_OK) return 7;
    tn_string_free(json);
    if (tn_report_json(inst, 99, NULL, &json) != TN_STATUS_INVALID_ARGUMENT) return 8;
    tn_instance_free(inst);

    TnInstance *bad = NULL;
    if (tn_instance_from_json("{\"domain\": 3}", &bad) != TN_STATUS_PARSE) return 9;
    printf("orthogonal=%d certified=%d margin=%.3e rho=[%.6f, %.6f] error=%s\n",
           orthogonal, certified, margin, lo, hi, tn_last_error());
    return 0;
}
