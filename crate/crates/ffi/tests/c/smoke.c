/* Exercises the C interface end to end; prints one line per step. */
#include <stdio.h>
#include <string.h>

#include "quadef.h"

static const char *IDEAL_POINT =
    "ambient_dim = 2\n"
    "sign = +\n"
    "[level 0]\n"
    "twists = -1, -1\n"
    "[level -1]\n"
    "twists = -2\n"
    "differential =\n"
    "  | x1 |\n"
    "  | -x0 |\n"
    "[pairing]\n"
    "  | x0^2, x0*x1 |\n"
    "  | x0*x1, x1^2 |\n";

static const char *BROKEN = "ambient_dim = 2\nsign = +\n[level 0]\ntwists = 0\n[pairing]\n  | x0^ |\n";

int main(void) {
    QuadefSheaf *s = NULL;
    size_t h[3];
    char *json = NULL;

    printf("version %s\n", quadef_version());
    if (quadef_sheaf_parse(IDEAL_POINT, &s) != QUADEF_STATUS_OK) return 10;
    if (quadef_sheaf_validate(s) != QUADEF_STATUS_OK) return 11;
    if (quadef_hypercohomology(s, 0, h) != QUADEF_STATUS_OK) return 12;
    printf("h = %zu %zu %zu\n", h[0], h[1], h[2]);
    if (quadef_report_json(s, 0, &json) != QUADEF_STATUS_OK) return 13;
    if (strstr(json, "\"schema_version\": 1") == NULL) return 14;
    quadef_string_free(json);
    if (quadef_realize_json(s, 5, 0, &json) != QUADEF_STATUS_INVALID) return 15;
    printf("realize 5: %s\n", quadef_last_error_kind());
    quadef_sheaf_free(s);

    s = NULL;
    if (quadef_sheaf_parse(BROKEN, &s) != QUADEF_STATUS_PARSE || s != NULL) return 16;
    printf("broken: %s\n", quadef_last_error_kind());
    return 0;
}
