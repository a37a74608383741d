#include <stdio.h>
#include "satake_density.h"

int main(void) {
    SdPrimeTable *table = NULL;
    if (sd_sieve(1000000, &table) != SD_STATUS_OK) return 1;
    if (sd_prime_table_len(table) != 78498) return 2;

    SdAssignment *a = NULL;
    if (sd_assignment_build(table, SD_SAMPLER_KIND_EXTREMAL_CONSTANT, 2, 4.0, 0, &a) != SD_STATUS_OK) return 3;
    double r = 0.0;
    if (sd_exceptional_dirichlet_ratio(a, 4.0, SD_MODE_ABS, 1.01, &r) != SD_STATUS_OK || r != 1.0) return 4;

    uint64_t b = 0;
    if (sd_coeff_bound(SD_FACTOR_KIND_SPIN, 1, 7, &b) != SD_STATUS_OK || b != 8) return 5;
    if (sd_sieve(10, NULL) != SD_STATUS_NULL_POINTER) return 6;
    printf("%s\n", sd_last_error_message());

    sd_assignment_free(a);
    sd_prime_table_free(table);
    return 0;
}
