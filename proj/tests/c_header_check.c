/* Compiles the public header as C and makes a round trip through the library. */
#include <stdio.h>

#include "intdim/intdim.h"

int main(void) {
    const double values[] = {0.0, 1.0, 3.0, 7.0};
    intdim_matrix* m = NULL;
    intdim_neighbors* table = NULL;
    if (intdim_matrix_create(4, 1, values, &m) != INTDIM_OK) {
        fprintf(stderr, "create: %s\n", intdim_last_error());
        return 1;
    }
    if (intdim_neighbors_build(m, 2, 0, &table) != INTDIM_OK) {
        fprintf(stderr, "build: %s\n", intdim_last_error());
        return 1;
    }
    int ok = intdim_neighbors_ids(table)[0] == 1 && intdim_neighbors_distances(table)[1] == 3.0;
    intdim_neighbors_free(table);
    intdim_matrix_free(m);
    printf("%s %s\n", intdim_version(), ok ? "ok" : "mismatch");
    return ok ? 0 : 1;
}
