#include <math.h>
#include <stdio.h>
#include <string.h>

#include "archetype.h"

#define CHECK(cond)                                                     \
    do {                                                                \
        if (!(cond)) {                                                  \
            fprintf(stderr, "check failed at line %d: %s (%s)\n",       \
                    __LINE__, #cond, archetype_last_error_message());   \
            return 1;                                                   \
        }                                                               \
    } while (0)

int main(void) {
    /* Unit square corners plus its centre; three archetypes. */
    double points[] = {0, 0, 1, 0, 1, 1, 0, 1, 0.5, 0.5};
    ArchetypeOptions opts = archetype_options_default();
    opts.seed = 3;

    ArchetypeFit *fit = NULL;
    CHECK(archetype_fit(points, 5, 2, 3, NULL, &opts, &fit) == ARCHETYPE_STATUS_OK);
    CHECK(fit != NULL);

    size_t k = 0, dim = 0, iters = 0, trace_len = 0;
    bool converged = false;
    CHECK(archetype_fit_info(fit, &k, &dim, &iters, &trace_len, &converged) == ARCHETYPE_STATUS_OK);
    CHECK(k == 3 && dim == 2 && trace_len == iters + 1);

    double z[6];
    CHECK(archetype_fit_archetypes(fit, z, 5) == ARCHETYPE_STATUS_BUFFER_TOO_SMALL);
    CHECK(strlen(archetype_last_error_message()) > 0);
    CHECK(archetype_fit_archetypes(fit, z, 6) == ARCHETYPE_STATUS_OK);
    for (int i = 0; i < 6; i++) {
        CHECK(z[i] >= -1e-9 && z[i] <= 1 + 1e-9);
    }
    double f = -1;
    CHECK(archetype_fit_objective(fit, &f) == ARCHETYPE_STATUS_OK);
    CHECK(f >= 0);
    archetype_fit_free(fit);

    double v[] = {0.2, 0.9, -0.4}, w[3];
    CHECK(archetype_project_simplex(v, 3, w) == ARCHETYPE_STATUS_OK);
    CHECK(fabs(w[0] + w[1] + w[2] - 1) < 1e-12);

    double s = 0;
    CHECK(archetype_sector_integral(3.141592653589793, &s) == ARCHETYPE_STATUS_OK);
    CHECK(fabs(s - 0.125) < 1e-15);
    CHECK(archetype_sector_integral(-1, &s) == ARCHETYPE_STATUS_INVALID_ARGUMENT);

    CHECK(archetype_fit(NULL, 5, 2, 3, NULL, NULL, &fit) == ARCHETYPE_STATUS_NULL_POINTER);
    CHECK(fit == NULL);

    printf("ok %s\n", archetype_version());
    return 0;
}
