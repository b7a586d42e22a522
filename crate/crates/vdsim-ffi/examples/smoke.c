/* Minimal C consumer: build an SSH ring, punch a vacancy, dress the atom. */
#include "../include/vdsim.h"
#include <stdio.h>

int main(void) {
    VdsimBath *bath = NULL;
    if (vdsim_bath_ssh(32, 0.5, 0.0, 1.0, true, &bath) != VDSIM_STATUS_OK) {
        fprintf(stderr, "build: %s\n", vdsim_last_error());
        return 1;
    }
    printf("version %s, sites %zu\n", vdsim_version(), vdsim_bath_site_count(bath));

    VdsimVds vds;
    if (vdsim_vds_at(bath, 0, 0.0, 0.01, 1e-6, &vds) != VDSIM_STATUS_OK) {
        fprintf(stderr, "vds: %s\n", vdsim_last_error());
        return 1;
    }
    printf("dressed state at %.3e: theta %.6f rad, residual %.2e\n",
           vds.energy, vds.theta, vds.residual);

    int chern = 0;
    vdsim_chern_haldane(0.0, 0.1, 1.5707963267948966, 24, &chern);
    printf("haldane chern (topological point): %d\n", chern);

    vdsim_bath_free(bath);
    return 0;
}
