#ifndef VDSIM_H
#define VDSIM_H

/* Generated by cbindgen from vdsim-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum VdsimStatus {
  VDSIM_STATUS_OK = 0,
  VDSIM_STATUS_NULL_ARGUMENT = 1,
  VDSIM_STATUS_INVALID_ARGUMENT = 2,
  VDSIM_STATUS_NO_SUCH_STATE = 3,
  VDSIM_STATUS_NUMERICAL_FAILURE = 4,
} VdsimStatus;

/**
 * Opaque bath-graph handle.
 */
typedef struct VdsimBath VdsimBath;

/**
 * Dressed-state summary: the atom-frequency eigenvalue that was dressed,
 * the mixing angles, and the full-Hamiltonian eigen-residual.
 */
typedef struct VdsimVds {
  double energy;
  double theta;
  double phi;
  double residual;
} VdsimVds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *vdsim_last_error(void);

/**
 * Library version as a static string (do not free).
 */
const char *vdsim_version(void);

/**
 * Release a string allocated by this library.
 *
 * # Safety
 * `s` must have been returned by a vdsim function and not freed before.
 */
void vdsim_string_free(char *s);

/**
 * Release a bath handle.
 *
 * # Safety
 * `bath` must have been returned by a vdsim constructor and not freed
 * before.
 */
void vdsim_bath_free(struct VdsimBath *bath);

/**
 * Tight-binding chain with −J hopping (dispersion ω_c − 2J cos k).
 */
enum VdsimStatus vdsim_bath_chain(uintptr_t sites,
                                  double omega_c,
                                  double j,
                                  bool periodic,
                                  struct VdsimBath **out);

/**
 * SSH chain: intracell J(1−δ), intercell J(1+δ).
 */
enum VdsimStatus vdsim_bath_ssh(uintptr_t cells,
                                double delta,
                                double omega_c,
                                double j,
                                bool periodic,
                                struct VdsimBath **out);

/**
 * Creutz ladder: vertical −2mJ, diagonal J, horizontals J e^{∓iα}.
 */
enum VdsimStatus vdsim_bath_creutz(uintptr_t cells,
                                   double m,
                                   double alpha,
                                   double omega_c,
                                   double j,
                                   bool periodic,
                                   struct VdsimBath **out);

/**
 * Haldane honeycomb with bandgap ||m| − 3√3 t|sinφ|| J.
 */
enum VdsimStatus vdsim_bath_haldane(uintptr_t nx,
                                    uintptr_t ny,
                                    double m,
                                    double t,
                                    double phi,
                                    double omega_c,
                                    double j,
                                    bool periodic,
                                    struct VdsimBath **out);

/**
 * Parse a bath from its JSON schema.
 *
 * # Safety
 * `json` must be a valid NUL-terminated UTF-8 string.
 */
enum VdsimStatus vdsim_bath_from_json(const char *json, struct VdsimBath **out);

/**
 * Serialize a bath to its JSON schema; the returned string is owned by the
 * caller (release with `vdsim_string_free`).
 *
 * # Safety
 * `bath` must be a live handle from this library.
 */
char *vdsim_bath_to_json(const struct VdsimBath *bath);

/**
 * Number of cavities.
 *
 * # Safety
 * `bath` must be a live handle from this library.
 */
uintptr_t vdsim_bath_site_count(const struct VdsimBath *bath);

/**
 * New bath with `site` deleted along with every coupling touching it.
 *
 * # Safety
 * `bath` must be a live handle from this library.
 */
enum VdsimStatus vdsim_bath_remove_site(const struct VdsimBath *bath,
                                        uintptr_t site,
                                        struct VdsimBath **out);

/**
 * Ascending eigenvalues of the bath Hamiltonian. `values` must hold
 * `vdsim_bath_site_count(bath)` doubles.
 *
 * # Safety
 * `bath` must be a live handle; `values` must point to enough space.
 */
enum VdsimStatus vdsim_bath_eigenvalues(const struct VdsimBath *bath,
                                        double *values,
                                        uintptr_t len);

/**
 * Dress an atom (frequency ω₀, coupling g, attached at `site`) with the
 * vacancy eigenstate nearest ω₀. Fails with `NoSuchState` when the vacancy
 * spectrum has no level within `tol` of ω₀.
 *
 * # Safety
 * `bath` must be a live handle; `out` must point to a `VdsimVds`.
 */
enum VdsimStatus vdsim_vds_at(const struct VdsimBath *bath,
                              uintptr_t site,
                              double omega0,
                              double g,
                              double tol,
                              struct VdsimVds *out);

/**
 * Chern number of the lower Haldane band (k-grid `nk` × `nk`).
 */
enum VdsimStatus vdsim_chern_haldane(double m, double t, double phi, uintptr_t nk, int32_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VDSIM_H */
