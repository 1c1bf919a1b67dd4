/* C interface to the thin obstacle laboratory.
 *
 * All pipeline entry points return a status code and, on success, an opaque
 * report handle.  The report owns its strings; they stay valid until
 * tf_report_free.  On failure *out is left untouched and tf_last_error()
 * carries a message for the calling thread.
 */

#ifndef THINFREE_H
#define THINFREE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TF_API __declspec(dllexport)
#else
#define TF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tf_status {
    TF_OK = 0,
    TF_ERR_ARGUMENT = 1, /* invalid input or configuration */
    TF_ERR_RUNTIME = 2   /* solve failed, cap exhausted, or I/O error */
} tf_status;

typedef struct tf_params {
    double L;      /* half-width of the box */
    double h;      /* grid spacing; L/h must be integral */
    double omega;  /* relaxation factor in (0,2) */
    double tol;    /* max-update convergence tolerance */
    double tau_c;  /* contact band; 0 selects the default 10*h^2 */
    int64_t max_sweeps; /* 0 selects the solver default */
    int sweep;     /* 0 lexicographic, 1 red-black */
    int threads;   /* workers for red-black sweeps */
    const char* artifact_dir; /* NULL or "": write no rasters */
} tf_params;

/* Fill the desk-scale defaults (L=4, h=1/16, tol=1e-8, ...). */
TF_API void tf_params_init(tf_params* p);

TF_API const char* tf_version(void);

/* Message for the last failing call on this thread; "" when none. */
TF_API const char* tf_last_error(void);

typedef struct tf_report tf_report;

/* Canned experiment with pinned parameters; only artifact_dir is read from
 * p (which may be NULL).  tf_example_name enumerates valid names. */
TF_API tf_status tf_run_example(const char* name, const tf_params* p, tf_report** out);
TF_API const char* tf_example_name(size_t idx); /* NULL past the end */

/* Contact-set run with obstacle -poly; poly is parsed in n variables. */
TF_API tf_status tf_run_compact(const char* poly, int n, const tf_params* p, tf_report** out);

/* Positivity-set run for boundary data -|z| q with plane trace poly. */
TF_API tf_status tf_run_positivity(const char* poly, int n, const tf_params* p, tf_report** out);

/* Zero-set-of-f contact prescription; large_k selects the eps-dependent
 * profile degree instead of the degree read off f. */
TF_API tf_status tf_run_polysets(const char* poly, int n, double eps, int large_k,
                                 const tf_params* p, tf_report** out);

/* Sublevel-set contact prescription {f <= -delta} via the obstacle ladder. */
TF_API tf_status tf_run_subsets(const char* poly, int n, double delta, const tf_params* p,
                                tf_report** out);

/* Approximate the point cloud xy (x0,y0,x1,y1,... npoints pairs) by a
 * contact set to within 2*eps in Hausdorff distance. */
TF_API tf_status tf_run_approx(const double* xy, size_t npoints, double eps, const tf_params* p,
                               tf_report** out);

/* Randomized property suite (solver-vs-oracle, ordering, symmetry). */
TF_API tf_status tf_run_verify(uint64_t seed, int trials, int pairs, tf_report** out);

TF_API int tf_report_pass(const tf_report* r);
TF_API const char* tf_report_name(const tf_report* r);
TF_API const char* tf_report_json(const tf_report* r);        /* canonical dump */
TF_API const char* tf_report_params_hash(const tf_report* r); /* 16 hex chars */
TF_API void tf_report_free(tf_report* r);

/* Critical rescaling radius of the degree-k profile in n+1 dimensions. */
TF_API tf_status tf_rho_bar(int k, int n, double* out);

/* Append "name,hash,pass,wall_ms" to dir/runs.csv (header on creation). */
TF_API tf_status tf_manifest_append(const char* dir, const tf_report* r, double wall_ms);

#ifdef __cplusplus
}
#endif

#endif /* THINFREE_H */
