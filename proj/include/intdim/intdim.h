/*
 * intdim: intrinsic dimension estimation and generalization-vs-ID regression.
 *
 * Plain C interface over the C++ core. Objects are opaque handles created by
 * intdim_*_create/load/... functions and released with the matching *_free.
 * Every fallible call returns an intdim_status; on failure a description is
 * available from intdim_last_error() on the calling thread until the next call.
 * Status values are stable and are used verbatim as CLI exit codes.
 */
#ifndef INTDIM_H
#define INTDIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32) || defined(__CYGWIN__)
#  ifdef INTDIM_BUILDING_LIBRARY
#    define INTDIM_API __declspec(dllexport)
#  else
#    define INTDIM_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__) || defined(__clang__)
#  define INTDIM_API __attribute__((visibility("default")))
#else
#  define INTDIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum intdim_status {
    INTDIM_OK = 0,
    INTDIM_ERR_INVALID_ARGUMENT = 1,
    INTDIM_ERR_INVALID_K = 2,
    INTDIM_ERR_DUPLICATE_POINTS = 3,
    INTDIM_ERR_DEGENERATE_NEIGHBORHOOD = 4,
    INTDIM_ERR_MALFORMED_MANIFEST = 5,
    INTDIM_ERR_INSUFFICIENT_CLASS = 6,
    INTDIM_ERR_UNREADABLE_IMAGE = 7,
    INTDIM_ERR_INCONSISTENT_DIMS = 8,
    INTDIM_ERR_SPEC_INVALID = 9,
    INTDIM_ERR_DEGENERATE_DESIGN = 10,
    INTDIM_ERR_TOO_FEW_RECORDS = 11,
    INTDIM_ERR_IO = 12,
    INTDIM_ERR_NON_FINITE_DATA = 13,
    INTDIM_ERR_MALFORMED_RESULTS = 14,
    INTDIM_ERR_INTERNAL = 70
} intdim_status;

typedef struct intdim_matrix intdim_matrix;
typedef struct intdim_neighbors intdim_neighbors;
typedef struct intdim_estimate intdim_estimate;
typedef struct intdim_collection intdim_collection;
typedef struct intdim_records intdim_records;
typedef struct intdim_fit intdim_fit;
typedef struct intdim_group_fits intdim_group_fits;

/* ---- library ---------------------------------------------------------- */

INTDIM_API const char* intdim_version(void);
INTDIM_API const char* intdim_status_name(intdim_status status);
/* Message for the last failed call on this thread; "" if none. */
INTDIM_API const char* intdim_last_error(void);
/* Index pairs (2 * count values, lower index first) from the last DUPLICATE_POINTS failure. */
INTDIM_API size_t intdim_last_duplicate_pairs(const uint64_t** pairs);

/* 0 restores the default (INTDIM_NUM_WORKERS, else hardware concurrency). */
INTDIM_API void intdim_set_num_workers(size_t workers);
INTDIM_API size_t intdim_num_workers(void);

/* ---- matrices --------------------------------------------------------- */

/* Copies n_points * n_dims row-major values. */
INTDIM_API intdim_status intdim_matrix_create(size_t n_points, size_t n_dims, const double* values,
                                              intdim_matrix** out);
/* Raw "MPRB" matrix files. */
INTDIM_API intdim_status intdim_matrix_load(const char* path, intdim_matrix** out);
INTDIM_API intdim_status intdim_matrix_save(const intdim_matrix* matrix, const char* path);
INTDIM_API size_t intdim_matrix_rows(const intdim_matrix* matrix);
INTDIM_API size_t intdim_matrix_cols(const intdim_matrix* matrix);
INTDIM_API const double* intdim_matrix_data(const intdim_matrix* matrix);
INTDIM_API void intdim_matrix_free(intdim_matrix* matrix);

/* ---- synthetic manifolds ---------------------------------------------- */

typedef enum intdim_manifold_kind {
    INTDIM_MANIFOLD_CUBE = 0,
    INTDIM_MANIFOLD_SPHERE = 1,
    INTDIM_MANIFOLD_GAUSSIAN = 2,
    INTDIM_MANIFOLD_SWISS_ROLL = 3
} intdim_manifold_kind;

typedef struct intdim_manifold_spec {
    intdim_manifold_kind kind;
    size_t intrinsic_dim;
    size_t ambient_dim;
    size_t n_points;
    uint64_t seed;
} intdim_manifold_spec;

/* Returns -1 for an unknown name. */
INTDIM_API int intdim_manifold_kind_from_name(const char* name);
INTDIM_API intdim_status intdim_synth_generate(const intdim_manifold_spec* spec, intdim_matrix** out);

/* ---- nearest neighbors ------------------------------------------------ */

/* Exact table of the k nearest neighbors of every row. block_rows = 0 picks a size. */
INTDIM_API intdim_status intdim_neighbors_build(const intdim_matrix* data, size_t k, size_t block_rows,
                                                intdim_neighbors** out);
/* Unoptimized O(N^2 d) reference with the same contract. */
INTDIM_API intdim_status intdim_neighbors_naive(const intdim_matrix* data, size_t k, intdim_neighbors** out);
INTDIM_API size_t intdim_neighbors_rows(const intdim_neighbors* table);
INTDIM_API size_t intdim_neighbors_k(const intdim_neighbors* table);
/* Row-major rows x k arrays. */
INTDIM_API const double* intdim_neighbors_distances(const intdim_neighbors* table);
INTDIM_API const uint64_t* intdim_neighbors_ids(const intdim_neighbors* table);
INTDIM_API void intdim_neighbors_free(intdim_neighbors* table);

/* ---- estimator -------------------------------------------------------- */

#define INTDIM_DEFAULT_K 20

/* bias_corrected != 0 selects the 1/(k-2) normalization. */
INTDIM_API intdim_status intdim_local_id(const intdim_neighbors* table, size_t point, int bias_corrected,
                                         double* out);
INTDIM_API intdim_status intdim_estimate_from_neighbors(const intdim_neighbors* table, int bias_corrected,
                                                        intdim_estimate** out);
INTDIM_API intdim_status intdim_estimate_dataset(const intdim_matrix* data, size_t k, int bias_corrected,
                                                 intdim_estimate** out);
INTDIM_API double intdim_estimate_global(const intdim_estimate* estimate);
INTDIM_API const double* intdim_estimate_per_point(const intdim_estimate* estimate);
INTDIM_API size_t intdim_estimate_rows(const intdim_estimate* estimate);
INTDIM_API size_t intdim_estimate_k(const intdim_estimate* estimate);
INTDIM_API void intdim_estimate_free(intdim_estimate* estimate);

/* ---- labeled collections ---------------------------------------------- */

typedef enum intdim_source_kind {
    INTDIM_SOURCE_IMAGE_PATH = 0,
    INTDIM_SOURCE_MATRIX_ROW = 1
} intdim_source_kind;

typedef enum intdim_channel_policy {
    INTDIM_CHANNELS_GRAYSCALE_AVERAGE = 0,
    INTDIM_CHANNELS_FIRST = 1,
    INTDIM_CHANNELS_KEEP_ALL = 2
} intdim_channel_policy;

typedef struct intdim_preprocess {
    size_t height;
    size_t width;
    intdim_channel_policy channels;
} intdim_preprocess;

/* 224 x 224, grayscale average. */
INTDIM_API intdim_preprocess intdim_preprocess_default(void);
/* Returns -1 for an unknown name. */
INTDIM_API int intdim_channel_policy_from_name(const char* name);

/* Manifest CSV with header "path,label". */
INTDIM_API intdim_status intdim_collection_load(const char* manifest, intdim_source_kind kind,
                                                intdim_collection** out);
INTDIM_API size_t intdim_collection_size(const intdim_collection* coll);
INTDIM_API const char* intdim_collection_source(const intdim_collection* coll, size_t i);
/* Image path with the manifest directory applied; valid until the next call on this thread. */
INTDIM_API const char* intdim_collection_resolved_path(const intdim_collection* coll, size_t i);
INTDIM_API int intdim_collection_label(const intdim_collection* coll, size_t i);
INTDIM_API size_t intdim_collection_label_count(const intdim_collection* coll, int label);
/* total / 2 items per label; total must be even. */
INTDIM_API intdim_status intdim_collection_stratified_sample(const intdim_collection* coll, size_t total,
                                                             uint64_t seed, intdim_collection** out);
INTDIM_API intdim_status intdim_collection_uniform_sample(const intdim_collection* coll, size_t total,
                                                          uint64_t seed, intdim_collection** out);
/* Image collections read their files; row collections take rows of `source`. */
INTDIM_API intdim_status intdim_collection_vectorize(const intdim_collection* coll, const intdim_preprocess* spec,
                                                     const intdim_matrix* source, intdim_matrix** out);
INTDIM_API void intdim_collection_free(intdim_collection* coll);

/* ---- regression analysis ---------------------------------------------- */

typedef enum intdim_domain {
    INTDIM_DOMAIN_RADIOLOGICAL = 0,
    INTDIM_DOMAIN_NATURAL = 1,
    INTDIM_DOMAIN_OTHER = 2
} intdim_domain;

typedef enum intdim_fit_mode { INTDIM_FIT_SIMPLE = 0, INTDIM_FIT_MULTIPLE = 1 } intdim_fit_mode;

typedef enum intdim_group_by {
    INTDIM_GROUP_NONE = 0,
    INTDIM_GROUP_DOMAIN = 1,
    INTDIM_GROUP_MODEL_NTRAIN = 2
} intdim_group_by;

typedef struct intdim_record {
    const char* dataset;
    intdim_domain domain;
    double intrinsic_dim;
    double generalization_ability;
    size_t n_train;
    const char* model;
} intdim_record;

typedef struct intdim_fit_summary {
    double intercept;
    double slope_id;
    double slope_logn; /* 0 unless has_slope_logn */
    int has_slope_logn;
    double r_squared;
    int degenerate_response;
    size_t n_records;
} intdim_fit_summary;

typedef struct intdim_group_summary {
    size_t n_groups;
    double r_squared_mean;
    double r_squared_std;
    double slope_id_mean;
    double slope_id_std;
} intdim_group_summary;

INTDIM_API intdim_status intdim_records_create(intdim_records** out);
/* Results CSV: dataset,domain,intrinsic_dim,generalization_ability,n_train,model. */
INTDIM_API intdim_status intdim_records_load(const char* path, intdim_records** out);
INTDIM_API intdim_status intdim_records_add(intdim_records* records, const intdim_record* record);
INTDIM_API size_t intdim_records_size(const intdim_records* records);
/* Strings in `out` stay valid while the records handle is alive and unmodified. */
INTDIM_API intdim_status intdim_records_get(const intdim_records* records, size_t i, intdim_record* out);
INTDIM_API void intdim_records_free(intdim_records* records);

INTDIM_API intdim_status intdim_fit_records(const intdim_records* records, intdim_fit_mode mode, intdim_fit** out);
INTDIM_API void intdim_fit_get_summary(const intdim_fit* fit, intdim_fit_summary* out);
/* n_records residuals in record order. */
INTDIM_API const double* intdim_fit_residuals(const intdim_fit* fit);
INTDIM_API void intdim_fit_free(intdim_fit* fit);

INTDIM_API intdim_status intdim_group_fits_compute(const intdim_records* records, intdim_group_by group_by,
                                                   intdim_fit_mode mode, intdim_group_fits** out);
INTDIM_API size_t intdim_group_fits_count(const intdim_group_fits* groups);
INTDIM_API const char* intdim_group_fits_name(const intdim_group_fits* groups, size_t g);
/* Borrowed; owned by `groups`. */
INTDIM_API const intdim_fit* intdim_group_fits_fit(const intdim_group_fits* groups, size_t g);
/* Record indices of group g, ascending, aligned with the group's residuals. */
INTDIM_API size_t intdim_group_fits_members(const intdim_group_fits* groups, size_t g, const size_t** indices);
INTDIM_API void intdim_group_fits_summary(const intdim_group_fits* groups, intdim_group_summary* out);
INTDIM_API void intdim_group_fits_free(intdim_group_fits* groups);

#ifdef __cplusplus
}
#endif

#endif
