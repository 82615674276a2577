#include "intdim/intdim.h"

#include <memory>
#include <new>
#include <string>
#include <vector>

#include "intdim/analysis.hpp"
#include "intdim/error.hpp"
#include "intdim/estimator.hpp"
#include "intdim/ingest.hpp"
#include "intdim/knn.hpp"
#include "intdim/parallel.hpp"
#include "intdim/synthetic.hpp"

#ifndef INTDIM_VERSION_STRING
#define INTDIM_VERSION_STRING "0.0.0"
#endif

struct intdim_matrix {
    intdim::DataMatrix value;
};
struct intdim_neighbors {
    intdim::NeighborTable value;
};
struct intdim_estimate {
    intdim::IdEstimate value;
};
struct intdim_collection {
    intdim::LabeledCollection value;
};
struct intdim_records {
    std::vector<intdim::ExperimentRecord> value;
};
struct intdim_fit {
    intdim::RegressionFit value;
};
struct intdim_group_fits {
    intdim::GroupedFits value;
    std::vector<std::string> names;
    std::vector<intdim_fit> fits;
    std::vector<std::vector<std::size_t>> members;
};

namespace {

thread_local std::string last_error;
thread_local std::vector<std::uint64_t> last_pairs;
thread_local std::string scratch_path;

template <typename Fn>
intdim_status guarded(Fn&& fn) noexcept {
    last_error.clear();
    last_pairs.clear();
    try {
        fn();
        return INTDIM_OK;
    } catch (const intdim::DuplicatePointsError& e) {
        last_error = e.what();
        for (const auto& [a, b] : e.pairs()) {
            last_pairs.push_back(a);
            last_pairs.push_back(b);
        }
        return INTDIM_ERR_DUPLICATE_POINTS;
    } catch (const intdim::Error& e) {
        last_error = e.what();
        return static_cast<intdim_status>(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return INTDIM_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return INTDIM_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return INTDIM_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) {
        throw intdim::Error(intdim::ErrorCode::InvalidArgument, what);
    }
}

intdim::EstimatorOptions estimator_options(int bias_corrected) {
    return {bias_corrected ? intdim::Normalization::BiasCorrected : intdim::Normalization::Standard};
}

intdim::ExperimentRecord to_record(const intdim_record& r) {
    require(r.domain >= INTDIM_DOMAIN_RADIOLOGICAL && r.domain <= INTDIM_DOMAIN_OTHER, "unknown domain");
    intdim::ExperimentRecord out;
    out.dataset = r.dataset ? r.dataset : "";
    out.domain = static_cast<intdim::DomainTag>(r.domain);
    out.intrinsic_dim = r.intrinsic_dim;
    out.generalization_ability = r.generalization_ability;
    out.n_train = r.n_train;
    out.model = r.model ? r.model : "";
    intdim::validate(out);
    return out;
}

} // namespace

extern "C" {

const char* intdim_version(void) { return INTDIM_VERSION_STRING; }

const char* intdim_status_name(intdim_status status) {
    if (status == INTDIM_OK) {
        return "Ok";
    }
    return intdim::error_code_name(static_cast<intdim::ErrorCode>(status));
}

const char* intdim_last_error(void) { return last_error.c_str(); }

size_t intdim_last_duplicate_pairs(const uint64_t** pairs) {
    if (pairs) {
        *pairs = last_pairs.data();
    }
    return last_pairs.size() / 2;
}

void intdim_set_num_workers(size_t workers) { intdim::set_num_workers(workers); }
size_t intdim_num_workers(void) { return intdim::num_workers(); }

intdim_status intdim_matrix_create(size_t n_points, size_t n_dims, const double* values, intdim_matrix** out) {
    return guarded([&] {
        require(out && values, "null argument");
        std::vector<double> copy(values, values + n_points * n_dims);
        *out = new intdim_matrix{intdim::DataMatrix(n_points, n_dims, std::move(copy))};
    });
}

intdim_status intdim_matrix_load(const char* path, intdim_matrix** out) {
    return guarded([&] {
        require(out && path, "null argument");
        *out = new intdim_matrix{intdim::read_raw_matrix(path)};
    });
}

intdim_status intdim_matrix_save(const intdim_matrix* matrix, const char* path) {
    return guarded([&] {
        require(matrix && path, "null argument");
        intdim::write_raw_matrix(matrix->value, path);
    });
}

size_t intdim_matrix_rows(const intdim_matrix* matrix) { return matrix ? matrix->value.n_points() : 0; }
size_t intdim_matrix_cols(const intdim_matrix* matrix) { return matrix ? matrix->value.n_dims() : 0; }
const double* intdim_matrix_data(const intdim_matrix* matrix) {
    return matrix ? matrix->value.values().data() : nullptr;
}
void intdim_matrix_free(intdim_matrix* matrix) { delete matrix; }

int intdim_manifold_kind_from_name(const char* name) {
    if (!name) {
        return -1;
    }
    const auto kind = intdim::parse_manifold_kind(name);
    return kind ? static_cast<int>(*kind) : -1;
}

intdim_status intdim_synth_generate(const intdim_manifold_spec* spec, intdim_matrix** out) {
    return guarded([&] {
        require(spec && out, "null argument");
        if (spec->kind < INTDIM_MANIFOLD_CUBE || spec->kind > INTDIM_MANIFOLD_SWISS_ROLL) {
            throw intdim::Error(intdim::ErrorCode::SpecInvalid, "unknown manifold kind");
        }
        intdim::ManifoldSpec s;
        s.kind = static_cast<intdim::ManifoldKind>(spec->kind);
        s.intrinsic_dim = spec->intrinsic_dim;
        s.ambient_dim = spec->ambient_dim;
        s.n_points = spec->n_points;
        s.seed = spec->seed;
        *out = new intdim_matrix{intdim::generate(s)};
    });
}

intdim_status intdim_neighbors_build(const intdim_matrix* data, size_t k, size_t block_rows,
                                     intdim_neighbors** out) {
    return guarded([&] {
        require(data && out, "null argument");
        intdim::KnnOptions options;
        options.block_rows = block_rows;
        *out = new intdim_neighbors{intdim::build_neighbor_table(data->value, k, options)};
    });
}

intdim_status intdim_neighbors_naive(const intdim_matrix* data, size_t k, intdim_neighbors** out) {
    return guarded([&] {
        require(data && out, "null argument");
        *out = new intdim_neighbors{intdim::naive_neighbor_table(data->value, k)};
    });
}

size_t intdim_neighbors_rows(const intdim_neighbors* table) { return table ? table->value.n_points() : 0; }
size_t intdim_neighbors_k(const intdim_neighbors* table) { return table ? table->value.k() : 0; }
const double* intdim_neighbors_distances(const intdim_neighbors* table) {
    return table ? table->value.all_distances().data() : nullptr;
}
const uint64_t* intdim_neighbors_ids(const intdim_neighbors* table) {
    return table ? table->value.all_neighbor_ids().data() : nullptr;
}
void intdim_neighbors_free(intdim_neighbors* table) { delete table; }

intdim_status intdim_local_id(const intdim_neighbors* table, size_t point, int bias_corrected, double* out) {
    return guarded([&] {
        require(table && out, "null argument");
        *out = intdim::local_id(table->value, point, estimator_options(bias_corrected));
    });
}

intdim_status intdim_estimate_from_neighbors(const intdim_neighbors* table, int bias_corrected,
                                             intdim_estimate** out) {
    return guarded([&] {
        require(table && out, "null argument");
        *out = new intdim_estimate{intdim::global_id(table->value, estimator_options(bias_corrected))};
    });
}

intdim_status intdim_estimate_dataset(const intdim_matrix* data, size_t k, int bias_corrected,
                                      intdim_estimate** out) {
    return guarded([&] {
        require(data && out, "null argument");
        *out = new intdim_estimate{intdim::estimate_dataset(data->value, k, estimator_options(bias_corrected))};
    });
}

double intdim_estimate_global(const intdim_estimate* estimate) { return estimate ? estimate->value.global_id : 0.0; }
const double* intdim_estimate_per_point(const intdim_estimate* estimate) {
    return estimate ? estimate->value.per_point_ids.data() : nullptr;
}
size_t intdim_estimate_rows(const intdim_estimate* estimate) { return estimate ? estimate->value.n_points : 0; }
size_t intdim_estimate_k(const intdim_estimate* estimate) { return estimate ? estimate->value.k : 0; }
void intdim_estimate_free(intdim_estimate* estimate) { delete estimate; }

intdim_preprocess intdim_preprocess_default(void) { return {224, 224, INTDIM_CHANNELS_GRAYSCALE_AVERAGE}; }

int intdim_channel_policy_from_name(const char* name) {
    if (!name) {
        return -1;
    }
    const auto policy = intdim::parse_channel_policy(name);
    return policy ? static_cast<int>(*policy) : -1;
}

intdim_status intdim_collection_load(const char* manifest, intdim_source_kind kind, intdim_collection** out) {
    return guarded([&] {
        require(manifest && out, "null argument");
        require(kind == INTDIM_SOURCE_IMAGE_PATH || kind == INTDIM_SOURCE_MATRIX_ROW, "unknown source kind");
        *out = new intdim_collection{intdim::load_labels(manifest, static_cast<intdim::SourceKind>(kind))};
    });
}

size_t intdim_collection_size(const intdim_collection* coll) { return coll ? coll->value.size() : 0; }

const char* intdim_collection_source(const intdim_collection* coll, size_t i) {
    if (!coll || i >= coll->value.size()) {
        return nullptr;
    }
    return coll->value.items()[i].source_ref.c_str();
}

const char* intdim_collection_resolved_path(const intdim_collection* coll, size_t i) {
    if (!coll || i >= coll->value.size()) {
        return nullptr;
    }
    scratch_path = coll->value.resolve(i).string();
    return scratch_path.c_str();
}

int intdim_collection_label(const intdim_collection* coll, size_t i) {
    if (!coll || i >= coll->value.size()) {
        return -1;
    }
    return coll->value.items()[i].label;
}

size_t intdim_collection_label_count(const intdim_collection* coll, int label) {
    if (!coll || (label != 0 && label != 1)) {
        return 0;
    }
    return coll->value.label_counts()[static_cast<std::size_t>(label)];
}

intdim_status intdim_collection_stratified_sample(const intdim_collection* coll, size_t total, uint64_t seed,
                                                  intdim_collection** out) {
    return guarded([&] {
        require(coll && out, "null argument");
        *out = new intdim_collection{intdim::stratified_sample(coll->value, total, seed)};
    });
}

intdim_status intdim_collection_uniform_sample(const intdim_collection* coll, size_t total, uint64_t seed,
                                               intdim_collection** out) {
    return guarded([&] {
        require(coll && out, "null argument");
        *out = new intdim_collection{intdim::uniform_sample(coll->value, total, seed)};
    });
}

intdim_status intdim_collection_vectorize(const intdim_collection* coll, const intdim_preprocess* spec,
                                          const intdim_matrix* source, intdim_matrix** out) {
    return guarded([&] {
        require(coll && out, "null argument");
        if (coll->value.source_kind() == intdim::SourceKind::MatrixRow) {
            require(source != nullptr, "row collections need a source matrix");
            *out = new intdim_matrix{intdim::vectorize(coll->value, source->value)};
            return;
        }
        require(spec != nullptr, "image collections need a preprocessing spec");
        require(spec->channels >= INTDIM_CHANNELS_GRAYSCALE_AVERAGE && spec->channels <= INTDIM_CHANNELS_KEEP_ALL,
                "unknown channel policy");
        intdim::PreprocessSpec p;
        p.height = spec->height;
        p.width = spec->width;
        p.channels = static_cast<intdim::ChannelPolicy>(spec->channels);
        require(p.height >= 1 && p.width >= 1, "target resolution must be at least 1x1");
        *out = new intdim_matrix{intdim::vectorize(coll->value, p)};
    });
}

void intdim_collection_free(intdim_collection* coll) { delete coll; }

intdim_status intdim_records_create(intdim_records** out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        *out = new intdim_records{};
    });
}

intdim_status intdim_records_load(const char* path, intdim_records** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new intdim_records{intdim::load_records(path)};
    });
}

intdim_status intdim_records_add(intdim_records* records, const intdim_record* record) {
    return guarded([&] {
        require(records && record, "null argument");
        records->value.push_back(to_record(*record));
    });
}

size_t intdim_records_size(const intdim_records* records) { return records ? records->value.size() : 0; }

intdim_status intdim_records_get(const intdim_records* records, size_t i, intdim_record* out) {
    return guarded([&] {
        require(records && out, "null argument");
        require(i < records->value.size(), "record index out of range");
        const auto& r = records->value[i];
        out->dataset = r.dataset.c_str();
        out->domain = static_cast<intdim_domain>(r.domain);
        out->intrinsic_dim = r.intrinsic_dim;
        out->generalization_ability = r.generalization_ability;
        out->n_train = r.n_train;
        out->model = r.model.c_str();
    });
}

void intdim_records_free(intdim_records* records) { delete records; }

intdim_status intdim_fit_records(const intdim_records* records, intdim_fit_mode mode, intdim_fit** out) {
    return guarded([&] {
        require(records && out, "null argument");
        require(mode == INTDIM_FIT_SIMPLE || mode == INTDIM_FIT_MULTIPLE, "unknown fit mode");
        *out = new intdim_fit{mode == INTDIM_FIT_SIMPLE ? intdim::fit_simple(records->value)
                                                        : intdim::fit_multiple(records->value)};
    });
}

void intdim_fit_get_summary(const intdim_fit* fit, intdim_fit_summary* out) {
    if (!fit || !out) {
        return;
    }
    const auto& f = fit->value;
    out->intercept = f.intercept;
    out->slope_id = f.slope_id;
    out->has_slope_logn = f.slope_logn.has_value();
    out->slope_logn = f.slope_logn.value_or(0.0);
    out->r_squared = f.r_squared;
    out->degenerate_response = f.degenerate_response;
    out->n_records = f.n_records;
}

const double* intdim_fit_residuals(const intdim_fit* fit) { return fit ? fit->value.residuals.data() : nullptr; }
void intdim_fit_free(intdim_fit* fit) { delete fit; }

intdim_status intdim_group_fits_compute(const intdim_records* records, intdim_group_by group_by, intdim_fit_mode mode,
                                        intdim_group_fits** out) {
    return guarded([&] {
        require(records && out, "null argument");
        require(group_by >= INTDIM_GROUP_NONE && group_by <= INTDIM_GROUP_MODEL_NTRAIN, "unknown grouping");
        require(mode == INTDIM_FIT_SIMPLE || mode == INTDIM_FIT_MULTIPLE, "unknown fit mode");
        auto groups = std::make_unique<intdim_group_fits>();
        groups->value = intdim::group_fits(records->value, static_cast<intdim::GroupBy>(group_by),
                                           static_cast<intdim::FitMode>(mode));
        for (const auto& [name, fit] : groups->value.fits) {
            groups->names.push_back(name);
            groups->fits.push_back(intdim_fit{fit});
            groups->members.push_back(groups->value.members.at(name));
        }
        *out = groups.release();
    });
}

size_t intdim_group_fits_count(const intdim_group_fits* groups) { return groups ? groups->names.size() : 0; }

const char* intdim_group_fits_name(const intdim_group_fits* groups, size_t g) {
    return groups && g < groups->names.size() ? groups->names[g].c_str() : nullptr;
}

const intdim_fit* intdim_group_fits_fit(const intdim_group_fits* groups, size_t g) {
    return groups && g < groups->fits.size() ? &groups->fits[g] : nullptr;
}

size_t intdim_group_fits_members(const intdim_group_fits* groups, size_t g, const size_t** indices) {
    if (!groups || g >= groups->members.size()) {
        if (indices) {
            *indices = nullptr;
        }
        return 0;
    }
    if (indices) {
        *indices = groups->members[g].data();
    }
    return groups->members[g].size();
}

void intdim_group_fits_summary(const intdim_group_fits* groups, intdim_group_summary* out) {
    if (!groups || !out) {
        return;
    }
    const auto& s = groups->value.summary;
    *out = {s.n_groups, s.r_squared_mean, s.r_squared_std, s.slope_id_mean, s.slope_id_std};
}

void intdim_group_fits_free(intdim_group_fits* groups) { delete groups; }

} // extern "C"
