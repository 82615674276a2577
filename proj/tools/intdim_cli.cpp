// intdim command-line tool. Talks to the library only through the C API.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "intdim/intdim.h"

namespace {

using nlohmann::json;

// Flag combinations the parser cannot express; distinct from every library status.
constexpr int exit_usage = 64;

struct Failure {
    int code;
    std::string message;
};

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const noexcept { Free(p); }
};
using MatrixPtr = std::unique_ptr<intdim_matrix, Deleter<intdim_matrix, intdim_matrix_free>>;
using CollectionPtr = std::unique_ptr<intdim_collection, Deleter<intdim_collection, intdim_collection_free>>;
using EstimatePtr = std::unique_ptr<intdim_estimate, Deleter<intdim_estimate, intdim_estimate_free>>;
using RecordsPtr = std::unique_ptr<intdim_records, Deleter<intdim_records, intdim_records_free>>;
using GroupsPtr = std::unique_ptr<intdim_group_fits, Deleter<intdim_group_fits, intdim_group_fits_free>>;

void check(intdim_status status) {
    if (status != INTDIM_OK) {
        throw Failure{static_cast<int>(status), std::string(intdim_status_name(status)) + ": " + intdim_last_error()};
    }
}

[[noreturn]] void usage(const std::string& message) { throw Failure{exit_usage, message}; }

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) { EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr); }

    void update(const void* data, std::size_t size) { EVP_DigestUpdate(ctx_.get(), data, size); }
    void update(const std::string& s) { update(s.data(), s.size()); }

    void update_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw Failure{INTDIM_ERR_IO, "cannot read " + path + " for digest"};
        }
        std::vector<char> buf(1 << 20);
        while (in) {
            in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
            update(buf.data(), static_cast<std::size_t>(in.gcount()));
        }
    }

    std::string hex() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md, &len);
        std::string out = "sha256:";
        char byte[3];
        for (unsigned int i = 0; i < len; ++i) {
            std::snprintf(byte, sizeof byte, "%02x", md[i]);
            out += byte;
        }
        return out;
    }

private:
    struct CtxFree {
        void operator()(EVP_MD_CTX* c) const noexcept { EVP_MD_CTX_free(c); }
    };
    std::unique_ptr<EVP_MD_CTX, CtxFree> ctx_;
};

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        throw Failure{INTDIM_ERR_IO, "cannot write " + path};
    }
}

void emit_report(json report, const std::string& path, std::chrono::steady_clock::time_point start) {
    report["timing"] = {{"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    const std::string text = report.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
    } else {
        write_text(path, text);
    }
}

json base_config() { return {{"toolkit_version", intdim_version()}, {"workers", intdim_num_workers()}}; }

// ---- estimate ---------------------------------------------------------------

struct EstimateArgs {
    std::string manifest;
    std::string matrix;
    std::size_t k = INTDIM_DEFAULT_K;
    std::optional<std::size_t> sample;
    bool balanced = false;
    std::optional<std::uint64_t> seed;
    std::size_t height = 224;
    std::size_t width = 224;
    std::string channels = "grayscale_average";
    bool bias_corrected = false;
    std::string report;
    std::string per_point;
};

void run_estimate(const EstimateArgs& a) {
    const auto start = std::chrono::steady_clock::now();
    if (a.manifest.empty() && a.matrix.empty()) {
        usage("estimate needs --manifest or --matrix");
    }
    if (a.balanced && a.manifest.empty()) {
        usage("--balanced needs labels from --manifest");
    }
    if (a.balanced && !a.sample) {
        usage("--balanced needs --sample");
    }
    if (a.sample && a.manifest.empty()) {
        usage("--sample needs a --manifest to draw from");
    }
    if (a.sample && !a.seed) {
        usage("--sample needs an explicit --seed");
    }
    const int policy = intdim_channel_policy_from_name(a.channels.c_str());
    if (policy < 0) {
        usage("unknown --channels value '" + a.channels + "'");
    }

    Sha256 digest;
    MatrixPtr source;
    CollectionPtr coll;
    if (!a.matrix.empty()) {
        intdim_matrix* m = nullptr;
        check(intdim_matrix_load(a.matrix.c_str(), &m));
        source.reset(m);
        digest.update_file(a.matrix);
    }
    if (!a.manifest.empty()) {
        intdim_collection* c = nullptr;
        const auto kind = a.matrix.empty() ? INTDIM_SOURCE_IMAGE_PATH : INTDIM_SOURCE_MATRIX_ROW;
        check(intdim_collection_load(a.manifest.c_str(), kind, &c));
        coll.reset(c);
        digest.update_file(a.manifest);
    }
    if (coll && a.sample) {
        intdim_collection* sampled = nullptr;
        check(a.balanced ? intdim_collection_stratified_sample(coll.get(), *a.sample, *a.seed, &sampled)
                         : intdim_collection_uniform_sample(coll.get(), *a.sample, *a.seed, &sampled));
        coll.reset(sampled);
    }

    MatrixPtr data;
    if (coll) {
        intdim_preprocess spec{a.height, a.width, static_cast<intdim_channel_policy>(policy)};
        intdim_matrix* m = nullptr;
        check(intdim_collection_vectorize(coll.get(), &spec, source.get(), &m));
        data.reset(m);
        if (a.matrix.empty()) {
            for (std::size_t i = 0; i < intdim_collection_size(coll.get()); ++i) {
                digest.update_file(intdim_collection_resolved_path(coll.get(), i));
            }
        }
    } else {
        data = std::move(source);
    }

    intdim_estimate* e = nullptr;
    check(intdim_estimate_dataset(data.get(), a.k, a.bias_corrected ? 1 : 0, &e));
    EstimatePtr estimate(e);
    const std::size_t n = intdim_estimate_rows(estimate.get());
    const double* per_point = intdim_estimate_per_point(estimate.get());

    if (!a.per_point.empty()) {
        std::ostringstream csv;
        csv << "index,source,label,local_id\n";
        for (std::size_t i = 0; i < n; ++i) {
            std::string source_ref = std::to_string(i);
            std::string label;
            if (coll) {
                source_ref = intdim_collection_source(coll.get(), i);
                label = std::to_string(intdim_collection_label(coll.get(), i));
            }
            csv << i << ',' << csv_field(source_ref) << ',' << label << ',' << format_real(per_point[i]) << '\n';
        }
        write_text(a.per_point, csv.str());
    }

    json config = base_config();
    config["manifest"] = a.manifest;
    config["matrix"] = a.matrix;
    config["k"] = a.k;
    config["sample"] = a.sample ? json(*a.sample) : json(nullptr);
    config["balanced"] = a.balanced;
    config["seed"] = a.seed ? json(*a.seed) : json(nullptr);
    config["preprocess"] = {{"height", a.height}, {"width", a.width}, {"channels", a.channels}, {"value_range", {0, 255}}};
    config["normalization"] = a.bias_corrected ? "bias_corrected" : "standard";
    config["per_point_csv"] = a.per_point;

    json results = {{"global_id", intdim_estimate_global(estimate.get())},
                    {"k", intdim_estimate_k(estimate.get())},
                    {"n_points", n},
                    {"n_dims", intdim_matrix_cols(data.get())}};
    if (coll) {
        results["label_counts"] = {{"0", intdim_collection_label_count(coll.get(), 0)},
                                   {"1", intdim_collection_label_count(coll.get(), 1)}};
    }
    emit_report({{"command", "estimate"}, {"config", config}, {"input_digest", digest.hex()}, {"results", results}},
                a.report, start);
}

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
    std::string kind;
    std::size_t m = 0;
    std::size_t d = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string report;
};

void run_synth(const SynthArgs& a) {
    const auto start = std::chrono::steady_clock::now();
    const int kind = intdim_manifold_kind_from_name(a.kind.c_str());
    if (kind < 0) {
        throw Failure{INTDIM_ERR_SPEC_INVALID, "unknown manifold kind '" + a.kind + "'"};
    }
    intdim_manifold_spec spec{static_cast<intdim_manifold_kind>(kind), a.m, a.d, a.n, a.seed};
    intdim_matrix* m = nullptr;
    check(intdim_synth_generate(&spec, &m));
    MatrixPtr data(m);
    check(intdim_matrix_save(data.get(), a.out.c_str()));

    json config = base_config();
    config.update({{"kind", a.kind}, {"m", a.m}, {"d", a.d}, {"n", a.n}, {"seed", a.seed}, {"out", a.out}});
    Sha256 input;
    input.update(config.dump());
    Sha256 output;
    output.update_file(a.out);
    json results = {{"n_points", intdim_matrix_rows(data.get())},
                    {"n_dims", intdim_matrix_cols(data.get())},
                    {"output_digest", output.hex()}};
    emit_report({{"command", "synth"}, {"config", config}, {"input_digest", input.hex()}, {"results", results}},
                a.report, start);
}

// ---- regress ----------------------------------------------------------------

struct RegressArgs {
    std::string results;
    std::string mode = "simple";
    std::string group_by = "none";
    std::string fits;
    std::string plot;
    std::string report;
};

json fit_to_json(const intdim_fit* fit) {
    intdim_fit_summary s{};
    intdim_fit_get_summary(fit, &s);
    json coefficients = {{"intercept", s.intercept}, {"slope_id", s.slope_id}};
    if (s.has_slope_logn) {
        coefficients["slope_logn"] = s.slope_logn;
    }
    const double* residuals = intdim_fit_residuals(fit);
    return {{"coefficients", coefficients},
            {"r_squared", s.r_squared},
            {"degenerate_response", s.degenerate_response != 0},
            {"n_records", s.n_records},
            {"residuals", std::vector<double>(residuals, residuals + s.n_records)}};
}

void run_regress(const RegressArgs& a) {
    const auto start = std::chrono::steady_clock::now();
    intdim_fit_mode mode;
    if (a.mode == "simple") {
        mode = INTDIM_FIT_SIMPLE;
    } else if (a.mode == "multi") {
        mode = INTDIM_FIT_MULTIPLE;
    } else {
        usage("--mode must be simple or multi");
    }
    intdim_group_by group_by;
    if (a.group_by == "none") {
        group_by = INTDIM_GROUP_NONE;
    } else if (a.group_by == "domain") {
        group_by = INTDIM_GROUP_DOMAIN;
    } else if (a.group_by == "model_ntrain") {
        group_by = INTDIM_GROUP_MODEL_NTRAIN;
    } else {
        usage("--group-by must be none, domain or model_ntrain");
    }

    intdim_records* r = nullptr;
    check(intdim_records_load(a.results.c_str(), &r));
    RecordsPtr records(r);
    intdim_group_fits* g = nullptr;
    check(intdim_group_fits_compute(records.get(), group_by, mode, &g));
    GroupsPtr groups(g);

    json fits = json::array();
    std::ostringstream plot;
    plot << "x,y,group,fitted_y\n";
    for (std::size_t gi = 0; gi < intdim_group_fits_count(groups.get()); ++gi) {
        const std::string name = intdim_group_fits_name(groups.get(), gi);
        const intdim_fit* fit = intdim_group_fits_fit(groups.get(), gi);
        json entry = fit_to_json(fit);
        entry["group"] = name;
        fits.push_back(entry);

        const size_t* members = nullptr;
        const std::size_t count = intdim_group_fits_members(groups.get(), gi, &members);
        const double* residuals = intdim_fit_residuals(fit);
        for (std::size_t m = 0; m < count; ++m) {
            intdim_record rec{};
            check(intdim_records_get(records.get(), members[m], &rec));
            const double y = rec.generalization_ability;
            plot << format_real(rec.intrinsic_dim) << ',' << format_real(y) << ',' << csv_field(name) << ','
                 << format_real(y - residuals[m]) << '\n';
        }
    }
    intdim_group_summary summary{};
    intdim_group_fits_summary(groups.get(), &summary);
    json payload = {{"mode", a.mode},
                    {"group_by", a.group_by},
                    {"fits", fits},
                    {"summary",
                     {{"n_groups", summary.n_groups},
                      {"r_squared_mean", summary.r_squared_mean},
                      {"r_squared_std", summary.r_squared_std},
                      {"slope_id_mean", summary.slope_id_mean},
                      {"slope_id_std", summary.slope_id_std}}}};
    if (!a.fits.empty()) {
        write_text(a.fits, payload.dump(2) + "\n");
    }
    if (!a.plot.empty()) {
        write_text(a.plot, plot.str());
    }

    json config = base_config();
    config.update({{"results", a.results}, {"mode", a.mode}, {"group_by", a.group_by}, {"fits", a.fits},
                   {"plot", a.plot}});
    Sha256 digest;
    digest.update_file(a.results);
    emit_report({{"command", "regress"}, {"config", config}, {"input_digest", digest.hex()}, {"results", payload}},
                a.report, start);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Intrinsic dimension estimation and generalization-vs-ID regression"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(intdim_version()));
    std::size_t workers = 0;
    app.add_option("--workers", workers, "Worker threads (default: INTDIM_NUM_WORKERS or all cores)");

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "Estimate the intrinsic dimension of an image set or matrix");
    estimate->add_option("--manifest", est.manifest, "CSV with header path,label (rows of --matrix if given)");
    estimate->add_option("--matrix", est.matrix, "Raw MPRB matrix file");
    estimate->add_option("--k", est.k, "Neighbors per point")->capture_default_str();
    estimate->add_option("--sample", est.sample, "Number of items to sample before estimating");
    estimate->add_flag("--balanced", est.balanced, "Sample exactly half from each label");
    estimate->add_option("--seed", est.seed, "Sampling seed (required with --sample)");
    estimate->add_option("--height", est.height, "Resize height")->capture_default_str();
    estimate->add_option("--width", est.width, "Resize width")->capture_default_str();
    estimate->add_option("--channels", est.channels, "grayscale_average | first_channel | keep_all_flattened")
        ->capture_default_str();
    estimate->add_flag("--bias-corrected", est.bias_corrected, "Use the 1/(k-2) normalization");
    estimate->add_option("--report", est.report, "JSON report path (default: stdout)");
    estimate->add_option("--per-point", est.per_point, "CSV of per-point estimates");

    SynthArgs syn;
    auto* synth = app.add_subcommand("synth", "Sample a manifold of known dimension into a raw matrix file");
    synth->add_option("--kind", syn.kind, "cube | sphere | gaussian | swiss_roll")->required();
    synth->add_option("--m", syn.m, "Intrinsic dimension")->required();
    synth->add_option("--d", syn.d, "Ambient dimension")->required();
    synth->add_option("--n", syn.n, "Number of points")->required();
    synth->add_option("--seed", syn.seed, "Sampling seed")->capture_default_str();
    synth->add_option("--out", syn.out, "Output matrix path")->required();
    synth->add_option("--report", syn.report, "JSON report path (default: stdout)");

    RegressArgs reg;
    auto* regress = app.add_subcommand("regress", "Fit generalization ability against intrinsic dimension");
    regress->add_option("--results", reg.results, "Results CSV")->required();
    regress->add_option("--mode", reg.mode, "simple | multi")->capture_default_str();
    regress->add_option("--group-by", reg.group_by, "none | domain | model_ntrain")->capture_default_str();
    regress->add_option("--fits", reg.fits, "Fits JSON path");
    regress->add_option("--plot", reg.plot, "Plot-ready CSV path");
    regress->add_option("--report", reg.report, "JSON report path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_usage;
    }

    intdim_set_num_workers(workers);
    try {
        if (*estimate) {
            run_estimate(est);
        } else if (*synth) {
            run_synth(syn);
        } else {
            run_regress(reg);
        }
    } catch (const Failure& f) {
        std::cerr << "intdim: " << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "intdim: " << e.what() << "\n";
        return INTDIM_ERR_INTERNAL;
    }
    return 0;
}
