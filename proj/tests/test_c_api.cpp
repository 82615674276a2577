#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "intdim/intdim.h"
#include "test_support.hpp"

using intdim::testing::TempDir;
using intdim::testing::write_file;
using intdim::testing::write_pnm;

TEST_CASE("library metadata") {
    CHECK(std::string(intdim_version()).size() > 0);
    CHECK(std::string(intdim_status_name(INTDIM_ERR_INVALID_K)) == "InvalidK");
    CHECK(std::string(intdim_status_name(INTDIM_OK)) == "Ok");
    intdim_set_num_workers(3);
    CHECK(intdim_num_workers() == 3);
    intdim_set_num_workers(0);
    CHECK(intdim_num_workers() >= 1);
}

TEST_CASE("matrix handles") {
    const double values[] = {0.0, 1.0, 3.0};
    intdim_matrix* m = nullptr;
    REQUIRE(intdim_matrix_create(3, 1, values, &m) == INTDIM_OK);
    CHECK(intdim_matrix_rows(m) == 3);
    CHECK(intdim_matrix_cols(m) == 1);
    CHECK(intdim_matrix_data(m)[2] == 3.0);

    TempDir dir("capi");
    const auto path = (dir / "m.bin").string();
    REQUIRE(intdim_matrix_save(m, path.c_str()) == INTDIM_OK);
    intdim_matrix* back = nullptr;
    REQUIRE(intdim_matrix_load(path.c_str(), &back) == INTDIM_OK);
    CHECK(std::memcmp(intdim_matrix_data(back), values, sizeof values) == 0);
    intdim_matrix_free(back);
    intdim_matrix_free(m);

    const double bad[] = {1.0, NAN};
    intdim_matrix* nope = nullptr;
    CHECK(intdim_matrix_create(1, 2, bad, &nope) == INTDIM_ERR_NON_FINITE_DATA);
    CHECK(nope == nullptr);
    CHECK(std::string(intdim_last_error()).size() > 0);
    CHECK(intdim_matrix_create(1, 2, values, nullptr) == INTDIM_ERR_INVALID_ARGUMENT);
    CHECK(intdim_matrix_load((dir / "absent").string().c_str(), &nope) == INTDIM_ERR_IO);
}

TEST_CASE("neighbors and estimates through the C boundary") {
    const double values[] = {0.0, 1.0, 3.0};
    intdim_matrix* m = nullptr;
    REQUIRE(intdim_matrix_create(3, 1, values, &m) == INTDIM_OK);
    intdim_neighbors* table = nullptr;
    REQUIRE(intdim_neighbors_build(m, 2, 0, &table) == INTDIM_OK);
    CHECK(intdim_neighbors_rows(table) == 3);
    CHECK(intdim_neighbors_k(table) == 2);
    const double* dist = intdim_neighbors_distances(table);
    const uint64_t* ids = intdim_neighbors_ids(table);
    CHECK(dist[0] == 1.0);
    CHECK(dist[1] == 3.0);
    CHECK(ids[4] == 1);
    CHECK(ids[5] == 0);

    double local = 0.0;
    REQUIRE(intdim_local_id(table, 0, 0, &local) == INTDIM_OK);
    CHECK(local == doctest::Approx(1.0 / std::log(3.0)));
    CHECK(intdim_local_id(table, 9, 0, &local) == INTDIM_ERR_INVALID_ARGUMENT);

    intdim_estimate* est = nullptr;
    REQUIRE(intdim_estimate_from_neighbors(table, 0, &est) == INTDIM_OK);
    CHECK(intdim_estimate_rows(est) == 3);
    CHECK(intdim_estimate_k(est) == 2);
    double harmonic = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        harmonic += 1.0 / intdim_estimate_per_point(est)[i];
    }
    CHECK(intdim_estimate_global(est) == doctest::Approx(3.0 / harmonic));
    intdim_estimate_free(est);
    intdim_neighbors_free(table);

    CHECK(intdim_neighbors_build(m, 3, 0, &table) == INTDIM_ERR_INVALID_K);
    CHECK(intdim_estimate_dataset(m, 1, 0, &est) == INTDIM_ERR_INVALID_K);
    intdim_matrix_free(m);

    const double dup[] = {0.0, 5.0, 5.0, 9.0};
    REQUIRE(intdim_matrix_create(4, 1, dup, &m) == INTDIM_OK);
    CHECK(intdim_neighbors_build(m, 2, 0, &table) == INTDIM_ERR_DUPLICATE_POINTS);
    const uint64_t* pairs = nullptr;
    REQUIRE(intdim_last_duplicate_pairs(&pairs) == 1);
    CHECK(pairs[0] == 1);
    CHECK(pairs[1] == 2);
    intdim_matrix_free(m);
}

TEST_CASE("synthetic generation and dataset estimate") {
    CHECK(intdim_manifold_kind_from_name("swiss_roll") == INTDIM_MANIFOLD_SWISS_ROLL);
    CHECK(intdim_manifold_kind_from_name("torus") == -1);
    intdim_manifold_spec spec{INTDIM_MANIFOLD_CUBE, 5, 30, 1500, 4};
    intdim_matrix* m = nullptr;
    REQUIRE(intdim_synth_generate(&spec, &m) == INTDIM_OK);
    CHECK(intdim_matrix_rows(m) == 1500);
    CHECK(intdim_matrix_cols(m) == 30);

    intdim_estimate* est = nullptr;
    REQUIRE(intdim_estimate_dataset(m, INTDIM_DEFAULT_K, 0, &est) == INTDIM_OK);
    CHECK(intdim_estimate_global(est) > 4.0);
    CHECK(intdim_estimate_global(est) < 6.0);
    intdim_estimate* corrected = nullptr;
    REQUIRE(intdim_estimate_dataset(m, INTDIM_DEFAULT_K, 1, &corrected) == INTDIM_OK);
    CHECK(intdim_estimate_global(corrected) ==
          doctest::Approx(intdim_estimate_global(est) * 18.0 / 19.0).epsilon(1e-12));
    intdim_estimate_free(corrected);
    intdim_estimate_free(est);
    intdim_matrix_free(m);

    spec.kind = INTDIM_MANIFOLD_SWISS_ROLL;
    spec.intrinsic_dim = 3;
    CHECK(intdim_synth_generate(&spec, &m) == INTDIM_ERR_SPEC_INVALID);
}

TEST_CASE("collections") {
    TempDir dir("capi_coll");
    std::string manifest = "path,label\n";
    for (int i = 0; i < 6; ++i) {
        const std::string name = "img" + std::to_string(i) + ".pgm";
        write_pnm(dir / name, 4, 4, 1, std::vector<std::uint8_t>(16, static_cast<std::uint8_t>(10 * i)));
        manifest += name + "," + std::to_string(i % 2) + "\n";
    }
    write_file(dir / "m.csv", manifest);

    intdim_collection* coll = nullptr;
    REQUIRE(intdim_collection_load((dir / "m.csv").string().c_str(), INTDIM_SOURCE_IMAGE_PATH, &coll) == INTDIM_OK);
    CHECK(intdim_collection_size(coll) == 6);
    CHECK(intdim_collection_label_count(coll, 1) == 3);
    CHECK(std::string(intdim_collection_source(coll, 2)) == "img2.pgm");
    CHECK(std::string(intdim_collection_resolved_path(coll, 2)) == (dir / "img2.pgm").string());
    CHECK(intdim_collection_label(coll, 3) == 1);

    intdim_collection* sample = nullptr;
    REQUIRE(intdim_collection_stratified_sample(coll, 4, 11, &sample) == INTDIM_OK);
    CHECK(intdim_collection_label_count(sample, 0) == 2);
    CHECK(intdim_collection_label_count(sample, 1) == 2);
    intdim_collection* too_many = nullptr;
    CHECK(intdim_collection_stratified_sample(coll, 8, 11, &too_many) == INTDIM_ERR_INSUFFICIENT_CLASS);
    CHECK(intdim_collection_stratified_sample(coll, 3, 11, &too_many) == INTDIM_ERR_INVALID_ARGUMENT);

    intdim_preprocess spec = intdim_preprocess_default();
    CHECK(spec.height == 224);
    CHECK(spec.width == 224);
    CHECK(spec.channels == INTDIM_CHANNELS_GRAYSCALE_AVERAGE);
    spec.height = 2;
    spec.width = 3;
    intdim_matrix* data = nullptr;
    REQUIRE(intdim_collection_vectorize(sample, &spec, nullptr, &data) == INTDIM_OK);
    CHECK(intdim_matrix_rows(data) == 4);
    CHECK(intdim_matrix_cols(data) == 6);
    intdim_matrix_free(data);

    CHECK(intdim_channel_policy_from_name("first_channel") == INTDIM_CHANNELS_FIRST);
    CHECK(intdim_channel_policy_from_name("rgb") == -1);
    intdim_collection_free(sample);
    intdim_collection_free(coll);

    write_file(dir / "bad.csv", "path,label\na.pgm,7\n");
    CHECK(intdim_collection_load((dir / "bad.csv").string().c_str(), INTDIM_SOURCE_IMAGE_PATH, &coll) ==
          INTDIM_ERR_MALFORMED_MANIFEST);
}

TEST_CASE("records and fits") {
    intdim_records* records = nullptr;
    REQUIRE(intdim_records_create(&records) == INTDIM_OK);
    const double ids[] = {1.0, 2.0, 3.0};
    const double gas[] = {1.0, 0.9, 0.8};
    for (int i = 0; i < 3; ++i) {
        const intdim_record r{"ds", INTDIM_DOMAIN_RADIOLOGICAL, ids[i], gas[i], 100, "net"};
        REQUIRE(intdim_records_add(records, &r) == INTDIM_OK);
    }
    CHECK(intdim_records_size(records) == 3);
    intdim_record got{};
    REQUIRE(intdim_records_get(records, 1, &got) == INTDIM_OK);
    CHECK(std::string(got.model) == "net");
    CHECK(got.generalization_ability == 0.9);

    intdim_fit* fit = nullptr;
    REQUIRE(intdim_fit_records(records, INTDIM_FIT_SIMPLE, &fit) == INTDIM_OK);
    intdim_fit_summary s{};
    intdim_fit_get_summary(fit, &s);
    CHECK(s.slope_id == doctest::Approx(-0.1));
    CHECK(s.intercept == doctest::Approx(1.1));
    CHECK(s.r_squared == doctest::Approx(1.0));
    CHECK(s.has_slope_logn == 0);
    CHECK(s.n_records == 3);
    CHECK(std::abs(intdim_fit_residuals(fit)[1]) < 1e-12);
    intdim_fit_free(fit);

    CHECK(intdim_fit_records(records, INTDIM_FIT_MULTIPLE, &fit) == INTDIM_ERR_DEGENERATE_DESIGN);

    intdim_group_fits* groups = nullptr;
    REQUIRE(intdim_group_fits_compute(records, INTDIM_GROUP_DOMAIN, INTDIM_FIT_SIMPLE, &groups) == INTDIM_OK);
    REQUIRE(intdim_group_fits_count(groups) == 1);
    CHECK(std::string(intdim_group_fits_name(groups, 0)) == "radiological");
    const std::size_t* members = nullptr;
    CHECK(intdim_group_fits_members(groups, 0, &members) == 3);
    CHECK(members[2] == 2);
    intdim_group_summary gs{};
    intdim_group_fits_summary(groups, &gs);
    CHECK(gs.n_groups == 1);
    CHECK(gs.slope_id_std == 0.0);
    intdim_fit_summary gfs{};
    intdim_fit_get_summary(intdim_group_fits_fit(groups, 0), &gfs);
    CHECK(gfs.slope_id == doctest::Approx(-0.1));
    intdim_group_fits_free(groups);

    const intdim_record invalid{"ds", INTDIM_DOMAIN_NATURAL, -3.0, 0.5, 10, "net"};
    CHECK(intdim_records_add(records, &invalid) == INTDIM_ERR_MALFORMED_RESULTS);
    intdim_records_free(records);
}
