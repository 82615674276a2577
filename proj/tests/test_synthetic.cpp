#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "intdim/error.hpp"
#include "intdim/estimator.hpp"
#include "intdim/knn.hpp"
#include "intdim/synthetic.hpp"
#include "test_support.hpp"

using namespace intdim;

namespace {

double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return std::sqrt(s);
}

void require_spec_invalid(const ManifoldSpec& spec) {
    try {
        generate(spec);
        FAIL("expected SpecInvalid");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SpecInvalid);
    }
}

} // namespace

TEST_CASE("1-cube in R^1 is plain uniform draws") {
    const auto data = generate({ManifoldKind::Cube, 1, 1, 5, 42});
    CHECK(data.n_points() == 5);
    CHECK(data.n_dims() == 1);
    for (double v : data.values()) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("sphere samples have unit norm") {
    for (std::size_t d : {3u, 17u}) {
        const auto data = generate({ManifoldKind::Sphere, 2, d, 500, d});
        for (std::size_t i = 0; i < data.n_points(); ++i) {
            CHECK(std::abs(norm(data.row(i)) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("same spec, same bytes; different seed, different data") {
    for (auto kind : {ManifoldKind::Cube, ManifoldKind::Sphere, ManifoldKind::Gaussian, ManifoldKind::SwissRoll}) {
        const ManifoldSpec spec{kind, 2, 9, 64, 123};
        const auto a = generate(spec);
        const auto b = generate(spec);
        CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
        auto other = spec;
        other.seed = 124;
        const auto c = generate(other);
        CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
    }
}

TEST_CASE("embedding preserves pairwise distances") {
    for (auto kind : {ManifoldKind::Cube, ManifoldKind::Sphere, ManifoldKind::Gaussian, ManifoldKind::SwissRoll}) {
        ManifoldSpec flat{kind, 2, 0, 60, 8};
        flat.ambient_dim = source_dim(flat);
        ManifoldSpec embedded = flat;
        embedded.ambient_dim = 40;
        const auto a = generate(flat);
        const auto b = generate(embedded);
        for (std::size_t i = 0; i < 60; ++i) {
            for (std::size_t j = i + 1; j < 60; ++j) {
                const double da = euclidean_distance(a.row(i), a.row(j));
                const double db = euclidean_distance(b.row(i), b.row(j));
                CHECK(intdim::testing::relative_difference(da, db) <= 1e-9);
            }
        }
    }
}

TEST_CASE("swiss roll coordinates follow the parametrization") {
    const auto data = generate({ManifoldKind::SwissRoll, 2, 3, 200, 3});
    const double pi = std::acos(-1.0);
    for (std::size_t i = 0; i < data.n_points(); ++i) {
        const auto p = data.row(i);
        const double t = std::hypot(p[0], p[2]);
        CHECK(t >= 1.5 * pi - 1e-12);
        CHECK(t <= 4.5 * pi + 1e-12);
        CHECK(p[1] >= 0.0);
        CHECK(p[1] <= 10.0);
    }
}

TEST_CASE("dimension constraints") {
    require_spec_invalid({ManifoldKind::SwissRoll, 3, 10, 10, 0});
    require_spec_invalid({ManifoldKind::SwissRoll, 2, 2, 10, 0});
    require_spec_invalid({ManifoldKind::Sphere, 2, 2, 10, 0});
    require_spec_invalid({ManifoldKind::Cube, 5, 4, 10, 0});
    require_spec_invalid({ManifoldKind::Gaussian, 5, 4, 10, 0});
    require_spec_invalid({ManifoldKind::Cube, 0, 4, 10, 0});
    require_spec_invalid({ManifoldKind::Cube, 2, 4, 0, 0});
    CHECK_NOTHROW(generate({ManifoldKind::Gaussian, 4, 4, 10, 0}));
    CHECK_NOTHROW(generate({ManifoldKind::Sphere, 2, 3, 10, 0}));
}

TEST_CASE("kind names round-trip") {
    for (auto kind : {ManifoldKind::Cube, ManifoldKind::Sphere, ManifoldKind::Gaussian, ManifoldKind::SwissRoll}) {
        CHECK(parse_manifold_kind(manifold_kind_name(kind)) == kind);
    }
    CHECK_FALSE(parse_manifold_kind("torus").has_value());
}

TEST_CASE("known-dimension samples give the expected estimates") {
    const double cube10 = estimate_dataset(generate({ManifoldKind::Cube, 10, 100, 2500, 7})).global_id;
    CHECK(cube10 >= 8.0);
    CHECK(cube10 <= 12.0);
    const double roll = estimate_dataset(generate({ManifoldKind::SwissRoll, 2, 100, 2500, 7})).global_id;
    CHECK(roll >= 1.6);
    CHECK(roll <= 2.6);
}
