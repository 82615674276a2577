#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "intdim/ingest.hpp"
#include "test_support.hpp"

using json = nlohmann::json;
using intdim::testing::TempDir;
using intdim::testing::write_file;
using intdim::testing::write_pnm;

namespace {

int run(const std::string& args) {
    const std::string command = std::string(INTDIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    return json::parse(in);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

} // namespace

TEST_CASE("synth then estimate recovers a 10-cube") {
    TempDir dir("cli_cube");
    REQUIRE(run("synth --kind cube --m 10 --d 100 --n 2500 --seed 3 --out " + q(dir / "c.bin") + " --report " +
                q(dir / "s.json")) == 0);
    const auto synth = read_json(dir / "s.json");
    CHECK(synth["command"] == "synth");
    CHECK(synth["results"]["n_points"] == 2500);
    CHECK(synth["results"]["n_dims"] == 100);
    CHECK(synth["input_digest"].get<std::string>().rfind("sha256:", 0) == 0);

    REQUIRE(run("estimate --matrix " + q(dir / "c.bin") + " --report " + q(dir / "e.json") + " --per-point " +
                q(dir / "p.csv")) == 0);
    const auto est = read_json(dir / "e.json");
    const double id = est["results"]["global_id"];
    CHECK(id >= 8.0);
    CHECK(id <= 12.0);
    CHECK(est["config"]["k"] == 20);
    CHECK(est["config"].contains("toolkit_version"));
    CHECK(est.contains("timing"));
    const auto per_point = read_text(dir / "p.csv");
    CHECK(per_point.rfind("index,source,label,local_id\n", 0) == 0);
    CHECK(std::count(per_point.begin(), per_point.end(), '\n') == 2501);

    // Two identical runs differ only in timing.
    REQUIRE(run("estimate --matrix " + q(dir / "c.bin") + " --report " + q(dir / "e2.json")) == 0);
    auto again = read_json(dir / "e2.json");
    auto first = est;
    first.erase("timing");
    again.erase("timing");
    first["config"].erase("per_point_csv");
    again["config"].erase("per_point_csv");
    CHECK(first == again);

    CHECK(run("estimate --matrix " + q(dir / "c.bin") + " --k 1") == 2);
    CHECK(run("estimate --matrix " + q(dir / "c.bin") + " --k 2500") == 2);
}

TEST_CASE("synth kinds and invalid specs") {
    TempDir dir("cli_synth");
    REQUIRE(run("synth --kind sphere --m 2 --d 5 --n 50 --seed 1 --out " + q(dir / "s.bin")) == 0);
    const auto sphere = intdim::read_raw_matrix(dir / "s.bin");
    for (std::size_t i = 0; i < sphere.n_points(); ++i) {
        double norm = 0.0;
        for (double v : sphere.row(i)) {
            norm += v * v;
        }
        CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(run("synth --kind swiss_roll --m 3 --d 10 --n 50 --out " + q(dir / "x.bin")) == 9);
    CHECK(run("synth --kind cube --m 10 --d 5 --n 50 --out " + q(dir / "x.bin")) == 9);
    CHECK(run("synth --kind torus --m 2 --d 5 --n 50 --out " + q(dir / "x.bin")) == 9);
    CHECK(run("synth --kind cube --m 2 --d 5 --out " + q(dir / "x.bin")) == 64);
    CHECK(run("") == 64);
    CHECK(run("frobnicate") == 64);
}

TEST_CASE("estimate from a balanced image manifest") {
    TempDir dir("cli_images");
    std::mt19937_64 rng(5);
    std::string manifest = "path,label\n";
    for (int i = 0; i < 60; ++i) {
        std::vector<std::uint8_t> px(64);
        for (auto& v : px) {
            v = static_cast<std::uint8_t>(rng() % 256);
        }
        const std::string name = "img" + std::to_string(i) + ".pgm";
        write_pnm(dir / name, 8, 8, 1, px);
        manifest += name + "," + std::to_string(i < 40 ? 0 : 1) + "\n";
    }
    write_file(dir / "m.csv", manifest);

    REQUIRE(run("estimate --manifest " + q(dir / "m.csv") + " --sample 40 --balanced --seed 9 --height 8 --width 8 " +
                "--k 5 --report " + q(dir / "r.json") + " --per-point " + q(dir / "p.csv")) == 0);
    const auto report = read_json(dir / "r.json");
    CHECK(report["results"]["n_points"] == 40);
    CHECK(report["results"]["n_dims"] == 64);
    CHECK(report["results"]["label_counts"]["0"] == 20);
    CHECK(report["results"]["label_counts"]["1"] == 20);
    CHECK(report["config"]["seed"] == 9);
    CHECK(read_text(dir / "p.csv").find(",img") != std::string::npos);

    CHECK(run("estimate --manifest " + q(dir / "m.csv") + " --sample 50 --balanced --seed 9 --height 8 --width 8") == 6);
    CHECK(run("estimate --manifest " + q(dir / "m.csv") + " --sample 40 --balanced --height 8 --width 8") == 64);
    CHECK(run("estimate --matrix " + q(dir / "nothing.bin")) == 12);
    write_file(dir / "bad.csv", "path,label\nimg0.pgm,3\n");
    CHECK(run("estimate --manifest " + q(dir / "bad.csv")) == 5);
    write_file(dir / "missing.csv", "path,label\nimg0.pgm,0\nnope.pgm,1\nimg1.pgm,0\n");
    CHECK(run("estimate --manifest " + q(dir / "missing.csv") + " --k 2") == 7);
}

TEST_CASE("regress") {
    TempDir dir("cli_regress");
    std::string csv = "dataset,domain,intrinsic_dim,generalization_ability,n_train,model\n";
    int row = 0;
    for (double id : {5.0, 10.0, 15.0, 20.0}) {
        csv += "r" + std::to_string(row) + ",radiological," + std::to_string(id) + "," +
               std::to_string(0.95 - 0.01 * id) + ",2000,net\n";
        csv += "n" + std::to_string(row) + ",natural," + std::to_string(id) + "," + std::to_string(0.9 - 0.02 * id) +
               ",2000,net\n";
        ++row;
    }
    write_file(dir / "res.csv", csv);

    REQUIRE(run("regress --results " + q(dir / "res.csv") + " --group-by domain --fits " + q(dir / "f.json") +
                " --plot " + q(dir / "p.csv") + " --report " + q(dir / "r.json")) == 0);
    const auto report = read_json(dir / "r.json");
    const auto& fits = report["results"]["fits"];
    REQUIRE(fits.size() == 2);
    for (const auto& fit : fits) {
        CHECK(fit["r_squared"].get<double>() == doctest::Approx(1.0));
    }
    CHECK(fits[0]["group"] == "natural");
    CHECK(fits[0]["coefficients"]["slope_id"].get<double>() == doctest::Approx(-0.02));
    CHECK(report["results"]["summary"]["slope_id_mean"].get<double>() == doctest::Approx(-0.015));
    CHECK(read_json(dir / "f.json") == report["results"]);
    const auto plot = read_text(dir / "p.csv");
    CHECK(plot.rfind("x,y,group,fitted_y\n", 0) == 0);
    CHECK(std::count(plot.begin(), plot.end(), '\n') == 9);

    write_file(dir / "flat.csv", std::string("dataset,domain,intrinsic_dim,generalization_ability,n_train,model\n") +
                                     "a,natural,7,0.5,10,m\nb,natural,7,0.6,10,m\nc,natural,7,0.7,10,m\n");
    CHECK(run("regress --results " + q(dir / "flat.csv")) == 10);
    CHECK(run("regress --results " + q(dir / "res.csv") + " --mode multi") == 10);
    CHECK(run("regress --results " + q(dir / "res.csv") + " --mode quadratic") == 64);
    write_file(dir / "broken.csv", "dataset,domain\n");
    CHECK(run("regress --results " + q(dir / "broken.csv")) == 14);
}
