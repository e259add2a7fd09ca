// Copyright 2026 The kpo-aqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "kpo/cli.hpp"
#include "kpo/config.hpp"
#include "kpo/io.hpp"
#include "kpo/units.hpp"

using namespace kpo;
using config::Json;
namespace fs = std::filesystem;

namespace {

bool has(const std::vector<std::string>& list, const std::string& item) {
    return std::find(list.begin(), list.end(), item) != list.end();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// Scratch directory removed on scope exit.
struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("kpo-test-" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

struct Invocation {
    int code = 0;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "kpo-aqec");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Invocation r;
    r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::size_t entries(const fs::path& dir) {
    if (!fs::exists(dir)) return 0;
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator()));
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults are valid and map to the reference experiment") {
    const Json cfg = config::defaults();
    CHECK(config::violations(cfg).empty());
    const experiments::ExperimentConfig e = config::to_experiment(cfg);
    const experiments::ExperimentConfig r = experiments::ExperimentConfig::reference();
    CHECK(e.params.kerr == doctest::Approx(r.params.kerr).epsilon(1e-14));
    CHECK(e.params.pump == doctest::Approx(r.params.pump).epsilon(1e-14));
    CHECK(e.dim_a == 30);
    CHECK(e.dim_b == 3);
    CHECK(e.frame == model::Frame::ancilla_rwa);
    CHECK(e.t_flip == doctest::Approx(units::us(100.0)));
}

TEST_CASE("invariant violations are named") {
    Json cfg = config::defaults();
    cfg["kpo"]["kerr_mhz"] = 0.0;
    CHECK(has(config::violations(cfg), "kerr > 0"));

    cfg = config::defaults();
    cfg["sweep"]["points"] = 5;
    CHECK(has(config::violations(cfg), "sweep.points >= 9"));

    cfg = config::defaults();
    cfg["kpo"]["kerr_mhz"] = -1.0;
    cfg["run"]["dim_b"] = 1;
    cfg["xgate"]["sign"] = 0;
    const auto v = config::violations(cfg);
    CHECK(v.size() == 3);
    CHECK(has(v, "run.dim_b >= 2"));
    CHECK(has(v, "xgate.sign in {-1, +1}"));
}

TEST_CASE("unknown keys and wrong types are reported by path") {
    std::vector<std::string> issues;
    const Json user = Json::parse(R"({"kpo": {"kerr_mhz": "big", "bogus": 1}, "extra": {}})");
    config::merge(user, issues);
    CHECK(issues.size() == 3);
    CHECK(has(issues, "unknown key 'kpo.bogus'"));
    CHECK(has(issues, "unknown key 'extra'"));
    CHECK(has(issues, "'kpo.kerr_mhz' must be number, got string"));

    issues.clear();
    config::merge(Json::array(), issues);
    CHECK(issues.size() == 1);
}

TEST_CASE("overrides") {
    Json cfg = config::defaults();
    config::apply_override(cfg, "kpo.pump_mhz=5.6");
    CHECK(cfg["kpo"]["pump_mhz"].get<double>() == 5.6);
    config::apply_override(cfg, "run.frame=full");
    CHECK(cfg["run"]["frame"] == "full");
    config::apply_override(cfg, "optimize.a_cor_mhz=[0.1,0.2]");
    CHECK(cfg["optimize"]["a_cor_mhz"].size() == 2);
    config::apply_override(cfg, "break_even.t_bit_us=80");
    CHECK(cfg["break_even"]["t_bit_us"].get<double>() == 80.0);

    CHECK_THROWS_AS(config::apply_override(cfg, "kpo.nothing=1"), Error);
    CHECK_THROWS_AS(config::apply_override(cfg, "kpo=1"), Error);
    CHECK_THROWS_AS(config::apply_override(cfg, "run.dim_a=3.5"), Error);
    CHECK_THROWS_AS(config::apply_override(cfg, "no_equals"), Error);
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("csv quoting and full-precision numbers") {
    io::CsvTable t({"name", "value", "count"});
    t.add_row({std::string("a,b"), 0.1, 3L});
    t.add_row({std::string("say \"hi\""), std::numeric_limits<double>::infinity(), -1L});
    CHECK(t.str() == "name,value,count\r\n\"a,b\",0.10000000000000001,3\r\n\"say \"\"hi\"\"\",inf,-1\r\n");
    CHECK_THROWS_AS(t.add_row({1.0}), Error);

    // %.17g round-trips every double.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::stod(io::format_number(x)) == x);
    }
}

TEST_CASE("manifest round trip reproduces the outputs byte for byte") {
    TempDir tmp;
    const std::string root = (tmp.path / "runs").string();
    const Invocation first = invoke({"--out", root, "--set", "spectrum.points=7", "spectrum"});
    REQUIRE(first.code == cli::ExitCode::ok);
    const fs::path dir = Json::parse(first.out)["run_directory"].get<std::string>();
    const Json manifest = Json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["status"] == "ok");
    CHECK(manifest["tool"] == cli::kToolName);
    CHECK(manifest["config"]["spectrum"]["points"] == 7);

    const Invocation second = invoke({"--out", root, "--config", (dir / "manifest.json").string(), "spectrum"});
    REQUIRE(second.code == cli::ExitCode::ok);
    const fs::path again = Json::parse(second.out)["run_directory"].get<std::string>();
    CHECK(again != dir);
    for (const char* name : {"quasienergy.csv", "states.csv", "coefficients.csv", "summary.json"}) {
        INFO(name);
        CHECK(fs::exists(dir / name));
        CHECK(slurp(dir / name) == slurp(again / name));
    }
    CHECK(Json::parse(slurp(again / "manifest.json"))["config"] == manifest["config"]);
}

TEST_CASE("exit codes and error records") {
    TempDir tmp;
    const fs::path root = tmp.path / "runs";

    const Invocation missing = invoke({"--out", root.string(), "--config", (tmp.path / "nope.json").string(), "spectrum"});
    CHECK(missing.code == cli::ExitCode::config);
    CHECK(entries(root) == 0);
    CHECK(Json::parse(missing.err)["error"]["kind"] == "config");

    const Invocation unknown = invoke({"--out", root.string(), "levitate"});
    CHECK(unknown.code == cli::ExitCode::usage);
    CHECK(unknown.err.find("levitate") != std::string::npos);

    const Invocation bad_dims = invoke({"--out", root.string(), "--dims", "30x3", "spectrum"});
    CHECK(bad_dims.code == cli::ExitCode::usage);

    const Invocation horizon = invoke({"--out", root.string(), "--t-final", "1us", "spectrum"});
    CHECK(horizon.code == cli::ExitCode::usage);

    const Invocation invalid = invoke({"--out", root.string(), "--set", "kpo.kerr_mhz=0", "spectrum"});
    CHECK(invalid.code == cli::ExitCode::config);
    CHECK(has(Json::parse(invalid.err)["error"]["violations"].get<std::vector<std::string>>(), "kerr > 0"));
    CHECK(entries(root) == 0);

    const Invocation check = invoke({"--out", root.string(), "--set", "sweep.points=3", "validate"});
    CHECK(check.code == cli::ExitCode::config);
    CHECK(Json::parse(check.out)["valid"] == false);
    CHECK(invoke({"validate"}).code == cli::ExitCode::ok);

    // No crossing inside the search window: a physics failure with a manifest.
    const Invocation physics =
        invoke({"--out", root.string(), "--set", "spectrum.search_max=0.1", "--set", "spectrum.points=3", "spectrum"});
    CHECK(physics.code == cli::ExitCode::physics);
    CHECK(Json::parse(physics.err)["error"]["kind"] == "no_degeneracy");
    REQUIRE(entries(root) == 1);
    const fs::path dir = fs::directory_iterator(root)->path();
    const Json manifest = Json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["status"] == "failed");
    CHECK(!has(manifest["outputs"].get<std::vector<std::string>>(), "summary.json"));
}

TEST_CASE("t-final sets the experiment horizon") {
    TempDir tmp;
    const Invocation r = invoke({"--out", (tmp.path / "runs").string(), "--t-final", "0.2us",
                                 "--set", "xgate.sample_dt_us=0.01", "--dims", "30,2", "xgate"});
    REQUIRE(r.code == cli::ExitCode::ok);
    const fs::path dir = Json::parse(r.out)["run_directory"].get<std::string>();
    const Json manifest = Json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["config"]["xgate"]["t_final_us"].get<double>() == doctest::Approx(0.2));
    CHECK(manifest["config"]["run"]["dim_b"] == 2);
}

}  // TEST_SUITE
