#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "sollab/io.hpp"
#include "sollab/scenario.hpp"

using namespace sollab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string error_path(const json& doc) {
    try {
        scenario::parse_config(doc);
    } catch (const scenario::ConfigError& e) {
        return e.path();
    }
    return "<accepted>";
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("sollab_test_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("hashes and number formatting") {
    CHECK(io::sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
    CHECK(io::git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("parallel_for runs every task and rethrows") {
    std::vector<int> hit(50, 0);
    io::parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] = 1; });
    CHECK(std::count(hit.begin(), hit.end(), 1) == 50);
    CHECK_THROWS_AS(io::parallel_for(8, 2, [](std::size_t i) { if (i == 5) throw std::runtime_error("x"); }),
                    std::runtime_error);
}

TEST_CASE("config validation reports JSON pointers") {
    CHECK(error_path({{"kind", "nope"}}) == "/kind");
    CHECK(error_path({{"kind", "evolve"}, {"spec", {}}}) == "/spec");
    CHECK(error_path({{"kind", "evolve"}, {"params", {{"spec", {{"cfl", 0.9}}}}}}) == "/params/spec");
    CHECK(error_path({{"kind", "two-bubble"}, {"params", {{"config", {{"scales", {0.01, 1.0}}}}}}}) == "/params/config");
    CHECK(error_path({{"kind", "evolve"}, {"params", {{"spec", {{"t_end", "long"}}}}}}) == "/params/spec/t_end");
    CHECK(error_path({{"kind", "evolve"}, {"seed", -3}}) == "/seed");
    CHECK(error_path({{"kind", "channels-free"}, {"params", {{"samples", 20}, {"colour", 1}}}}) == "/params/colour");
}

TEST_CASE("minimal config echoes defaults") {
    const auto c = scenario::parse_config({{"kind", "evolve"}});
    CHECK(c.seed == 1);
    CHECK(c.params == scenario::default_params("evolve"));
    for (const auto& k : scenario::kinds()) CHECK_NOTHROW(scenario::parse_config({{"kind", k.name}}));
}

TEST_CASE("config files with syntax errors") {
    const auto dir = scratch("bad_config");
    fs::create_directories(dir);
    std::ofstream(dir / "c.json") << "{\"kind\": \"evolve\",";
    try {
        scenario::load_config(dir / "c.json");
        FAIL("accepted a truncated document");
    } catch (const scenario::ConfigError& e) {
        CHECK(e.path().empty());
    }
    fs::remove_all(dir);
}

TEST_CASE("constants scenario writes a manifest") {
    const auto dir = scratch("constants");
    const auto res = scenario::run(scenario::parse_config({{"kind", "constants"}}), dir);
    REQUIRE(res.status == 0);
    CHECK(res.summary["c_W"] == 576.0);
    const auto m = json::parse(io::read_file(dir / "manifest.json"));
    CHECK(m["kind"] == "constants");
    CHECK(m["status"] == "ok");
    for (const auto& f : m["files"]) {
        const auto content = io::read_file(dir / f["file"].get<std::string>());
        CHECK(io::sha1_hex(content) == f["sha1"]);
    }
    fs::remove_all(dir);
}

TEST_CASE("module errors produce error.json") {
    const auto dir = scratch("error");
    // one Picard sweep cannot reach the tolerance
    const auto c = scenario::parse_config({{"kind", "w-minus"}, {"params", {{"max_iterations", 1}}}});
    const auto res = scenario::run(c, dir);
    CHECK(res.status == 1);
    CHECK(fs::exists(dir / "error.json"));
    fs::remove_all(dir);
}

TEST_CASE("ode-integrate reruns are byte identical") {
    const auto c = scenario::parse_config({{"kind", "ode-integrate"}, {"seed", 4}});
    const auto a = scratch("ode_a"), b = scratch("ode_b");
    REQUIRE(scenario::run(c, a).status == 0);
    REQUIRE(scenario::run(c, b).status == 0);
    CHECK(io::read_file(a / "trajectory.csv") == io::read_file(b / "trajectory.csv"));
    const auto csv = io::read_file(a / "trajectory.csv");
    CHECK(csv.rfind("t,lambda1,lambda2,beta1,beta2,A,V,gamma", 0) == 0);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("output root follows the environment") {
    const auto c = scenario::parse_config({{"kind", "appendix-b"}, {"seed", 7}});
    ::setenv("SOLLAB_OUTPUT_ROOT", "/tmp/sollab_root", 1);
    CHECK(scenario::output_dir(c) == fs::path("/tmp/sollab_root") / "appendix-b-seed7");
    ::unsetenv("SOLLAB_OUTPUT_ROOT");
    CHECK(scenario::output_root() == fs::path("runs"));
}
