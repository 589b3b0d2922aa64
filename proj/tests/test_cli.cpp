#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "freespectra/cli.hpp"

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome call(std::vector<std::string> args) {
    args.insert(args.begin(), "freespectra");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = freespectra::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return std::string(FREESPECTRA_SAMPLES_DIR) + "/" + name; }

std::string scratch(const std::string& name, const std::string& body) {
    auto p = std::filesystem::temp_directory_path() / ("fs_cli_" + name);
    std::ofstream(p) << body;
    return p.string();
}

}  // namespace

TEST_CASE("verify-xi accepts a convexotonic tuple and rejects a non-algebra") {
    auto ok = call({"verify-xi", sample("g2I.json")});
    CHECK(ok.code == 0);
    auto rep = nlohmann::json::parse(ok.out);
    CHECK(rep["command"] == "verify-xi");
    CHECK(rep["verdict"] == "pass");
    auto bad = call({"verify-xi", scratch("bad.json", R"({"Xi": [[[0, 1], [0, 0]], [[0, 0], [1, 0]]]})")});
    CHECK(bad.code == 1);
}

TEST_CASE("malformed input exits with code 2") {
    CHECK(call({"verify-xi", scratch("broken.json", "{\"Xi\": [[1, 2], ")}).code == 2);
    CHECK(call({"verify-xi", "/nonexistent/file.json"}).code == 2);
    CHECK(call({"no-such-command"}).code == 2);
    CHECK(call({"catalog", "get", "../index"}).code == 2);
}

TEST_CASE("reports are deterministic for a fixed seed") {
    std::vector<std::string> args{"certify", "--A", sample("pq_A.json"), "--C", sample("Vminus1.json"), "--degree", "4", "--seed", "7"};
    auto a = call(args), b = call(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
    auto rep = nlohmann::json::parse(a.out);
    CHECK(rep["seed"] == 7);
    CHECK(rep.contains("inputs_digest"));
}

TEST_CASE("catalog list and eval at the origin") {
    auto l = call({"catalog", "list"});
    CHECK(l.code == 0);
    auto rep = nlohmann::json::parse(l.out);
    CHECK(rep["result"]["entries"].size() == 18);
    auto e = call({"eval", "--xi", sample("g2I.json"), "--point", sample("zero.json")});
    CHECK(e.code == 0);
}
