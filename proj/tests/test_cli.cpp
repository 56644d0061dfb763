#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

std::string bin_path() {
    const char* p = std::getenv("FERGLAB_BIN");
    REQUIRE(p != nullptr);
    return p;
}

std::string config_dir() {
    const char* p = std::getenv("FERGLAB_CONFIGS");
    REQUIRE(p != nullptr);
    return p;
}

int run(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd = env_prefix + "\"" + bin_path() + "\" " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() / ("ferglab_cli_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("certify exits 0 on a passing model and 1 on a failing gate") {
    CHECK(run("certify " + config_dir() + "/ex1.json") == 0);
    CHECK(run("certify " + config_dir() + "/ex1.json --gate corollary") == 0);
}

TEST_CASE("malformed configs exit with code 2") {
    CHECK(run("certify " + config_dir() + "/bad_rowsum.json") == 2);
    CHECK(run("certify " + config_dir() + "/bad_missing_kernel.json") == 2);
    CHECK(run("certify /nonexistent/file.json") == 2);
}

TEST_CASE("reach without a likelihood floor exits with code 3") {
    CHECK(run("reach " + config_dir() + "/ex1_eps0.json --obs 0 --out " +
              fresh_dir("reach3").string()) == 3);
}

TEST_CASE("reach converges for the constant-column model") {
    const fs::path out = fresh_dir("reach_ok");
    CHECK(run("reach " + config_dir() + "/positive_eq.json --obs ybar --prior uniform "
              "--prior point:2 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "reach.json"));
    CHECK(fs::exists(out / "reach_trace_0.csv"));
    CHECK(fs::exists(out / "reach_trace_1.csv"));
}

TEST_CASE("contract emits byte-identical reports for a fixed seed") {
    const fs::path a = fresh_dir("contract_a"), b = fresh_dir("contract_b");
    const std::string args = "contract " + config_dir() +
                             "/ex1.json --pairs 20 --nmax 3 --reg-pairs 5 --seed 42 --out ";
    CHECK(run(args + a.string()) == 0);
    CHECK(run(args + b.string()) == 0);
    CHECK(slurp(a / "decay.csv") == slurp(b / "decay.csv"));
}

TEST_CASE("thread cap does not change the numbers") {
    const fs::path a = fresh_dir("threads_1"), b = fresh_dir("threads_4");
    const std::string args = "contract " + config_dir() +
                             "/ex1.json --pairs 20 --nmax 3 --reg-pairs 5 --seed 7 --out ";
    CHECK(run(args + a.string(), "FERGLAB_THREADS=1 ") == 0);
    CHECK(run(args + b.string(), "FERGLAB_THREADS=4 ") == 0);
    CHECK(slurp(a / "decay.csv") == slurp(b / "decay.csv"));
}
