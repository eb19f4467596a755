// Exercises the CLI as a black box: the binary path arrives via the
// CSTRAIN_CLI environment variable set by CTest. Each subcommand must stay a
// thin adapter, so outputs are diffed against direct library calls.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "cstrain/core_linalg.hpp"
#include "cstrain/dense_matrix.hpp"
#include "cstrain/rand_models.hpp"

using namespace cstrain;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const char* bin = std::getenv("CSTRAIN_CLI");
    REQUIRE(bin != nullptr);
    std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 512> buf;
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

void make_dir(const std::string& path) {
    int rc = std::system(("mkdir -p " + path).c_str());
    REQUIRE(rc == 0);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const std::string dir = "/tmp/cstrain_cli_test";

}  // namespace

TEST_CASE("rip subcommand prints the library epsilon") {
    make_dir(dir);
    DenseMatrix m(2, 2, {1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0});
    write_matrix_text(m, dir + "/m.txt");

    RunResult r = run_cli("rip --matrix " + dir + "/m.txt --t 2");
    CHECK(r.exit_code == 0);
    double printed = std::strtod(r.out.c_str(), nullptr);
    CHECK(printed == doctest::Approx(rip_constant(m, 2).epsilon).epsilon(1e-15));
}

TEST_CASE("recover on the identity writes x = b") {
    make_dir(dir);
    DenseMatrix eye(3, 3);
    for (int i = 0; i < 3; ++i) eye(i, i) = 1.0;
    write_matrix_text(eye, dir + "/I.txt");
    Eigen::VectorXd b(3);
    b << 2, -1, 0.5;
    write_vector_text(b, dir + "/b.txt");

    RunResult r = run_cli("recover --matrix " + dir + "/I.txt --rhs " + dir +
                          "/b.txt --out " + dir + "/x.txt --report " + dir +
                          "/rep.json");
    CHECK(r.exit_code == 0);
    Eigen::VectorXd x = read_vector_text(dir + "/x.txt");
    CHECK((x - b).lpNorm<Eigen::Infinity>() <= 1e-9);
    CHECK(slurp(dir + "/rep.json").find("\"status\": \"Optimal\"") !=
          std::string::npos);
}

TEST_CASE("recover reports Infeasible with exit 1") {
    make_dir(dir);
    DenseMatrix m(3, 2, {1, 0, 0, 1, 1, 1});
    write_matrix_text(m, dir + "/inc.txt");
    Eigen::VectorXd b(3);
    b << 1, 1, 3;
    write_vector_text(b, dir + "/incb.txt");
    RunResult r = run_cli("recover --matrix " + dir + "/inc.txt --rhs " + dir +
                          "/incb.txt");
    CHECK(r.exit_code == 1);
}

TEST_CASE("gen produces a readable matrix plus sidecar metadata") {
    make_dir(dir);
    RunResult r = run_cli("gen --kind component --n 20 --p 4 --theta 0.5 "
                          "--seed 11 --stream 2 --out " +
                          dir + "/X.txt");
    CHECK(r.exit_code == 0);
    DenseMatrix x = read_matrix_text(dir + "/X.txt");
    CHECK(x.rows() == 20);
    CHECK(x.cols() == 4);
    ModelSpec spec;
    spec.theta = 0.5;
    DenseMatrix ref = gen_component_matrix(20, 4, spec, RngStream{11, 2});
    CHECK(x.entries() == ref.entries());
    CHECK(slurp(dir + "/X.txt.meta.json").find("\"seed\": 11") !=
          std::string::npos);
}

TEST_CASE("unknown flags exit with code 2") {
    RunResult r = run_cli("rip --matrix nowhere.txt --t 2 --bogus 7");
    CHECK(r.exit_code == 2);
    RunResult r2 = run_cli("frobnicate");
    CHECK(r2.exit_code == 2);
}

TEST_CASE("missing file exits with code 1") {
    RunResult r = run_cli("rip --matrix /tmp/definitely_missing.txt --t 2");
    CHECK(r.exit_code == 1);
}

TEST_CASE("rip sampled mode prints a lower bound") {
    make_dir(dir);
    DenseMatrix m = gen_gaussian_sensing(6, 9, RngStream{44, 4});
    write_matrix_text(m, dir + "/s.txt");
    RunResult exact = run_cli("rip --matrix " + dir + "/s.txt --t 3");
    RunResult sampled =
        run_cli("rip --matrix " + dir + "/s.txt --t 3 --samples 10 --seed 5");
    CHECK(exact.exit_code == 0);
    CHECK(sampled.exit_code == 0);
    CHECK(std::strtod(sampled.out.c_str(), nullptr) <=
          std::strtod(exact.out.c_str(), nullptr) + 1e-12);
}

TEST_CASE("experiment produces the CSV/JSON pair") {
    make_dir(dir);
    {
        std::ofstream f(dir + "/cfg.json");
        f << R"({
  "dims": {"m": 56, "n": 64, "p": 4, "q": 8, "s": 32, "t": 4, "t_bar": 2, "u": 48},
  "trials": 2,
  "master_seed": 31,
  "record_timings": false,
  "output_dir": ")" << dir
          << R"(/expout"
})";
    }
    RunResult r = run_cli("experiment --config " + dir + "/cfg.json");
    CHECK(r.exit_code == 0);
    std::string csv = slurp(dir + "/expout/trials.csv");
    CHECK(csv.rfind("trial_index,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(slurp(dir + "/expout/summary.json").find("pipeline_rate") !=
          std::string::npos);

    // explicit flags override the config file
    RunResult r1 = run_cli("experiment --config " + dir +
                           "/cfg.json --trials 1 --output-dir " + dir +
                           "/expout1");
    CHECK(r1.exit_code == 0);
    std::string csv1 = slurp(dir + "/expout1/trials.csv");
    CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 2);
}
