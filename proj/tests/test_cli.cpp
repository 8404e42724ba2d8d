#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* cli = HAZVAL_CLI_PATH;

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "hazval_cli_tests";
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args) {
    const std::string cmd =
        std::string(cli) + " " + args + " >" + (work_dir() / "stdout.txt").string() +
        " 2>" + (work_dir() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string captured_stdout() {
    std::ostringstream ss;
    ss << std::ifstream(work_dir() / "stdout.txt").rdbuf();
    return ss.str();
}

std::string slurp(const fs::path& p) {
    std::ostringstream ss;
    ss << std::ifstream(p, std::ios::binary).rdbuf();
    return ss.str();
}

fs::path write_file(const std::string& name, const std::string& content) {
    const fs::path p = work_dir() / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
}

fs::path sample_csv() {
    std::ostringstream ss;
    ss.precision(17);
    ss << "time,occurrences,exposure\n";
    const int R = 25;
    for (int r = 0; r < R; ++r) {
        const double t = (r + 1) / double(R + 1);
        const int occ = (r * 7) % 5;
        ss << t << ',' << occ << ',' << 2.0 + (r % 3) << '\n';
    }
    return write_file("sample.csv", ss.str());
}

}  // namespace

TEST_CASE("usage errors exit nonzero") {
    CHECK(run("") != 0);
    CHECK(run("fit") != 0);  // missing required options
    CHECK(run("frobnicate") != 0);
}

TEST_CASE("fit writes a hazard curve") {
    const fs::path in = sample_csv();
    const fs::path out = work_dir() / "fit_out";
    REQUIRE(run("fit --input " + in.string() + " --bandwidth 0.2 --out " + out.string()) ==
            0);
    const std::string hazard = slurp(out / "hazard.csv");
    CHECK(hazard.rfind("time,hazard\n", 0) == 0);
    // 25 data rows plus header
    CHECK(std::count(hazard.begin(), hazard.end(), '\n') == 26);

    SUBCASE("best one-sided adds the side column") {
        REQUIRE(run("fit --input " + in.string() +
                    " --bandwidth 0.2 --best-one-sided --out " + out.string()) == 0);
        CHECK(slurp(out / "hazard.csv").rfind("time,hazard,side\n", 0) == 0);
    }
}

TEST_CASE("select writes the trace and the summary") {
    const fs::path in = sample_csv();
    const fs::path out = work_dir() / "sel_out";
    REQUIRE(run("select --input " + in.string() +
                " --method bo --bandwidth-grid 0.1:0.4:12 --out " + out.string()) == 0);
    CHECK(captured_stdout().rfind("bandwidth ", 0) == 0);
    const std::string trace = slurp(out / "trace.csv");
    CHECK(trace.rfind("bandwidth,score\n", 0) == 0);
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 13);
    const std::string sel = slurp(out / "selection.csv");
    CHECK(sel.find("bo,ll,") != std::string::npos);
}

TEST_CASE("error classes map to distinct exit codes") {
    // malformed input: 2
    const fs::path bad = write_file("bad.csv", "time,occurrences,exposure\n0.2,x,1\n");
    CHECK(run("fit --input " + bad.string() + " --bandwidth 0.2") == 2);
    // numeric failure (every score undefined on an exposure-free sample): 3
    std::ostringstream ss;
    ss << "time,occurrences,exposure\n";
    for (int r = 0; r < 10; ++r) ss << 0.1 * (r + 1) << ",0,0\n";
    const fs::path dead = write_file("dead.csv", ss.str());
    CHECK(run("select --input " + dead.string() + " --bandwidth-grid 0.2:0.4:4") == 3);
}

TEST_CASE("constants prints rho and psi lines") {
    REQUIRE(run("constants --kernel epanechnikov") == 0);
    const std::string out = captured_stdout();
    CHECK(out.find("psi ll cv epanechnikov 3.6") != std::string::npos);
    CHECK(out.find("rho ll epanechnikov 0.537133630745") != std::string::npos);
    CHECK(out.find("rho mbc epanechnikov 0.594794119773") != std::string::npos);
}

TEST_CASE("forecast pipeline and determinism of reruns") {
    std::ostringstream tri;
    tri << "x,z,count\n";
    const int m = 8;
    for (int x = 1; x <= m - 1; ++x)
        for (int z = 1; z <= m - x; ++z)
            tri << x << ',' << z << ',' << 10.0 * (3.0 + x) * std::exp(-0.3 * z) << '\n';
    const fs::path in = write_file("triangle.csv", tri.str());
    const fs::path out1 = work_dir() / "fc1";
    const fs::path out2 = work_dir() / "fc2";
    const std::string args = "forecast --input " + in.string() +
                             " --method cv --bandwidth-grid 1.5:4:8 --out ";
    REQUIRE(run(args + out1.string()) == 0);
    REQUIRE(run(args + out2.string()) == 0);
    for (const char* f : {"hazard1.csv", "hazard2.csv", "forecast.csv", "chain_ladder.csv"}) {
        const std::string a = slurp(out1 / f);
        CHECK(a == slurp(out2 / f));
        CHECK_FALSE(a.empty());
    }
}

TEST_CASE("simulate is deterministic in the seed") {
    const fs::path cfg = write_file("study.json", R"({
  "model": {"kind": "exponential_decay", "level": 3.0, "rate": 4.0, "baseline": 0.3},
  "n": 500, "R": 40, "seed": 11, "replications": 3,
  "estimator": "ll",
  "grid": {"min": 0.08, "max": 0.4, "count": 8},
  "methods": ["cv", "ise", "do"]
})");
    const fs::path out1 = work_dir() / "sim1";
    const fs::path out2 = work_dir() / "sim2";
    REQUIRE(run("simulate --config " + cfg.string() + " --threads 2 --out " +
                out1.string()) == 0);
    REQUIRE(run("simulate --config " + cfg.string() + " --threads 1 --out " +
                out2.string()) == 0);
    const std::string a = slurp(out1 / "results.csv");
    CHECK(a == slurp(out2 / "results.csv"));
    CHECK(a.rfind("model,n,method,m1,rerr\n", 0) == 0);
    CHECK(std::count(a.begin(), a.end(), '\n') == 4);

    SUBCASE("seed override changes the results") {
        const fs::path out3 = work_dir() / "sim3";
        REQUIRE(run("simulate --config " + cfg.string() + " --seed 99 --out " +
                    out3.string()) == 0);
        CHECK(slurp(out3 / "results.csv") != a);
    }
}
