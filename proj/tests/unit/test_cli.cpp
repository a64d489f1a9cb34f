#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <doctest.h>

#ifdef TRANSFLOW_CLI

namespace fs = std::filesystem;

namespace {

const std::string kData = TRANSFLOW_TEST_DATA;

int run(const std::string& args, const std::string& env = {}) {
    const std::string cmd = env + " \"" + std::string(TRANSFLOW_CLI) + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("transflow_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string pair(const std::string& a, const std::string& b) { return kData + "/" + a + " " + kData + "/" + b; }

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("successful commands") {
        const fs::path out = scratch("ok");
        const std::string o = "--out " + out.string() + " --n 256 ";
        CHECK(run(o + "map " + pair("uniform_1_2.json", "uniform_0_3.json")) == 0);
        CHECK(fs::exists(out / "map.csv"));
        CHECK(fs::exists(out / "map.json"));
        CHECK(run(o + "field " + pair("gaussian_0_1.json", "gaussian_1_2.json")) == 0);
        CHECK(run(o + "flow " + pair("gaussian_0_1.json", "gaussian_1_2.json") + " --x0 0,1 --t 0,0.5,1") == 0);
        CHECK(run(o + "verify " + pair("uniform_1_2.json", "uniform_0_3.json")) == 0);
        CHECK(fs::exists(out / "report.json"));
        CHECK(run(o + "example affine") == 0);
        CHECK(fs::exists(out / "affine" / "trajectories.csv"));
        CHECK(run(o + "sudakov " + pair("disk_1.json", "disk_2.json") + " --samples 2000") == 0);
        CHECK(fs::exists(out / "sudakov_report.json"));
        CHECK(run(o + "pathology --variant quadratic --i-max 20000000 --decades 1") == 0);
        fs::remove_all(out);
    }

    TEST_CASE("verification failure exits 1") {
        const fs::path out = scratch("fail");
        CHECK(run("--out " + out.string() + " --tol-julia 1e-30 verify " +
                  pair("gaussian_0_1.json", "gaussian_1_2.json")) == 1);
        fs::remove_all(out);
    }

    TEST_CASE("input errors exit 2") {
        const fs::path out = scratch("bad");
        const std::string o = "--out " + out.string() + " ";
        CHECK(run(o + "map " + pair("malformed.json", "uniform_0_3.json")) == 2);
        CHECK(run(o + "map " + pair("missing_field.json", "uniform_0_3.json")) == 2);
        CHECK(run(o + "map " + kData + "/nope.json " + kData + "/uniform_0_3.json") == 2);
        CHECK(run(o + "--n 100 map " + pair("uniform_1_2.json", "uniform_0_3.json")) == 2);
        CHECK(run(o + "example nonexistent") == 2);
        CHECK(run(o + "sudakov " + pair("square.json", "square_diag.json")) == 2);
        CHECK(run(o) == 2);
        fs::remove_all(out);
    }

    TEST_CASE("outputs are deterministic") {
        const fs::path a = scratch("det_a");
        const fs::path b = scratch("det_b");
        for (const fs::path& out : {a, b}) {
            REQUIRE(run("--out " + out.string() + " --n 512 example gaussian") == 0);
            REQUIRE(run("--out " + out.string() + " sudakov " + pair("disk_1.json", "disk_2.json") +
                        " --samples 2000") == 0);
        }
        for (const char* f : {"gaussian/map.csv", "gaussian/field.csv", "gaussian/trajectories.csv",
                              "gaussian/report.json", "gaussian/field.json", "field_samples.csv",
                              "sudakov_report.json"}) {
            CAPTURE(f);
            CHECK(slurp(a / f) == slurp(b / f));
            CHECK_FALSE(slurp(a / f).empty());
        }
        fs::remove_all(a);
        fs::remove_all(b);
    }

    TEST_CASE("output directory from the environment") {
        const fs::path out = scratch("env");
        CHECK(run("--format json map " + pair("uniform_1_2.json", "uniform_0_3.json"),
                  "TRANSFLOW_OUT=" + out.string()) == 0);
        CHECK(fs::exists(out / "map.json"));
        CHECK_FALSE(fs::exists(out / "map.csv"));
        fs::remove_all(out);
    }
}

#endif
