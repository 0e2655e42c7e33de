#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "linea/cli.hpp"

using namespace linea;
using nlohmann::json;
using Catch::Approx;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

json run_json(const std::vector<std::string>& args, int expect_code = 0) {
    auto res = run_cli(args);
    INFO(res.err);
    REQUIRE(res.exit_code == expect_code);
    return json::parse(res.out);
}

} // namespace

TEST_CASE("cli: linearize coeffs reproduces 1/n!") {
    auto doc = run_json({"linearize", "coeffs", "--poly", "z^2", "--fixed-point", "1",
                         "--order", "30"});
    CHECK(doc["command"] == "linearize coeffs");
    CHECK(doc["config"]["seed"] == 1);
    CHECK(doc["result"]["lambda"]["re"].get<double>() == Approx(2.0));
    auto coeffs = doc["result"]["coefficients"];
    REQUIRE(coeffs.size() == 31);
    double factorial = 1.0;
    for (int n = 2; n <= 30; ++n) {
        factorial *= n;
        CHECK(coeffs[n]["re"].get<double>() == Approx(1.0 / factorial).epsilon(1e-9));
    }
    CHECK(doc["diagnostics"]["residuals"]["functional_equation"].get<double>() < 1e-9);
    CHECK_FALSE(doc.contains("error"));
}

TEST_CASE("cli: linearize order --empirical") {
    auto doc = run_json({"linearize", "order", "--poly", "1.5*z+z^2", "--fixed-point", "0",
                         "--empirical", "--radii", "1e2,1e3,1e4,1e5"});
    CHECK(doc["result"]["method"] == "growth_fit");
    CHECK(doc["result"]["value"].get<double>() == Approx(1.7095).margin(0.09));
    auto exact = run_json({"linearize", "order", "--poly", "1.5*z+z^2", "--fixed-point", "0"});
    CHECK(exact["result"]["method"] == "exact_formula");
    CHECK(exact["result"]["value"].get<double>() == Approx(1.7095112914).epsilon(1e-9));
}

TEST_CASE("cli: qd exp-identity") {
    auto doc = run_json({"qd", "exp-identity", "--w", "2", "--terms", "100000"});
    CHECK(doc["result"]["abs_diff"].get<double>() < 1e-3);
    CHECK(doc["result"]["rhs"]["re"].get<double>() == Approx(0.5));
}

TEST_CASE("cli: roots and fixed-points") {
    auto doc = run_json({"roots", "--poly", "z^2-4"});
    REQUIRE(doc["result"]["roots"].size() == 2);
    CHECK(doc["result"]["roots"][0]["re"].get<double>() == Approx(-2.0));
    CHECK(doc["result"]["roots"][1]["re"].get<double>() == Approx(2.0));

    auto fps = run_json({"fixed-points", "--poly", "1.5*z+z^2"});
    REQUIRE(fps["result"]["fixed_points"].size() == 2);
    CHECK(fps["result"]["fixed_points"][1]["classification"] == "repelling");
}

TEST_CASE("cli: poincare-series with require-verdict") {
    auto ok = run_cli({"poincare-series", "--poly", "z^2-1", "--w", "3", "--t", "2", "--depth",
                       "12", "--require-verdict", "converged"});
    CHECK(ok.exit_code == 0);
    auto doc = json::parse(ok.out);
    CHECK(doc["diagnostics"]["verdict"] == "converged");

    // a Siegel interior query is not converged: exit 2 with the error field
    auto bad = run_cli({"area", "siegel", "--theta", "0.6180339887498949", "--w-in", "0.05",
                        "--w-out", "3", "--depth", "8", "--require-verdict",
                        "diverging_suspected"});
    // trace_out is the verdict carrier; it is not diverging at depth 8
    CHECK(bad.exit_code == 2);
    auto bdoc = json::parse(bad.out);
    CHECK(bdoc["error"]["type"] == "VerdictRequirement");
}

TEST_CASE("cli: area sum and distance") {
    auto sum = run_json({"area", "sum", "--map", "exp", "--w", "1", "--t", "2", "--levels",
                         "18"});
    CHECK(sum["result"]["value"].get<double>() == Approx(1.0 / 12.0).margin(1e-3));
    CHECK(sum["diagnostics"]["verdict"] == "converged");

    auto dist = run_json({"area", "distance", "--w", "1", "--k-max", "10000"});
    CHECK(dist["result"]["value"].get<double>() == Approx(M_PI * M_PI / 12.0).margin(1e-3));
}

TEST_CASE("cli: area mc determinism, byte-identical stdout") {
    std::vector<std::string> args{"area", "mc",      "--map",     "exp",  "--region",
                                  "disc:1,0,0.3",    "--r-max",   "50",   "--samples",
                                  "20000",           "--seed",    "9"};
    auto a = run_cli(args);
    auto b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);

    auto c = run_cli({"area", "mc", "--map", "exp", "--region", "disc:1,0,0.3", "--r-max", "50",
                      "--samples", "20000", "--seed", "10"});
    CHECK(a.out != c.out);
}

TEST_CASE("cli: csv output") {
    auto res = run_cli({"area", "el-growth", "--poly", "z^2-1", "--fixed-point",
                        "1.6180339887498949", "--region", "julia:z^2-1", "--n-max", "3",
                        "--samples", "2000", "--format", "csv"});
    REQUIRE(res.exit_code == 0);
    std::istringstream lines(res.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "n,area,std_error");
    int rows = 0;
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);  // n = 0..3
}

TEST_CASE("cli: json round-trips and carries the schema fields") {
    auto res = run_cli({"schwarzian-order", "--kind", "log-singularity-count", "--value", "2"});
    REQUIRE(res.exit_code == 0);
    auto doc = json::parse(res.out);
    for (const char* key : {"command", "config", "result", "diagnostics"}) CHECK(doc.contains(key));
    CHECK(doc["result"]["value"].get<double>() == 1.0);
    CHECK(doc["result"]["num"] == 1);
    CHECK(doc["result"]["den"] == 1);
    // re-serialize: parse(dump) is the identity
    CHECK(json::parse(doc.dump()) == doc);
}

TEST_CASE("cli: exit codes") {
    CHECK(run_cli({"no-such-command"}).exit_code == 3);
    CHECK(run_cli({"roots"}).exit_code == 3);                                 // missing --poly
    CHECK(run_cli({"roots", "--poly", "z^^2"}).exit_code == 3);               // parse error
    CHECK(run_cli({"linearize", "coeffs", "--poly", "z^2", "--fixed-point", "0"}).exit_code ==
          2);  // superattracting: NotRepelling
    auto res = run_cli({"linearize", "coeffs", "--poly", "z^2", "--fixed-point", "0"});
    auto doc = json::parse(res.out);
    CHECK(doc["error"]["type"] == "NotRepelling");
}

TEST_CASE("cli: config file with flag override") {
    std::string path = "test_cli_config.ini";
    {
        std::ofstream f(path);
        f << "seed = 42\nsamples = 5000\nformat = json\n";
    }
    auto doc = run_json({"area", "mc", "--map", "exp", "--region", "disc:1,0,0.3", "--r-max",
                         "50", "--config", path, "--samples", "7000"});
    CHECK(doc["config"]["seed"] == 42);       // from file
    CHECK(doc["config"]["samples"] == 7000);  // flag overrides file
    std::remove(path.c_str());
}

TEST_CASE("cli: output to file") {
    std::string path = "test_cli_out.json";
    auto res = run_cli({"roots", "--poly", "z^2-1", "--output", path});
    REQUIRE(res.exit_code == 0);
    CHECK(res.out.empty());
    std::ifstream f(path);
    REQUIRE(f.good());
    json doc = json::parse(f);
    CHECK(doc["result"]["roots"].size() == 2);
    std::remove(path.c_str());
}

TEST_CASE("cli: remaining subcommand coverage") {
    SECTION("critical-orbit") {
        auto doc = run_json({"critical-orbit", "--poly", "z^2-1"});
        CHECK(doc["result"]["connected"] == true);
        CHECK(doc["result"]["postcritical_points"].size() == 2);
        auto esc = run_json({"critical-orbit", "--poly", "z^2-5"});
        CHECK(esc["result"]["connected"] == false);
    }
    SECTION("preimages") {
        auto doc = run_json({"preimages", "--poly", "z^2", "--w", "4", "--depth", "2"});
        REQUIRE(doc["result"]["levels"].size() == 3);
        CHECK(doc["result"]["levels"][1].size() == 2);
        CHECK(doc["result"]["levels"][2].size() == 4);
    }
    SECTION("poincare-series with a restriction") {
        auto full = run_json({"poincare-series", "--poly", "z^2-1", "--w", "3", "--depth", "6"});
        auto cut = run_json({"poincare-series", "--poly", "z^2-1", "--w", "3", "--depth", "6",
                             "--restrict", "disc:0,0,1.2"});
        for (int k = 0; k < 6; ++k)
            CHECK(cut["result"]["level_sums"][k].get<double>() <=
                  full["result"]["level_sums"][k].get<double>() + 1e-15);
    }
    SECTION("area sum cosh-sqrt") {
        auto doc = run_json({"area", "sum", "--map", "cosh-sqrt", "--w", "10", "--t", "2",
                             "--levels", "16"});
        CHECK(doc["result"]["value"].get<double>() == Approx(0.0111303182).margin(1e-6));
    }
    SECTION("top-level order shorthand") {
        auto doc = run_json({"order", "--poly", "z^2", "--fixed-point", "1"});
        CHECK(doc["command"] == "order");
        CHECK(doc["result"]["value"].get<double>() == Approx(1.0));
    }
    SECTION("linearize eval") {
        auto doc = run_json({"linearize", "eval", "--poly", "z^2", "--fixed-point", "1", "--z",
                             "10"});
        CHECK(doc["result"]["value"]["re"].get<double>() ==
              Approx(22026.4657948).epsilon(1e-7));
    }
    SECTION("qd pole-fit --exact-rational") {
        auto doc = run_json({"qd", "pole-fit", "--exact-rational", "--num", "1", "--den",
                             "z^3-2*z^2+z"});
        CHECK(doc["result"]["pole_order_at_infinity"].get<double>() == Approx(1.0).margin(0.05));
    }
    SECTION("qd pushforward with skip-poles") {
        auto doc = run_json({"qd", "pushforward", "--map", "exp", "--num", "1", "--den", "z^4",
                             "--w", "1", "--terms", "100000", "--skip-poles"});
        CHECK(doc["result"]["sigma"]["re"].get<double>() ==
              Approx(1.0 / 720.0).epsilon(1e-4));
        CHECK(doc["result"]["skipped_pole_preimages"] == 1);
    }
    SECTION("threads option") {
        auto a = run_cli({"area", "mc", "--map", "exp", "--region", "disc:1,0,0.3", "--r-max",
                          "50", "--samples", "20000", "--threads", "2"});
        auto b = run_cli({"area", "mc", "--map", "exp", "--region", "disc:1,0,0.3", "--r-max",
                          "50", "--samples", "20000", "--threads", "2"});
        REQUIRE(a.exit_code == 0);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("cli: schwarzian kinds") {
    CHECK(run_json({"schwarzian-order", "--kind", "entire-nonlinearity", "--value",
                    "0"})["result"]["value"] == 1.0);
    CHECK(run_json({"schwarzian-order", "--kind", "entire-nonlinearity", "--value",
                    "1"})["result"]["value"] == 2.0);
    CHECK(run_json({"schwarzian-order", "--kind", "meromorphic-schwarzian", "--value",
                    "1"})["result"]["value"] == 1.5);
}
