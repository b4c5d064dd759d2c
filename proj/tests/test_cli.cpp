#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace {

using nlohmann::json;

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Runs the built binary through the shell, capturing exit code and both
/// streams. `env` is prepended verbatim (e.g. "GRIDIMAGE_CELL_CAP=4").
CliResult run_cli(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path();
    const std::string tag = std::to_string(::getpid()) + "_" + std::to_string(counter++);
    const auto out_path = dir / ("gridimage_out_" + tag);
    const auto err_path = dir / ("gridimage_err_" + tag);

    std::string cmd;
    if (!env.empty()) cmd += env + " ";
    cmd += GRIDIMAGE_CLI_PATH;
    cmd += " " + args + " >" + out_path.string() + " 2>" + err_path.string();

    const int rc = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    return r;
}

json result_of(const CliResult& r) { return json::parse(r.out).at("result"); }
json manifest_of(const CliResult& r) { return json::parse(r.out).at("manifest"); }

std::filesystem::path fresh_temp(const std::string& stem) {
    return std::filesystem::temp_directory_path() /
           (stem + "_" + std::to_string(::getpid()));
}

} // namespace

TEST_CASE("cli bound reports the best theorem") {
    const CliResult r = run_cli("bound --star 3 --p 7 --sizes 2,2,2");
    REQUIRE(r.code == 0);
    const json res = result_of(r);
    CHECK(res.at("theorem") == "MainTheorem");
    CHECK(res.at("value") == 7);
    CHECK(res.at("applicable") == true);
    const json man = manifest_of(r);
    CHECK(man.at("tool") == "gridimage");
    CHECK(man.at("command") == "bound");
    CHECK(man.at("seed").is_null());
    CHECK(man.at("config").at("p") == 7);
}

TEST_CASE("cli bound exits 3 when out of scope") {
    const CliResult r = run_cli("bound --matrix 'p=5; [[1,1],[2,2]]' --sizes 2,2");
    CHECK(r.code == 3);
    const json res = result_of(r);
    CHECK(res.at("theorem") == "None");
    CHECK(res.at("value").is_null());
}

TEST_CASE("cli bound lists every candidate") {
    const CliResult r = run_cli("bound --star 3 --p 7 --sizes 4,4,4");
    REQUIRE(r.code == 0);
    const json res = result_of(r);
    CHECK(res.at("theorem") == "StarLemma");
    CHECK(res.at("value") == 37);
    bool saw_large_k = false;
    for (const auto& c : res.at("candidates")) {
        if (c.at("theorem") == "LargeK") {
            saw_large_k = true;
            CHECK(c.at("value") == 37);
        }
    }
    CHECK(saw_large_k);
}

TEST_CASE("cli bound rejects bad input") {
    CHECK(run_cli("bound --star 3 --p 6 --sizes 2,2,2").code == 2); // 6 is not prime
    CHECK(run_cli("bound --star 3 --p 7").code == 2);               // --sizes missing
    CHECK(run_cli("bound --sizes 2,2").code == 2);                  // no map at all
    CHECK(run_cli("bound --star 3 --sizes 2,2,2").code == 2);       // --star without --p
}

TEST_CASE("cli image computes exact images") {
    const CliResult star = run_cli("image --star 3 --sets 'p=5; {0,1}; {0,1}; {0,1}'");
    REQUIRE(star.code == 0);
    const json sres = result_of(star);
    CHECK(sres.at("size") == 7);
    CHECK(sres.at("points") == json::array({0, 1, 5, 6, 7, 11, 12}));

    const CliResult ident = run_cli("image --matrix 'p=5; [[1,0],[0,1]]' --sets 'p=5; {0,1}; {0,2}'");
    REQUIRE(ident.code == 0);
    CHECK(result_of(ident).at("size") == 4);

    const CliResult cover = run_cli("image --star 3 --sets 'p=5; {0,1,2,3}; {0,1,2,3}; {0,1,2,3}'");
    REQUIRE(cover.code == 0);
    CHECK(result_of(cover).at("size") == 25);
}

TEST_CASE("cli image honors the cell cap environment") {
    const CliResult capped = run_cli("image --star 3 --sets 'p=5; {0,1}; {0,1}; {0,1}'",
                                     "GRIDIMAGE_CELL_CAP=4");
    CHECK(capped.code == 4);
    CHECK(capped.err.find("25") != std::string::npos);

    const CliResult bad = run_cli("image --star 3 --sets 'p=5; {0,1}; {0,1}; {0,1}'",
                                  "GRIDIMAGE_CELL_CAP=abc");
    CHECK(bad.code == 2);
}

TEST_CASE("cli image validates the map against the grid") {
    // arity mismatch
    CHECK(run_cli("image --star 3 --sets 'p=5; {0,1}; {0,1}'").code == 2);
    // modulus mismatch
    CHECK(run_cli("image --matrix 'p=7; [[1,0],[0,1]]' --sets 'p=5; {0}; {1}'").code == 2);
    // residue out of range inside the literal
    CHECK(run_cli("image --star 3 --sets 'p=5; {0,9}; {0}; {1}'").code == 2);
}

TEST_CASE("cli normalize emits the transcript and checks the image") {
    const CliResult r =
        run_cli("normalize --matrix 'p=5; [[2,1,0],[1,0,1]]' --sets 'p=5; {0,1}; {0,1}; {0,1}'");
    REQUIRE(r.code == 0);
    const json res = result_of(r);
    CHECK(res.at("canonical").at("rows") == json::array({{1, 1, 0}, {1, 0, 1}}));
    CHECK(res.at("first_column_ones") == json::array({1, 2}));
    CHECK(res.at("kernel_vector") == json::array({4, 1, 1}));
    CHECK(res.at("image_size_before") == 8);
    CHECK(res.at("image_size_after") == 8);
    REQUIRE(res.at("transcript").size() == 2);
    CHECK(res.at("transcript")[0].at("op") == "row_multiplier");
    CHECK(res.at("transcript")[1].at("op") == "column_scale");
}

TEST_CASE("cli normalize exits 3 for out-of-scope maps") {
    const CliResult r =
        run_cli("normalize --matrix 'p=5; [[1,1,0],[2,2,0]]' --sets 'p=5; {0}; {1}; {2}'");
    CHECK(r.code == 3);
}

TEST_CASE("cli verify runs suites") {
    const CliResult cd = run_cli("verify cd");
    REQUIRE(cd.code == 0);
    const json res = result_of(cd);
    CHECK(res.at("pass") == true);
    REQUIRE(res.at("checks").size() == 1);
    CHECK(res.at("checks")[0].at("name") == "cd-exhaustive");
    CHECK(res.at("checks")[0].at("pass") == true);

    // randomized suites refuse to run without an explicit seed
    CHECK(run_cli("verify invariance").code == 2);
    CHECK(run_cli("verify invariance --seed 7").code == 0);
    CHECK(run_cli("verify no-such-suite --seed 1").code == 2);

    const CliResult csv = run_cli("verify cd --csv");
    REQUIRE(csv.code == 0);
    CHECK(csv.out.rfind("name,pass,checked,millis,detail\n", 0) == 0);
    CHECK(csv.out.find("cd-exhaustive,true,") != std::string::npos);
}

TEST_CASE("cli search scans exhaustively") {
    const CliResult r = run_cli("search --star 3 --p 3 --sizes 2,2,2 --exhaustive");
    REQUIRE(r.code == 0);
    CHECK(r.err.find("families: 27") != std::string::npos);
    const json res = result_of(r);
    CHECK(res.at("mode") == "exhaustive");
    CHECK(res.at("image_size") == 7);
    CHECK(res.at("tight") == true);
    CHECK(res.at("grid").at("sets") == json::array({{0, 1}, {0, 1}, {0, 1}}));
}

TEST_CASE("cli search random mode is seeded and reproducible") {
    CHECK(run_cli("search --star 3 --p 5 --sizes 2,2,2 --iterations 3").code == 2);

    const std::string args = "search --star 3 --p 5 --sizes 2,2,2 --iterations 3 --seed 11";
    const CliResult a = run_cli(args, "SOURCE_DATE_EPOCH=1755561600");
    const CliResult b = run_cli(args, "SOURCE_DATE_EPOCH=1755561600");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const json res = result_of(a);
    CHECK(res.at("mode") == "random");
    CHECK(res.at("image_size").get<std::int64_t>() >= 7);
    CHECK(manifest_of(a).at("seed") == 11);
}

TEST_CASE("cli search emits the csv schema") {
    const CliResult r = run_cli("search --star 3 --p 3 --sizes 2,2,2 --exhaustive --csv");
    REQUIRE(r.code == 0);
    CHECK(r.out ==
          "p,shape,theorem,bound,min_found,interval_value,tight,seed,iterations\n"
          "3,\"2,2,2\",StarLemma,7,7,7,true,,0\n");
}

TEST_CASE("cli search enforces the family cap") {
    const CliResult r = run_cli("search --star 3 --p 7 --sizes 4,4,4 --exhaustive --family-cap 100");
    CHECK(r.code == 4);
    CHECK(r.err.find("use random mode") != std::string::npos);
}

TEST_CASE("cli search caches results") {
    const auto cache = fresh_temp("gridimage_cache");
    std::filesystem::remove_all(cache);
    const std::string args =
        "search --star 3 --p 3 --sizes 2,2,2 --exhaustive --cache-dir " + cache.string();
    const CliResult first = run_cli(args);
    REQUIRE(first.code == 0);
    CHECK(first.err.find("cache hit") == std::string::npos);
    const CliResult second = run_cli(args);
    REQUIRE(second.code == 0);
    CHECK(second.err.find("cache hit") != std::string::npos);
    CHECK(second.out == first.out);
    std::filesystem::remove_all(cache);
}

TEST_CASE("cli search checkpoints and resumes") {
    const auto cp = fresh_temp("gridimage_checkpoint");
    std::filesystem::remove(cp);
    const std::string args =
        "search --star 3 --p 3 --sizes 2,2,2 --exhaustive --checkpoint " + cp.string();

    const CliResult first = run_cli(args);
    REQUIRE(first.code == 0);
    REQUIRE(std::filesystem::exists(cp));
    const json saved = json::parse(slurp(cp));
    CHECK(saved.at("checkpoint").at("position") == 27);

    const CliResult second = run_cli(args);
    REQUIRE(second.code == 0);
    CHECK(second.err.find("resuming from position 27") != std::string::npos);
    CHECK(result_of(second).at("image_size") == 7);

    // the checkpoint is bound to its configuration
    const CliResult other =
        run_cli("search --star 3 --p 3 --sizes 2,2,1 --exhaustive --checkpoint " + cp.string());
    CHECK(other.code == 2);
    CHECK(other.err.find("different configuration") != std::string::npos);
    std::filesystem::remove(cp);
}

TEST_CASE("cli conjecture reports the endpoint gap") {
    const CliResult r = run_cli("conjecture --p 7 --k 4 --iterations 4 --seed 5");
    REQUIRE(r.code == 0);
    const json res = result_of(r);
    CHECK(res.at("interval_image") == 37);
    CHECK(res.at("theorem_bound") == 37);
    CHECK(res.at("gap_interval_vs_bound") == 0);
    CHECK(res.at("exhaustive_min") == 37);
    CHECK(res.at("search_min").get<std::int64_t>() >= 37);
    CHECK(manifest_of(r).at("seed") == 5);
}

TEST_CASE("cli conjecture csv uses the shared schema") {
    const CliResult r = run_cli("conjecture --p 7 --k 4 --iterations 4 --seed 5 --csv");
    REQUIRE(r.code == 0);
    CHECK(r.out ==
          "p,shape,theorem,bound,min_found,interval_value,tight,seed,iterations\n"
          "7,\"4,4,4\",LargeK,37,37,37,true,5,4\n");
}

TEST_CASE("cli conjecture rejects k outside the window") {
    const CliResult r = run_cli("conjecture --p 7 --k 2 --iterations 2 --seed 1");
    CHECK(r.code == 3);
    CHECK(run_cli("conjecture --p 7 --k 4 --iterations 2").code == 2); // seed required
}

TEST_CASE("cli help and misuse") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("").code == 2);            // a subcommand is required
    CHECK(run_cli("frobnicate").code == 2);  // unknown subcommand
}
