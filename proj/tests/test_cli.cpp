#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "idseries/cli.hpp"
#include "idseries/error.hpp"
#include "test_support.hpp"

using namespace idseries;
using testing::throws_error;

namespace {

const std::string kData = IDSERIES_TEST_DATA;

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"idseries"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("default grid") {
    const RunConfig cfg = parse_config({"bounds", "--model", "m", "--series", "s"});
    const std::vector<double> g = config_grid(cfg);
    REQUIRE(g.size() == 50);
    CHECK(g.front() == 0.1);
    CHECK(g.back() == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(cfg.trials == 10000);
    CHECK(cfg.seed == 1);
    CHECK(cfg.threads == 1);
    CHECK(cfg.output_path == "-");
}

TEST_CASE("subcommand defaults") {
    const RunConfig curves = parse_config({"curves"});
    CHECK(curves.t_min == 0.01);
    CHECK(curves.t_max == 1000.0);
    CHECK(curves.t_steps == 500);
    CHECK(parse_config({"curves", "--c", "50"}).t_max == 50.0);
    CHECK(parse_config({"chance", "--problem", "p", "--model", "m"}).c == 3.0);
}

TEST_CASE("flags override the config file") {
    const RunConfig from_file = parse_config({"--model", "a", "--series", "b"}, kData + "/simulate.cfg");
    CHECK(from_file.subcommand == "simulate");
    CHECK(from_file.seed == 7);
    CHECK(from_file.t_steps == 16);
    const RunConfig both = parse_config({"--seed", "11", "--model", "a", "--series", "b"}, kData + "/simulate.cfg");
    CHECK(both.seed == 11);
    CHECK(both.trials == 20000);
    const RunConfig via_flag =
        parse_config({"--config", kData + "/simulate.cfg", "--model", "a", "--series", "b", "--trials", "5"});
    CHECK(via_flag.trials == 5);
    CHECK(via_flag.t_max == 8.0);
}

TEST_CASE("unknown options are named") {
    try {
        parse_config({"bounds", "--foo", "1"});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.module() == "cli");
        CHECK(std::string(e.what()).find("--foo") != std::string::npos);
    }
    const std::string path = (std::filesystem::temp_directory_path() / "idseries_unknown_key.cfg").string();
    std::ofstream(path) << "subcommand = curves\nbogus_key = 3\n";
    try {
        parse_config({}, path);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }
    const Run r = run({"bounds", "--foo", "1"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("--foo") != std::string::npos);
}

TEST_CASE("range validation") {
    CHECK(throws_error([] { parse_config({"curves", "--t-min", "2", "--t-max", "1"}); }, "cli",
                       ErrorCode::invalid_argument));
    CHECK(throws_error([] { parse_config({"curves", "--c", "1"}); }, "cli", ErrorCode::invalid_argument));
    CHECK(throws_error([] { parse_config({"curves", "--t-steps", "1"}); }, "cli", ErrorCode::invalid_argument));
    CHECK(throws_error([] { parse_config({"frobnicate"}); }, "cli", ErrorCode::parse));
    CHECK(throws_error([] { parse_config({"bounds", "--series", "s"}); }, "cli", ErrorCode::missing_input));
}

TEST_CASE("missing model file") {
    const Run r = run({"bounds", "--model", kData + "/does_not_exist.model", "--series", kData + "/series_d4.txt"});
    CHECK(r.code != 0);
    CHECK(r.err.rfind("ERROR:cli:missing_input", 0) == 0);
}

TEST_CASE("curves include the first crossing") {
    const Run r = run({"curves", "--c", "1000"});
    REQUIRE(r.code == 0);
    const std::vector<std::string> ls = lines(r.out);
    CHECK(ls.front() == "s,Q,B,T,H");
    bool found = false;
    for (const std::string& l : ls) found = found || l.rfind("0.8830491743", 0) == 0;
    CHECK(found);
}

TEST_CASE("bounds output") {
    const Run r = run({"bounds", "--model", kData + "/gaussian.model", "--series", kData + "/series_d4.txt"});
    REQUIRE(r.code == 0);
    const std::vector<std::string> ls = lines(r.out);
    CHECK(ls.front() == "t,exact,bennett,bernstein_smooth,bernstein_piecewise,hc,beta0");
    CHECK(ls.size() == 51);
}

TEST_CASE("simulate is thread-count invariant") {
    const std::vector<std::string> base{"simulate",   "--model", kData + "/gaussian.model",
                                        "--series",   kData + "/series_d4.txt", "--trials",
                                        "4000",       "--t-steps", "12"};
    std::vector<std::string> one = base, four = base;
    one.insert(one.end(), {"--threads", "1"});
    four.insert(four.end(), {"--threads", "4"});
    const Run a = run(one);
    const Run b = run(four);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(lines(a.out).front().rfind("t,p_hat,ci_low,ci_high,exact", 0) == 0);
}

TEST_CASE("expectation output") {
    const Run r = run({"expectation", "--model", kData + "/poisson.model", "--series", kData + "/series_d4.txt",
                       "--trials", "2000"});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out).front() ==
          "mean,std_err,bound_statement,bound_proof,delta,quantile_bernstein,quantile_hc");
}

TEST_CASE("key-value subcommands") {
    const Run n = run({"nemirovski", "--model", kData + "/two_atom.model", "--series", kData + "/rect_2x2.txt",
                       "--trials", "2000"});
    CHECK(n.code == 0);
    CHECK(n.out.find("condition_ok,1") != std::string::npos);
    const Run c = run({"chance", "--model", kData + "/two_atom.model", "--problem", kData + "/chance.txt",
                       "--epsilon", "0.25", "--trials", "2000"});
    CHECK(c.code == 0);
    CHECK(c.out.find("gamma2,") != std::string::npos);
    const Run q = run({"qopt", "--model", kData + "/two_atom.model", "--problem", kData + "/qopt.txt", "--trials",
                       "1000"});
    CHECK(q.code == 0);
    CHECK(q.out.find("converged,1") != std::string::npos);
}

TEST_CASE("output file") {
    const std::string path = (std::filesystem::temp_directory_path() / "idseries_curves_out.csv").string();
    const Run r = run({"curves", "--c", "3", "--t-steps", "10", "--output", path});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "s,Q,B,T,H");
}

}
