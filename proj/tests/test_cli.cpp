#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "momenta/graph.hpp"
#include "test_util.hpp"

// Drives the installed binary end to end.
#ifndef MOMENTA_CLI_PATH
#error "MOMENTA_CLI_PATH must point at the CLI binary"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const std::string& stdin_text = "") {
    static int counter = 0;
    const fs::path dir = fs::path("cli_scratch");
    fs::create_directories(dir);
    const fs::path in = dir / ("in" + std::to_string(counter) + ".txt");
    const fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    {
        std::ofstream f(in, std::ios::binary);
        f << stdin_text;
    }
    const std::string cmd = std::string(MOMENTA_CLI_PATH) + " " + args + " < " + in.string() +
                            " 2> " + err.string();
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
    const int rc = pclose(pipe);
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream ef(err, std::ios::binary);
    r.err.assign(std::istreambuf_iterator<char>(ef), std::istreambuf_iterator<char>());
    return r;
}

const std::string kC5 = momenta::encode_graph6(testutil::cycle_graph(5));

}  // namespace

TEST_CASE("bound: pentagon JSON report") {
    auto r = run_cli("bound --k 2", kC5 + "\n");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema"] == "momenta.report.v1");
    CHECK(j["alpha"] == 2);
    CHECK(j["certified"] == "alpha_match");
    CHECK(std::abs(j["theta"][0]["value"].get<double>() - 2.23607) < 1e-4);
    CHECK(std::abs(j["theta"][1]["value"].get<double>() - 2.0) < 1e-4);
    CHECK(std::abs(j["uncertainty_constant"].get<double>() - 3.0) < 1e-3);
    CHECK(r.err.empty());  // no report data on stderr and no noise
}

TEST_CASE("bound: byte-identical reruns and text mode") {
    auto r1 = run_cli("bound --k 2 --seed 7", kC5 + "\n");
    auto r2 = run_cli("bound --k 2 --seed 7", kC5 + "\n");
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.out == r2.out);

    auto t = run_cli("bound --k 1 --out text", kC5 + "\n");
    CHECK(t.exit_code == 0);
    CHECK(t.out.find("theta_1") != std::string::npos);
}

TEST_CASE("bound: empty input exits 2") {
    auto r = run_cli("bound", "");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("no graphs parsed") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("bound: malformed graph exits 2") {
    auto r = run_cli("bound", "not-a-graph!!\n");
    CHECK(r.exit_code == 2);
    CHECK(!r.err.empty());
}

TEST_CASE("bound: weighted d=3 input reports the embedded block size") {
    auto r = run_cli("bound --format weighted --k 1 --sample 20", "n=2 d=3\n0 1 1\n");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["d"] == 3);
    CHECK(j["embedded_block"] == 6);  // 2m for the m=3 moment block
    CHECK(j["cuts"].empty());         // no odd-hole cuts for d > 2
}

TEST_CASE("batch: table-1 corpus CSV") {
    std::string corpus;
    for (int which : {2, 3, 4, 5}) corpus += momenta::encode_graph6(testutil::pentagon_hub_graph(which)) + "\n";
    auto r = run_cli("batch --k 2 --sample 40", corpus);
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "id,n,alpha,theta1,theta2,certified,errors");
    const std::string expected_alpha[] = {"3", "2", "2", "2"};
    const std::string expected_t1[] = {"3.2361", "2.2361", "2.2361", "2.2361"};
    const std::string expected_t2[] = {"3.0000", "2.0000", "2.0000", "2.0000"};
    for (int t = 0; t < 4; ++t) {
        REQUIRE(std::getline(lines, row));
        std::vector<std::string> cols;
        std::istringstream rs(row);
        std::string col;
        while (std::getline(rs, col, ',')) cols.push_back(col);
        REQUIRE(cols.size() >= 6);
        CHECK(cols[0] == "g" + std::to_string(t + 1));
        CHECK(cols[1] == "6");
        CHECK(cols[2] == expected_alpha[t]);
        CHECK(cols[3] == expected_t1[t]);
        CHECK(cols[4] == expected_t2[t]);
        CHECK(cols[5] == "alpha_match");
    }
}

TEST_CASE("batch: malformed line recorded, other rows intact") {
    const std::string corpus = kC5 + "\n???broken???\n" + kC5 + "\n";
    auto r = run_cli("batch --k 1 --sample 20", corpus);
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string header, row1, row2, row3;
    std::getline(lines, header);
    REQUIRE(std::getline(lines, row1));
    REQUIRE(std::getline(lines, row2));
    REQUIRE(std::getline(lines, row3));
    CHECK(row1.find("2.2361") != std::string::npos);
    CHECK(row2.find("parse:") != std::string::npos);
    CHECK(row3.find("2.2361") != std::string::npos);
}

TEST_CASE("batch respects --jobs with identical output") {
    std::string corpus;
    for (int which : {2, 3, 4, 5}) corpus += momenta::encode_graph6(testutil::pentagon_hub_graph(which)) + "\n";
    auto serial = run_cli("batch --k 2 --sample 30", corpus);
    auto parallel = run_cli("batch --k 2 --sample 30 --jobs 4", corpus);
    CHECK(serial.exit_code == 0);
    CHECK(parallel.exit_code == 0);
    CHECK(serial.out == parallel.out);
}

TEST_CASE("export: files per graph per level") {
    const fs::path dir = "cli_export";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto r = run_cli("export --k 2 --export-dir " + dir.string(), kC5 + "\n");
    REQUIRE(r.exit_code == 0);
    REQUIRE(fs::exists(dir / "g1_k1.dat-s"));
    REQUIRE(fs::exists(dir / "g1_k2.dat-s"));
    std::ifstream f1(dir / "g1_k1.dat-s");
    std::string text((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    CHECK(text.find("6 = bLOCKsTRUCT") != std::string::npos);
    std::ifstream f2(dir / "g1_k2.dat-s");
    std::string text2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(text2.find("16 = bLOCKsTRUCT") != std::string::npos);

    auto bad = run_cli("export --export-dir no/such/dir", kC5 + "\n");
    CHECK(bad.exit_code == 4);
}

TEST_CASE("realize: strings plus verification line") {
    auto r = run_cli("realize", momenta::encode_graph6(testutil::complete_graph(3)) + "\n");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("3 strings") != std::string::npos);
    CHECK(r.out.find("phases verified") != std::string::npos);

    auto q = run_cli("realize --format weighted", "n=2 d=3\n0 1 1\n");
    REQUIRE(q.exit_code == 0);
    CHECK(q.out.find("d=3") != std::string::npos);

    auto s = run_cli("realize --sample 2000 --seed 1", kC5 + "\n");
    REQUIRE(s.exit_code == 0);
    auto value_after = [&](const std::string& tag) {
        const auto pos = s.out.find(tag);
        REQUIRE(pos != std::string::npos);
        return std::stod(s.out.substr(pos + tag.size() + 3));
    };
    const double best = value_after("best sampled objective");
    const double polished = value_after("see-saw polished value");
    CHECK(best <= 2.0 + 1e-9);  // beta(C5) = 2 bounds every sample
    CHECK(best > 0.0);
    CHECK(polished >= 2.0 - 1e-3);  // the witness-seeded polish reaches alpha
    CHECK(polished <= 2.0 + 1e-9);
}

TEST_CASE("realize: dimension cap exits 5") {
    // n = 13 edgeless graph: 2^13 exceeds the 4096-dimensional cap
    auto g13 = momenta::encode_graph6(momenta::CommutationGraph::empty(13));
    auto r = run_cli("realize --sample 10", g13 + "\n");
    CHECK(r.exit_code == 5);
    CHECK(r.err.find("cap") != std::string::npos);
}

TEST_CASE("unknown solver backend exits 3") {
    auto r = run_cli("bound", kC5 + "\n");
    REQUIRE(r.exit_code == 0);
    setenv("MOMENTA_SOLVER", "imaginary", 1);
    auto bad = run_cli("bound", kC5 + "\n");
    unsetenv("MOMENTA_SOLVER");
    CHECK(bad.exit_code == 3);
    CHECK(bad.err.find("unknown solver backend") != std::string::npos);
    setenv("MOMENTA_SOLVER", "native", 1);
    auto good = run_cli("bound --k 1", kC5 + "\n");
    unsetenv("MOMENTA_SOLVER");
    CHECK(good.exit_code == 0);
}
