#include "cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using rccat::Json;
using namespace rccat::cli;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli_main(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("rccat_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }

    fs::path dir;
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_F(Cli, SimulateThenDetect) {
    ASSERT_EQ(run({"simulate", "--n", "1500", "--tau", "500,1000", "--means", "-3,3,-3", "--setting", "2", "--eta", "0.1",
                   "--seed", "4", "-o", path("s.csv"), "--truth", path("t.json")})
                  .code,
              kExitOk);
    const auto r = run({"detect", "-i", path("s.csv"), "--w", "100", "--eta", "0.1", "--M", "5", "-o", path("r.json"),
                        "--trace", path("trace.csv"), "--truth", path("t.json")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto report = rccat::read_report(path("r.json"));
    ASSERT_FALSE(report.change_points.empty());
    for (std::size_t cp : report.change_points) {
        const long d = std::min(std::labs(long(cp) - 500), std::labs(long(cp) - 1000));
        EXPECT_LE(d, 100);
    }
    EXPECT_EQ(slurp(path("trace.csv")).rfind("j,score,candidate,detected,truth\n", 0), 0u);
    const auto truth = Json::parse(slurp(path("t.json")));
    EXPECT_EQ(truth.at("seed"), 4);
}

TEST_F(Cli, DetectTopKAndArc) {
    run({"simulate", "--n", "900", "--tau", "300,600", "--means", "0,2,0", "--seed", "1", "-o", path("s.csv")});
    const auto top = run({"detect", "-i", path("s.csv"), "--w", "60", "--top-k", "2"});
    ASSERT_EQ(top.code, kExitOk) << top.err;
    EXPECT_EQ(Json::parse(top.out).at("change_points").size(), 2u);
    const auto arc = run({"detect", "-i", path("s.csv"), "--w", "60", "--method", "arc", "--b", "1"});
    ASSERT_EQ(arc.code, kExitOk) << arc.err;
    EXPECT_EQ(Json::parse(arc.out).at("method"), "arc");
    const auto shifted = run({"detect", "-i", path("s.csv"), "--w", "60", "--alpha-mode", "shifted", "--V", "4"});
    ASSERT_EQ(shifted.code, kExitOk) << shifted.err;
    EXPECT_EQ(run({"detect", "-i", path("s.csv"), "--w", "60", "--alpha-mode", "shifted"}).code, kExitUsage);
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"detect"}).code, kExitUsage);
    EXPECT_EQ(run({"detect", "-i", "x.csv", "--bogus"}).code, kExitUsage);
    EXPECT_EQ(run({"detect", "-i", "x.csv", "--method", "nope"}).code, kExitUsage);
    EXPECT_EQ(run({"--help"}).code, kExitOk);
    EXPECT_EQ(run({"--version"}).out, std::string(rccat::kVersion) + "\n");

    std::ofstream(path("bad.csv")) << "value\n1\nnan\n";
    const auto bad = run({"detect", "-i", path("bad.csv")});
    EXPECT_EQ(bad.code, kExitData);
    EXPECT_NE(bad.err.find("line 3"), std::string::npos);
    EXPECT_EQ(run({"detect", "-i", path("missing.csv")}).code, kExitData);

    std::ofstream(path("short.csv")) << "value\n1\n2\n3\n";
    EXPECT_EQ(run({"detect", "-i", path("short.csv"), "--w", "100"}).code, kExitData);
    EXPECT_EQ(run({"detect", "-i", path("short.csv"), "--eta", "1.5"}).code, kExitUsage);
}

TEST_F(Cli, ConvertEta) {
    const auto r = run({"convert-eta", "--epsilon", "0.1", "--beta", "0.1", "--n", "1000", "--k0", "200"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_NEAR(std::stod(r.out), 0.216, 5e-4);
    const auto clamped = run({"convert-eta", "--epsilon", "0.5", "--k0", "2"});
    EXPECT_EQ(clamped.code, kExitOk);
    EXPECT_NE(clamped.err.find("clamped"), std::string::npos);
    EXPECT_EQ(run({"convert-eta", "--epsilon", "0.5", "--k0", "2", "--strict"}).code, kExitUsage);
    EXPECT_EQ(run({"convert-eta", "--epsilon", "1.5"}).code, kExitUsage);
}

TEST_F(Cli, Estimate) {
    run({"simulate", "--n", "2000", "--means", "1.5", "--noise", "gaussian", "--seed", "3", "-o", path("s.csv")});
    const auto r = run({"estimate", "-i", path("s.csv"), "--eta", "0", "--M", "4"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_NEAR(j.at("estimate").get<double>(), 1.5, j.at("radius").get<double>());
    const auto s = run({"estimate", "-i", path("s.csv"), "--eta", "0", "--M", "4", "--V", "1.5"});
    ASSERT_EQ(s.code, kExitOk) << s.err;
    EXPECT_EQ(Json::parse(s.out).at("method"), "shifting-device");
}

TEST_F(Cli, ConfigFileAndFlagsWin) {
    std::ofstream(path("sim.cfg")) << "# simulated\nn = 400\nmeans = 0,2\ntau = 200\nseed = 9\n";
    ASSERT_EQ(run({"simulate", "--config", path("sim.cfg"), "-o", path("a.csv")}).code, kExitOk);
    EXPECT_EQ(rccat::load_csv(path("a.csv")).size(), 400u);
    ASSERT_EQ(run({"simulate", "--config", path("sim.cfg"), "--n", "300", "--tau", "100", "-o", path("b.csv")}).code,
              kExitOk);
    EXPECT_EQ(rccat::load_csv(path("b.csv")).size(), 300u);
    std::ofstream(path("bad.cfg")) << "n 400\n";
    EXPECT_EQ(run({"simulate", "--config", path("bad.cfg")}).code, kExitUsage);
    std::ofstream(path("unknown.cfg")) << "colour = blue\n";
    EXPECT_EQ(run({"simulate", "--config", path("unknown.cfg")}).code, kExitUsage);
}

TEST_F(Cli, SeedFromEnvironment) {
    ::setenv("RCCAT_SEED", "21", 1);
    const auto a = run({"simulate", "--n", "50", "--means", "0"});
    ::unsetenv("RCCAT_SEED");
    const auto b = run({"simulate", "--n", "50", "--means", "0", "--seed", "21"});
    const auto c = run({"simulate", "--n", "50", "--means", "0", "--seed", "22"});
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
}

TEST_F(Cli, BenchIsByteIdentical) {
    const std::vector<std::string> args{"bench", "--setting", "1", "--reps", "3", "--seed", "7", "--w", "100",
                                        "--eta", "0.1,0.2"};
    auto with_csv = [&](const std::string& csv) {
        auto a = args;
        a.insert(a.end(), {"--csv", csv});
        return a;
    };
    const auto a = run(with_csv(path("a.csv")));
    const auto b = run(with_csv(path("b.csv")));
    ASSERT_EQ(a.code, kExitOk) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    EXPECT_NE(a.out.find("w = 100"), std::string::npos);
}
