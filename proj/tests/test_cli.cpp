#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "ldvdd/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = ldvdd::cli::run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("ldvdd_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& body) {
        const auto p = dir_ / name;
        std::ofstream(p) << body;
        return p.string();
    }

    // Two periods; cell means 1, 2, 3, 12 (RR = 2) and control shares of
    // y=1 equal to 1/2 except the treated post cell at 4/5 (ROR = 4).
    std::string saturated_fixture() {
        std::string csv = "y,q,t,b,w,firm\n";
        const double means[4] = {1, 2, 3, 12};
        int firm = 0;
        for (int k = 0; k < 4; ++k) {
            for (double f : {0.5, 1.5}) {
                const int b = (k == 3 || f > 1) ? 1 : 0;
                csv += std::to_string(means[k] * f) + "," + std::to_string(k / 2) + "," +
                       std::to_string(k % 2) + "," + std::to_string(b) + ",1," +
                       std::to_string(firm++ % 3) + "\n";
            }
        }
        // Extra treated-post rows so the ROR cell has 4 ones and 1 zero.
        csv += "12,1,1,1,1,0\n";
        csv += "12,1,1,1,1,1\n";
        csv += "12,1,1,0,1,2\n";
        return write("fixture.csv", csv);
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EffectJson) {
    const auto r = run({"effect", "--beta", "0.5", "--se", "0.2", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["command"], "effect");
    EXPECT_NEAR(j["results"]["effect"].get<double>(), 0.6487, 1e-4);
    EXPECT_NEAR(j["results"]["se_effect"].get<double>(), 0.3297, 1e-4);
    EXPECT_TRUE(j["errors"].empty());
}

TEST_F(CliTest, EffectText) {
    const auto r = run({"effect", "--beta", "0.5", "--se", "0.2"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("0.649"), std::string::npos) << r.out;
}

TEST_F(CliTest, EstimateRecoversSaturatedRatios) {
    const auto csv = saturated_fixture();
    const auto p = run({"estimate", "--csv", csv, "--family", "poisson", "--format", "json"});
    ASSERT_EQ(p.code, 0) << p.err << p.out;
    const auto j = json::parse(p.out);
    // Treated-post cell mean is (6 + 18 + 36) / 5 = 12, so RR stays 2.
    EXPECT_NEAR(j["results"]["effects"][0]["effect"].get<double>(), 1.0, 1e-8);

    const auto l = run({"estimate", "--csv", csv, "--family", "logit", "--outcome", "b",
                        "--format", "json"});
    ASSERT_EQ(l.code, 0) << l.err << l.out;
    const auto jl = json::parse(l.out);
    EXPECT_NEAR(jl["results"]["effects"][0]["effect"].get<double>(), 3.0, 1e-8);
    EXPECT_FALSE(jl["results"]["effects"][0]["rare_event_note"].get<bool>());
}

TEST_F(CliTest, EstimateWithClustersAndWeights) {
    const auto csv = saturated_fixture();
    const auto r = run({"estimate", "--csv", csv, "--family", "ols", "--weights", "w",
                        "--cluster", "firm", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["results"]["fit"]["vcov_kind"], "cluster_sandwich");
    EXPECT_NEAR(j["results"]["lin_dd"]["beta_d"].get<double>(), (12.0 - 3.0) - (2.0 - 1.0), 1e-9);
}

TEST_F(CliTest, EstimateTextReport) {
    const auto r = run({"estimate", "--csv", saturated_fixture(), "--family", "poisson"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("D"), std::string::npos);
}

TEST_F(CliTest, SummarizeCells) {
    const auto r = run({"summarize", "--csv", saturated_fixture(), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto cells = json::parse(r.out)["results"]["cells"];
    ASSERT_EQ(cells.size(), 4u);
    EXPECT_NEAR(cells[0]["mean"].get<double>(), 1.0, 1e-12);
    EXPECT_NEAR(cells[3]["mean"].get<double>(), 12.0, 1e-12);
    EXPECT_EQ(cells[3]["count"].get<int>(), 5);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"estimate"}).code, 2);
    EXPECT_EQ(run({"simulate", "--table", "--n", "100"}).code, 2);
    EXPECT_EQ(run({"simulate", "--family", "gamma"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, CsvErrorsNameTheLine) {
    const auto bad = write("bad.csv", "y,q,t\n1,0,0\n2,1,x\n");
    const auto r = run({"summarize", "--csv", bad});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("'t'"), std::string::npos) << r.err;

    const auto missing = write("missing.csv", "y,q,t\n1,0,0\n,1,1\n");
    const auto m = run({"summarize", "--csv", missing, "--format", "json"});
    EXPECT_EQ(m.code, 1);
    const auto j = json::parse(m.out);
    EXPECT_EQ(j["errors"][0]["type"], "data_error");
    EXPECT_NE(j["errors"][0]["message"].get<std::string>().find("line 3"), std::string::npos);

    const auto neg = write("neg.csv", "y,q,t\n1,0,0\n-1,1,1\n");
    EXPECT_EQ(run({"estimate", "--csv", neg, "--family", "poisson"}).code, 1);
}

TEST_F(CliTest, SingularDesignIsReported) {
    const auto csv = write("sing.csv", "y,q,t\n1,0,0\n2,0,1\n3,0,0\n4,0,1\n");
    const auto r = run({"estimate", "--csv", csv, "--family", "ols", "--format", "json"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(json::parse(r.out)["errors"][0]["type"], "singular_design");
}

TEST_F(CliTest, JsonIsCanonicalAndRepeatable) {
    const std::vector<std::string> args{"simulate", "--family", "count", "--n",      "200",
                                        "--reps",   "5",        "--seed", "3",      "--beta-d",
                                        "0.5",      "--format", "json"};
    const auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto parsed = json::parse(a.out);
    EXPECT_EQ(ldvdd::io::dump_canonical(parsed) + "\n", a.out);
    EXPECT_FALSE(parsed["config_echo"].contains("threads"));
}

TEST_F(CliTest, ConfigFileSuppliesDefaults) {
    const auto csv = saturated_fixture();
    const auto cfg = write("run.cfg", "# settings\nfamily = logit\noutcome = b\nformat = json\n"
                                      "trend = false\n");
    const auto r = run({"estimate", "--csv", csv, "--config", cfg});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["config_echo"]["family"], "logit");
    // Command-line flags win over the file.
    const auto o = run({"estimate", "--csv", csv, "--config", cfg, "--family", "ols"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(json::parse(o.out)["config_echo"]["family"], "ols");
}

TEST_F(CliTest, OutputFile) {
    const auto path = (dir_ / "report.json").string();
    const auto r = run({"effect", "--beta", "0.1", "--se", "0.1", "--format", "json", "-o", path});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    EXPECT_EQ(json::parse(in)["command"], "effect");
}
