#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run
{
    int status = -1;
    std::string output;
};

/* runs the simulator through the shell, capturing stdout and stderr */
Run run(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" + QRAM_SIM_PATH + "' " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe))
        r.output += buf;
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

class Cli : public ::testing::Test
{
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() /
              ("qram_cli_" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()
                                             ->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text)
    {
        const auto p = dir / name;
        std::ofstream(p) << text;
        return p;
    }

    fs::path dir;
};

const std::string configs = QRAM_CONFIG_DIR;

} // namespace

TEST_F(Cli, SpectraWritesCsvWithProvenance)
{
    const auto out = dir / "s.csv";
    const auto r = run("spectra --config " + configs + "/fig2_spectra.yaml --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.output;
    const auto text = slurp(out);
    EXPECT_EQ(text.rfind("# label: fig2_spectra\n", 0), 0u);
    EXPECT_NE(text.find("# config_hash: "), std::string::npos);
    EXPECT_NE(text.find("# tool_version: "), std::string::npos);
    EXPECT_NE(text.find("nu_over_kappa,eps_transfer,eps_blockade"), std::string::npos);
}

TEST_F(Cli, JsonFormat)
{
    const auto out = dir / "s.json";
    const auto r = run("check-matching --config " + configs + "/check_matching.yaml --format json --out " +
                       out.string());
    ASSERT_EQ(r.status, 0) << r.output;
    const auto j = nlohmann::json::parse(slurp(out));
    EXPECT_TRUE(j.contains("provenance"));
    EXPECT_TRUE(j["provenance"].contains("config_hash"));
    EXPECT_TRUE(j.contains("summary"));
}

TEST_F(Cli, InvalidConfigExitsTwoWithLine)
{
    const auto cfg = write("bad.yaml", "scenario: spectra\nparams:\n  g2: 0.001\n  f2: 0.3\n  kappa: -1\n");
    const auto r = run("spectra --config " + cfg.string());
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.output.find("line 5"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("kappa"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitTwo)
{
    EXPECT_EQ(run("spectra").status, 2);
    EXPECT_EQ(run("").status, 2);
    EXPECT_EQ(run("teleport --config x.yaml").status, 2);
    EXPECT_EQ(run("spectra --config " + (dir / "missing.yaml").string()).status, 2);
    EXPECT_EQ(run("store --config " + configs + "/fig2_spectra.yaml").status, 2);
    EXPECT_EQ(run("spectra --config " + configs + "/fig2_spectra.yaml --format xml").status, 2);
    EXPECT_EQ(run("--version").status, 0);
}

TEST_F(Cli, NumericalFailureExitsThree)
{
    const auto cfg = write("store.yaml", R"(scenario: store
matched: {c_atom: 10}
pulse: {duration: 5}
solver: {max_steps: 10}
)");
    const auto r = run("store --config " + cfg.string() + " --out " + (dir / "o.csv").string());
    EXPECT_EQ(r.status, 3) << r.output;
    EXPECT_NE(r.output.find("step budget"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "o.csv"));
}

TEST_F(Cli, OutputDirectoryFromEnvironment)
{
    const auto out = dir / "env_out";
    const auto r = run("spectra --config " + configs + "/fig2_spectra.yaml",
                       "QRAM_OUTPUT_DIR='" + out.string() + "'");
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_TRUE(fs::exists(out / "fig2_spectra.csv"));
}

TEST_F(Cli, SweepIsIndependentOfWorkerCount)
{
    const auto cfg = write("sweep.yaml", R"(scenario: sweep
label: small
matched: {c_atom: 10}
pulse: {duration: 2}
echo: {tau: auto}
sweep:
  parameter: duration
  values: [2, 3]
  series: {parameter: t2, values: [100, 1000]}
)");
    const auto a = dir / "a.csv", b = dir / "b.csv";
    ASSERT_EQ(run("sweep --config " + cfg.string() + " --workers 1 --out " + a.string()).status, 0);
    ASSERT_EQ(run("sweep --config " + cfg.string() + " --workers 3 --out " + b.string()).status, 0);
    const auto ta = slurp(a);
    EXPECT_EQ(ta, slurp(b));
    /* four data rows under the header */
    std::istringstream is(ta);
    std::string line;
    int rows = 0;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#')
            ++rows;
    EXPECT_EQ(rows, 5);
}

TEST_F(Cli, AddressScenarioJson)
{
    const auto out = dir / "a.json";
    const auto r = run("address --config " + configs + "/address.yaml --out " + out.string());
    ASSERT_EQ(r.status, 0) << r.output;
    const auto j = nlohmann::json::parse(slurp(out));
    ASSERT_TRUE(j.contains("data"));
    EXPECT_NEAR(j["data"]["norm"].get<double>(), 1.0, 1e-12);
    EXPECT_EQ(j["data"]["terms"].size(), 3u);
}
