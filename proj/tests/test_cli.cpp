#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace harmflow;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("harmflow_cli_" + std::to_string(::getpid()) + "_" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    Result run(const std::string& args) const {
        const auto out = path("stdout.txt");
        const auto err = path("stderr.txt");
        const std::string cmd = std::string(HARMFLOW_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text_file(out), read_text_file(err)};
    }

    std::string simulate(const std::string& scenario, const std::string& csv_name) const {
        const auto csv = path(csv_name);
        const auto r = run("simulate " + scenario + " -o " + csv);
        EXPECT_EQ(r.code, 0) << r.err;
        return csv;
    }

    std::string write_scenario(const std::string& name, const json& doc) const {
        const auto p = path(name);
        write_text_file(p, doc.dump(2));
        return p;
    }

    fs::path dir_;
};

json scenario_doc(const std::string& file) { return json::parse(read_text_file(fixture::scenario_path(file))); }

}  // namespace

TEST_F(Cli, HelpAndUsageErrors) {
    EXPECT_EQ(run("--help").code, 0);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("bogus").code, 2);
    EXPECT_EQ(run("design --q 50").code, 2);
}

TEST_F(Cli, DesignWritesLoadableBankAndWarns) {
    const auto bank = path("bank.json");
    const auto r = run("design --c 11.09e-6 --q 106.2,107.8,108.3,105.1 --hp-corner 858.3679859858704 "
                       "--hp-q 2.970240676899715 -o " + bank);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_EQ(filter_bank_from_json(read_text_file(bank)), fixture::designed_bank());

    const auto quiet = run("design --c 11.09e-6 --q 50 --no-high-pass");
    EXPECT_EQ(quiet.code, 0);
    EXPECT_TRUE(quiet.err.empty()) << quiet.err;
    EXPECT_EQ(filter_bank_from_json(quiet.out).size(), 4u);

    EXPECT_EQ(run("design --c -1 --q 50 --no-high-pass").code, 2);
    EXPECT_EQ(run("design --c 11.09e-6 --q 50").code, 2);
}

TEST_F(Cli, SimulateWritesAllChannels) {
    const auto csv = simulate(fixture::scenario_path("filtered.json"), "filtered.csv");
    const auto w = read_waveform_csv(csv);
    EXPECT_EQ(w.channel_names(), standard_channels());
    std::ifstream f(csv);
    std::string header;
    std::getline(f, header);
    EXPECT_EQ(header.rfind("t_s,", 0), 0u);
    for (const char* ch : {"i_filter_a", "i_filter_b", "i_filter_c"}) {
        double peak = 0.0;
        for (double v : w.channel(ch)) peak = std::max(peak, std::abs(v));
        EXPECT_GT(peak, 0.0) << ch;
    }
    const auto meta = json::parse(read_text_file(path("filtered.meta.json")));
    EXPECT_EQ(meta["steps"], 50000);
    EXPECT_FALSE(meta.contains("wall_time_s"));
}

TEST_F(Cli, SimulateIsByteDeterministic) {
    const auto a = simulate(fixture::scenario_path("baseline.json"), "a.csv");
    const auto b = simulate(fixture::scenario_path("baseline.json"), "b.csv");
    EXPECT_EQ(read_text_file(a), read_text_file(b));
    EXPECT_EQ(read_text_file(path("a.meta.json")), read_text_file(path("b.meta.json")));
}

TEST_F(Cli, SimulateSeveralScenarios) {
    const std::string out = path("runs");
    const auto r = run("simulate " + fixture::scenario_path("baseline.json") + " " +
                       fixture::scenario_path("filtered.json") + " --out-dir " + out);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(out + "/baseline.csv"));
    EXPECT_TRUE(fs::exists(out + "/filtered.meta.json"));
    const auto single = simulate(fixture::scenario_path("baseline.json"), "single.csv");
    EXPECT_EQ(read_text_file(out + "/baseline.csv"), read_text_file(single));
}

TEST_F(Cli, SimulateInputErrors) {
    auto doc = scenario_doc("baseline.json");
    doc["solver"]["duration_s"] = 0.1;
    const auto r = run("simulate " + write_scenario("short.json", doc) + " -o " + path("x.csv"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("solver.duration_s"), std::string::npos) << r.err;

    write_text_file(path("broken.json"), "{\n  \"basis\": [1,\n}");
    const auto broken = run("simulate " + path("broken.json") + " -o " + path("x.csv"));
    EXPECT_EQ(broken.code, 2);
    EXPECT_NE(broken.err.find("line 3"), std::string::npos) << broken.err;

    EXPECT_EQ(run("simulate " + path("missing.json") + " -o " + path("x.csv")).code, 2);
}

TEST_F(Cli, SingularSystemIsNumericalFailure) {
    auto doc = scenario_doc("baseline.json");
    doc["solver"]["diode_on_ohm"] = 1e-300;
    doc["solver"]["diode_off_ohm"] = 1e-290;
    const auto r = run("simulate " + write_scenario("singular.json", doc) + " -o " + path("x.csv"));
    EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(Cli, AnalyzeWritesSpectrumChartAndSummary) {
    const auto csv = simulate(fixture::scenario_path("baseline.json"), "baseline.csv");
    const auto r = run("analyze " + csv + " --v-channel v_src_a -o " + path("base"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("THD"), std::string::npos);
    const auto summary = json::parse(read_text_file(path("base.summary.json")));
    EXPECT_NEAR(summary["thd"].get<double>(), 0.2077, 0.03);
    EXPECT_FALSE(summary["ieee519"]["pass"].get<bool>());
    EXPECT_TRUE(fs::exists(path("base.svg")));
    EXPECT_EQ(read_text_file(path("base.spectrum.csv")).rfind("order,frequency_hz,magnitude_rms,phase_rad\n", 0), 0u);
}

TEST_F(Cli, AnalyzeUnknownChannel) {
    const auto csv = simulate(fixture::scenario_path("baseline.json"), "baseline.csv");
    const auto r = run("analyze " + csv + " --channel i_src_q -o " + path("x"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("i_src_a"), std::string::npos) << r.err;
}

TEST_F(Cli, ScanReportsResonances) {
    const auto r = run("scan " + fixture::scenario_path("table2_bank.json") + " -o " + path("scan"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto res = json::parse(read_text_file(path("scan.resonances.json")));
    const std::vector<double> series = res["series_resonances_hz"];
    EXPECT_EQ(series, (std::vector<double>{250.0, 350.0, 552.0, 650.0, 918.0}));
    const auto csv = read_text_file(path("scan.csv"));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 952);
}

TEST_F(Cli, ScanHighPassAloneApproachesResistance) {
    json bank = json::parse(read_text_file(fixture::scenario_path("table2_bank.json")));
    json only_hp = bank;
    only_hp["branches"] = json::array({bank["branches"].back()});
    write_text_file(path("hp.json"), only_hp.dump());
    const auto r = run("scan " + path("hp.json") + " --f-end 1e6 --points 2001 -o " + path("hp"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = read_text_file(path("hp.csv"));
    const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
    const double abs_z = std::stod(last.substr(last.rfind(',') + 1));
    EXPECT_NEAR(abs_z, 49.66, 0.01 * 49.66);
}

TEST_F(Cli, ScanInvalidRange) {
    EXPECT_EQ(run("scan " + fixture::scenario_path("table2_bank.json") + " --f-start 1000 --f-end 50 -o " + path("s")).code, 2);
    EXPECT_EQ(run("scan " + fixture::scenario_path("table2_bank.json") + " --points 1 -o " + path("s")).code, 2);
}

TEST_F(Cli, ReportComparesRuns) {
    const auto base = simulate(fixture::scenario_path("baseline.json"), "baseline.csv");
    const auto filt = simulate(fixture::scenario_path("filtered.json"), "filtered.csv");
    const auto r = run("report " + base + " " + filt + " -o " + path("cmp"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(read_text_file(path("cmp.json")));
    EXPECT_LT(j["filtered"]["thd"].get<double>(), 0.05);
    EXPECT_TRUE(j["ieee519_flip"].get<bool>());
    EXPECT_LT(j["thd_reduction_ratio"].get<double>(), 0.3);
    EXPECT_TRUE(fs::exists(path("cmp.svg")));

    const auto same = run("report " + base + " " + base + " -o " + path("same"));
    ASSERT_EQ(same.code, 0);
    const auto s = json::parse(read_text_file(path("same.json")));
    EXPECT_EQ(s["delta"]["thd"].get<double>(), 0.0);
    EXPECT_EQ(s["delta"]["true_power_factor"].get<double>(), 0.0);
    EXPECT_FALSE(s["ieee519_flip"].get<bool>());
}

TEST_F(Cli, ReportRejectsMismatchedRates) {
    const auto base = simulate(fixture::scenario_path("baseline.json"), "baseline.csv");
    auto doc = scenario_doc("baseline.json");
    doc["solver"]["dt_s"] = 2e-5;
    const auto coarse = simulate(write_scenario("coarse.json", doc), "coarse.csv");
    const auto r = run("report " + base + " " + coarse + " -o " + path("cmp"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("sample rates"), std::string::npos) << r.err;
}
