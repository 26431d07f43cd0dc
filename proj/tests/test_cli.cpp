// Drives the installed command-line binary and checks exit codes and outputs.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

fs::path tmp_dir() {
  static const fs::path dir = [] {
    fs::path d(HOTION_TEST_TMP);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path p = tmp_dir() / name;
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result run(const std::string& args) {
  const std::string cmd = std::string("'") + HOTION_CLI_PATH + "' " + args + " 2>" +
                          (tmp_dir() / "stderr.txt").string();
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string last_stderr() { return slurp(tmp_dir() / "stderr.txt"); }

double value_after(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + " ");
  if (pos == std::string::npos) return -1.0;
  return std::stod(text.substr(pos + key.size() + 1));
}

const char* kStirap = R"({
  "gate": {"mode": "stirap"},
  "phonon": {"state": "fock:1", "n_max": 3},
  "schedule": {"duration_s": 1e-3, "dt_s": 1e-7, "pump_peak_rad_per_s": 1e5, "stokes_peak_rad_per_s": 1e6},
  "trace": {"n": 1, "stride": 50}
})";

}  // namespace

TEST(Cli, TruthTableThermal) {
  const auto cfg = write_config("thermal.json", R"({"phonon": {"state": "thermal:2.0", "n_max": 64,
      "max_discarded_weight": 1e-6}})");
  const auto out = tmp_dir() / "thermal_report.json";
  const auto r = run("truth-table --config " + cfg.string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << last_stderr();
  EXPECT_GT(value_after(r.out, "qubit_fidelity"), 1 - 1e-12) << r.out;
  EXPECT_GT(value_after(r.out, "phonon_restoration_fidelity"), 1 - 1e-12) << r.out;
  const std::string report = slurp(out);
  EXPECT_NE(report.find("\"table_deviation\""), std::string::npos);
}

TEST(Cli, MalformedPhononSpecExits2) {
  const auto cfg = write_config("bad_spec.json", R"({"phonon": {"state": "fock:"}})");
  const auto r = run("truth-table --config " + cfg.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(last_stderr().find("fock"), std::string::npos);
}

TEST(Cli, MissingScheduleExits2) {
  const auto cfg = write_config("no_schedule.json", R"({"gate": {"mode": "stirap"}})");
  const auto r = run("truth-table --config " + cfg.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(last_stderr().find("schedule required"), std::string::npos);
}

TEST(Cli, UsageErrorsExit2) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("truth-table").code, 2);
  EXPECT_EQ(run("truth-table --config x.json --format xml").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, SimulationErrorExits3) {
  const auto cfg = write_config("leak.json", R"({"phonon": {"state": "coherent:3,0", "n_max": 8}})");
  EXPECT_EQ(run("truth-table --config " + cfg.string()).code, 3);
}

TEST(Cli, EmptySweepExits2) {
  const auto cfg = write_config("empty_sweep.json", R"({"sweep": {"axes": []}})");
  EXPECT_EQ(run("sweep --config " + cfg.string()).code, 2);
}

TEST(Cli, SweepIsByteIdentical) {
  const auto cfg = write_config("sweep.json", R"({"phonon": {"state": "random", "n_max": 6},
      "sweep": {"axes": [{"name": "epsilon", "values": [0, 0.005, 0.01]}]}})");
  const auto a = run("sweep --config " + cfg.string() + " --seed 11");
  const auto b = run("sweep --config " + cfg.string() + " --seed 11");
  ASSERT_EQ(a.code, 0) << last_stderr();
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 4);
  const auto timed = run("sweep --timing --config " + cfg.string() + " --seed 11");
  EXPECT_NE(timed.out.find("runtime_s"), std::string::npos);
  const auto json = run("sweep --format json --config " + cfg.string() + " --seed 11");
  EXPECT_NE(json.out.find("\"columns\""), std::string::npos);
}

TEST(Cli, WorkerCapKeepsOutput) {
  const auto cfg = write_config("sweep_cap.json", R"({"phonon": {"state": "fock:2", "n_max": 6},
      "sweep": {"axes": [{"name": "epsilon", "values": [0, 0.01, 0.02, 0.03]}]}})");
  const auto one = run("sweep --config " + cfg.string());
  const auto capped = [&] {
    setenv("HOTION_MAX_WORKERS", "1", 1);
    auto r = run("sweep --config " + cfg.string());
    unsetenv("HOTION_MAX_WORKERS");
    return r;
  }();
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(one.out, capped.out);
}

TEST(Cli, StirapTrace) {
  const auto cfg = write_config("trace.json", kStirap);
  const auto out = tmp_dir() / "trace.csv";
  const auto r = run("stirap-trace --config " + cfg.string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << last_stderr();
  const std::string csv = slurp(out);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t_s,omega_pump_rad_per_s,omega_stokes_n_rad_per_s,pop_1_n,pop_3_n,pop_2_n1");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 202);
  const auto again = run("stirap-trace --config " + cfg.string());
  EXPECT_EQ(again.out, csv);
}

TEST(Cli, StirapTraceNeedsStirapMode) {
  const auto cfg = write_config("trace_ideal.json", "{}");
  EXPECT_EQ(run("stirap-trace --config " + cfg.string()).code, 2);
}

TEST(Cli, StirapTruthTableCsv) {
  const auto cfg = write_config("stirap_tt.json", kStirap);
  const auto r = run("truth-table --format csv --config " + cfg.string());
  ASSERT_EQ(r.code, 0) << last_stderr();
  EXPECT_NE(r.out.find("efficiency_up"), std::string::npos);
  EXPECT_NE(r.out.find("phonon_restoration_fidelity "), std::string::npos);
}
