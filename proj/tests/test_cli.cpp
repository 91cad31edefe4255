#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qrem/model.hpp"
#include "qrem/serialize.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using qrem::Json;

namespace {

std::string cli_path() {
  const char* env = std::getenv("QREM_CLI");
  REQUIRE_MESSAGE(env != nullptr, "QREM_CLI must point at the qrem binary");
  return env;
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tmp_file(const std::string& name) {
  return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("invalid configuration exits with code 2") {
  CHECK(run_cli("sample --n 0 --seed 1 --out /tmp/never.bin") == 2);
  CHECK(run_cli("sweep --n 4 --seed 1 --gamma-grid nonsense") == 2);
  CHECK(run_cli("definitely-not-a-subcommand") == 2);
}

TEST_CASE("capacity violations exit with code 3") {
  CHECK(run_cli("sample --n 24 --seed 1 --budget-mb 1 --out /tmp/never.bin") ==
        3);
}

TEST_CASE("sampled tables round-trip through the CLI") {
  const fs::path path = tmp_file("qrem_cli_table.bin");
  REQUIRE(run_cli("sample --n 8 --seed 42 --out " + path.string()) == 0);
  const qrem::EnergyTable loaded = qrem::read_energy_table(path);
  const qrem::EnergyTable direct = qrem::EnergyTable::sample({8, 42, 0.0});
  REQUIRE(loaded.size() == direct.size());
  for (uint64_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i] == direct[i]);
  }
  fs::remove(path);
}

TEST_CASE("min-gap emits a parseable JSONL artifact") {
  const fs::path path = tmp_file("qrem_cli_records.jsonl");
  REQUIRE(run_cli("min-gap --n 10 --seeds 0..3 --threads 2 --out " +
                  path.string()) == 0);
  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  const Json header = Json::parse(line);
  qrem::check_artifact_header(header);  // throws on schema mismatch
  CHECK(header.at("config").at("subcommand") == "min-gap");

  std::vector<qrem::MinGapRecord> records;
  while (std::getline(in, line)) {
    const Json row = Json::parse(line);
    if (row.contains("min_gap")) {
      records.push_back(qrem::min_gap_record_from_json(row));
    }
  }
  REQUIRE(records.size() == 4);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].seed == i);
    CHECK(records[i].min_gap > 0.0);
    CHECK(records[i].min_gap <= records[i].gap_at_bracket_lo);
    CHECK(records[i].min_gap <= records[i].gap_at_bracket_hi);
  }
  fs::remove(path);
}

TEST_CASE("payload bytes are identical across thread counts") {
  const fs::path a = tmp_file("qrem_cli_t1.jsonl");
  const fs::path b = tmp_file("qrem_cli_t4.jsonl");
  REQUIRE(run_cli("ensemble --n 10 --seeds 0..3 --threads 1 --out " +
                  a.string()) == 0);
  REQUIRE(run_cli("ensemble --n 10 --seeds 0..3 --threads 4 --out " +
                  b.string()) == 0);
  const std::string payload_a = slurp(a);
  const std::string payload_b = slurp(b);
  // The embedded configs differ in the threads field by construction;
  // compare everything else line by line.
  std::istringstream sa(payload_a), sb(payload_b);
  std::string la, lb;
  REQUIRE(std::getline(sa, la));
  REQUIRE(std::getline(sb, lb));
  // The runs differ only in --threads and --out; everything else in the
  // header and every payload line must match exactly.
  Json ha = Json::parse(la), hb = Json::parse(lb);
  ha["config"].erase("threads");
  hb["config"].erase("threads");
  ha["config"].erase("out");
  hb["config"].erase("out");
  CHECK(ha == hb);
  while (std::getline(sa, la)) {
    REQUIRE(std::getline(sb, lb));
    CHECK(la == lb);
  }
  CHECK_FALSE(std::getline(sb, lb));
  fs::remove(a);
  fs::remove(b);
}

TEST_CASE("config file wins over flags and lands in the header") {
  const fs::path cfg = tmp_file("qrem_cli_cfg.json");
  {
    std::ofstream out(cfg);
    out << R"({"gamma": 0.9})";
  }
  const fs::path with_cfg = tmp_file("qrem_cli_spec_a.json");
  const fs::path direct = tmp_file("qrem_cli_spec_b.json");
  REQUIRE(run_cli("spectrum --n 8 --seed 5 --gamma 0.3 --config " +
                  cfg.string() + " --out " + with_cfg.string()) == 0);
  REQUIRE(run_cli("spectrum --n 8 --seed 5 --gamma 0.9 --out " +
                  direct.string()) == 0);

  const Json a = Json::parse(slurp(with_cfg));
  const Json b = Json::parse(slurp(direct));
  CHECK(a.at("header").at("config").at("gamma") == 0.9);
  CHECK(a.at("data").at("eigenvalues") == b.at("data").at("eigenvalues"));
  fs::remove(cfg);
  fs::remove(with_cfg);
  fs::remove(direct);
}

TEST_CASE("phase-diagram grid has the advertised shape") {
  const fs::path path = tmp_file("qrem_cli_phase.csv");
  REQUIRE(run_cli("phase-diagram --t-grid 0:1.2:6 --gamma-grid 0:1.6:8 "
                  "--out " + path.string()) == 0);
  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  REQUIRE(line.rfind("# {", 0) == 0);
  const Json header = Json::parse(line.substr(2));
  qrem::check_artifact_header(header);
  REQUIRE(std::getline(in, line));
  CHECK(line == "T,gamma,label,f,f_rem,f_para");
  int rows = 0;
  while (std::getline(in, line)) rows += !line.empty();
  CHECK(rows == 6 * 8);
  fs::remove(path);
}

TEST_CASE("anneal artifact carries outcomes and the crossover point") {
  const fs::path path = tmp_file("qrem_cli_anneal.json");
  REQUIRE(run_cli("anneal --n 6 --seed 2 --tau 1,8,64 --out " +
                  path.string()) == 0);
  const Json artifact = Json::parse(slurp(path));
  qrem::check_artifact_header(artifact.at("header"));
  REQUIRE(artifact.at("data").at("outcomes").size() == 3);
  for (const auto& outcome : artifact.at("data").at("outcomes")) {
    CHECK(outcome.at("norm_error").get<double>() <= 1e-8);
    const double p = outcome.at("success_probability").get<double>();
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  fs::remove(path);
}

TEST_CASE("per-seed failures honor --keep-going") {
  // n=12 seed 13 has no avoided-crossing dip (see the sweep suite).
  const fs::path path = tmp_file("qrem_cli_fail.jsonl");
  CHECK(run_cli("min-gap --n 12 --seeds 13 --out " + path.string()) == 4);
  CHECK(run_cli("min-gap --n 12 --seeds 13 --keep-going --out " +
                path.string()) == 0);
  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));  // header
  REQUIRE(std::getline(in, line));
  const Json row = Json::parse(line);
  CHECK(row.contains("error"));
  CHECK(row.at("seed") == 13);
  fs::remove(path);
}
