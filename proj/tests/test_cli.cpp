// Runs the hinrec binary end to end and checks exit codes.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(HINREC_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("cli: every subcommand on a synthetic dataset") {
  const auto dir = testsupport::scratch_dir("cli");
  const std::string d = dir.string();
  REQUIRE(run("synth --preset movielens --seed 4 --out " + d + "/data") == 0);
  const std::string cfg = "--config " + d + "/data/experiment.ini";
  CHECK(run("ingest " + cfg + " --out " + d + "/ingest") == 0);
  CHECK(fs::exists(dir / "ingest" / "um.tsv"));
  CHECK(run("pcore " + cfg + " --k 3 --out " + d + "/pcore") == 0);
  CHECK(run("expand " + cfg + " --fold 1 --out " + d + "/expand") == 0);
  CHECK(run("sample " + cfg + " --fold 1 --workers 2 --out " + d + "/sample") == 0);
  CHECK(fs::exists(dir / "sample" / "relations" / "umgm.tsv"));
  CHECK(run("nig " + cfg + " --relations " + d + "/sample/relations --out " + d + "/nig") == 0);
  CHECK(run("train " + cfg + " --relations " + d + "/sample/relations --model dmf-ig --out " + d + "/train") == 0);
  CHECK(run("baseline " + cfg + " --algo rp3 --param 0.5 --fold 1 --out " + d + "/base") == 0);
  CHECK(run("eval " + cfg + " --fold 1 --recs " + d + "/base/recs_rp3.tsv --out " + d + "/eval") == 0);
  CHECK(slurp(dir / "eval" / "eval.csv").find("recs_rp3,0,10,") != std::string::npos);
  CHECK(run("bench " + cfg + " --reps 3 --out " + d + "/bench") == 0);
  CHECK(run("run " + cfg + " --seed 9 --out " + d + "/run1") == 0);
  CHECK(run("run " + cfg + " --seed 9 --workers 1 --out " + d + "/run2") == 0);
  CHECK(slurp(dir / "run1" / "eval.csv") == slurp(dir / "run2" / "eval.csv"));
  CHECK(slurp(dir / "run1" / "eval.csv").find("seed=9") != std::string::npos);
}

TEST_CASE("cli: configuration errors exit with 2") {
  const auto dir = testsupport::scratch_dir("cli_config");
  const std::string d = dir.string();
  REQUIRE(run("synth --preset ring --out " + d + "/data") == 0);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("run") == 2);
  CHECK(run("run --config " + d + "/nope.ini") == 2);
  CHECK(run("run --config " + d + "/data/experiment.ini --seed notanumber") == 2);
  CHECK(run("synth --preset nosuch --out " + d + "/x") == 2);
  CHECK(run("baseline --config " + d + "/data/experiment.ini --algo p4") == 2);
  CHECK(run("expand --config " + d + "/data/experiment.ini --fold 7") == 2);
  std::ofstream(dir / "bad.ini") << slurp(dir / "data" / "experiment.ini") << "[pruning]\nthreshold = 3\n";
  CHECK(run("run --config " + d + "/bad.ini") == 2);
  std::ofstream(dir / "badpath.ini") << slurp(dir / "data" / "experiment.ini") << "[metapaths]\nbad = ui,>zz\n";
  CHECK(run("sample --config " + d + "/badpath.ini") == 2);
}

TEST_CASE("cli: stage failures exit with 3") {
  const auto dir = testsupport::scratch_dir("cli_stage");
  const std::string d = dir.string();
  REQUIRE(run("synth --preset ring --out " + d + "/data") == 0);
  const std::string cfg = "--config " + d + "/data/experiment.ini";
  std::ofstream(dir / "recs.tsv") << "u0\tnot-an-item\t1\n";
  CHECK(run("eval " + cfg + " --recs " + d + "/recs.tsv --out " + d + "/e") == 3);
  std::ofstream(dir / "data" / "ui.tsv", std::ios::app) << "u1\ti2\n";  // missing weight on a rated edge
  CHECK(run("run " + cfg + " --out " + d + "/r") == 3);
}
