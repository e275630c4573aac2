// Drives the screlax executable; its path is the first command-line argument.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_dir;

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = "'" + g_cli + "' " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, got);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path path = g_dir / name;
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kIdentity = "2 2\n1 0\n0 1\n1 0.2\n0.3 0.3\n0.1\n";

}  // namespace

TEST_CASE("solve prints the solution and the certified gap") {
  const std::string prob = write("identity.txt", kIdentity);
  const std::string trace = (g_dir / "trace.csv").string();
  const Outcome o = run("solve " + prob + " --variant sr --trace " + trace);
  CHECK(o.code == 0);
  std::istringstream lines(o.out);
  std::string sol, gap;
  std::getline(lines, sol);
  std::getline(lines, gap);
  CHECK(sol == "0.636364,0.000000");
  REQUIRE(gap.rfind("gap,", 0) == 0);
  CHECK(std::stod(gap.substr(4)) <= 1e-12);
  CHECK(slurp(trace).rfind("iter,flops,gap,card_I,card_J,radius\n0,0,", 0) == 0);

  for (const char* v : {"apg", "apgs", "apgr"}) CHECK(run("solve " + prob + " --variant " + v).code == 0);
}

TEST_CASE("solve rejects malformed and invalid problems") {
  CHECK(run("solve " + write("hdr.txt", "2 two\n1 0\n0 1\n1 0.2\n0.3 0.3\n0.1\n")).code == 2);
  CHECK(run("solve " + write("short.txt", "2 2\n1 0\n0 1\n1 0.2\n")).code == 2);
  CHECK(run("solve " + write("neg.txt", "2 2\n1 0\n0 1\n1 0.2\n-1 0.3\n0.1\n")).code == 3);
  CHECK(run("solve " + write("eps.txt", "2 2\n1 0\n0 1\n1 0.2\n0.3 0.3\n0\n")).code == 3);
  CHECK(run("solve " + write("id2.txt", kIdentity) + " --variant fista").code == 3);
  CHECK(run("solve " + (g_dir / "missing.txt").string()).code == 2);
}

TEST_CASE("bench is deterministic and feeds profile") {
  const std::string cfg = write("bench.cfg",
                                "setup = gaussian\nm = 20\nn = 40\nn_instances = 5\nflop_budget = 2e5\nseed = 3\n");
  const std::string r1 = (g_dir / "r1.csv").string(), r2 = (g_dir / "r2.csv").string();
  const Outcome o = run("bench " + cfg + " -o " + r1);
  CHECK(o.code == 0);
  CHECK(o.out.find("SR: instances=5 median_gap=") != std::string::npos);
  CHECK(run("bench " + cfg + " -o " + r2).code == 0);
  const std::string a = slurp(r1);
  CHECK(a == slurp(r2));
  CHECK(std::count(a.begin(), a.end(), '\n') == 21);

  const std::string prof = (g_dir / "profile.csv").string();
  CHECK(run("profile " + r1 + " --tau-min 1e-16 --tau-max 1 --tau-points 33 -o " + prof).code == 0);
  const std::string p = slurp(prof);
  CHECK(p.rfind("variant,tau,rho\n", 0) == 0);
  CHECK(std::count(p.begin(), p.end(), '\n') == 1 + 4 * 33);
}

TEST_CASE("bench and profile reject bad inputs") {
  CHECK(run("bench " + write("zero.cfg", "n_instances = 0\n") + " -o " + (g_dir / "x.csv").string()).code == 2);
  CHECK(run("profile " + write("empty.csv", "") + " -o " + (g_dir / "p.csv").string()).code == 2);
  CHECK(run("profile " + write("junk.csv", "setup,seed,variant,flops_budget,final_gap\nfoo\n") + " -o " +
            (g_dir / "p.csv").string())
            .code == 2);
}

TEST_CASE("profile of an all-zero SR column") {
  const std::string res = write("zeros.csv",
                                "setup,seed,variant,flops_budget,final_gap\ngaussian,0,SR,10,0\ngaussian,1,SR,10,0\n");
  const std::string prof = (g_dir / "pz.csv").string();
  REQUIRE(run("profile " + res + " --tau-points 5 -o " + prof).code == 0);
  std::istringstream in(slurp(prof));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(line.rfind(',') + 1) == "1");
  }
  CHECK(rows == 5);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path to screlax> [doctest options]\n");
    return 2;
  }
  g_cli = fs::absolute(argv[1]).string();
  g_dir = fs::temp_directory_path() / ("screlax_cli_" + std::to_string(::getpid()));
  fs::create_directories(g_dir);
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  const int rc = ctx.run();
  fs::remove_all(g_dir);
  return rc;
}
