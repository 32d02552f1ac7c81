// Exit-code and output-schema contract of the command-line tool, exercised
// through real subprocesses.

#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

using json = nlohmann::json;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

CmdResult run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env.empty() ? std::string() : ("env " + env + " ");
  cmd += std::string(ANISOFEM_CLI_PATH) + " " + args + " 2>/dev/null";
  CmdResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string first_line(const std::string& text) {
  auto pos = text.find('\n');
  return pos == std::string::npos ? text : text.substr(0, pos);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  REQUIRE(os.good());
  os << content;
}

}  // namespace

TEST_CASE("selftest passes, is deterministic, and honors the fault injection") {
  auto a = run_cli("selftest --seed 7");
  CHECK(a.exit_code == 0);
  auto j = json::parse(a.out);
  CHECK(j["failures"] == 0);
  CHECK(j["total"].get<int>() >= 12);

  auto b = run_cli("selftest --seed 7");
  CHECK(b.out == a.out);

  auto injected = run_cli("selftest --seed 7", "ANISOFEM_SELFTEST_FAIL=piola-identities");
  CHECK(injected.exit_code == 1);
  auto ji = json::parse(injected.out);
  bool named = false;
  for (const auto& suite : ji["suites"])
    if (suite["id"] == "piola-identities" && suite["pass"] == false) named = true;
  CHECK(named);
}

TEST_CASE("analyze-simplex values and degenerate-input exit code") {
  auto r = run_cli("analyze-simplex 0,0 1,0 0,1");
  CHECK(r.exit_code == 0);
  auto j = json::parse(r.out);
  CHECK(j["H_T"].get<double>() == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(j["H_T0"].get<double>() == doctest::Approx(4.0));

  // the thin-tetra pose: H_T of the canonical relabeling is reported
  auto r3 = run_cli("analyze-simplex 0,0,0 0.25,0,0 0.125,0.125,0 0,0,0.25");
  CHECK(r3.exit_code == 0);
  auto j3 = json::parse(r3.out);
  CHECK((j3["type"] == "i" || j3["type"] == "ii"));

  CHECK(run_cli("analyze-simplex 0,0 1,1 2,2").exit_code == 2);
  CHECK(run_cli("analyze-simplex 0,0 1,0").exit_code == 64);
}

TEST_CASE("mesh-quality contract") {
  write_file("cli_single.mesh", "anisomesh 2\nvertices 3\n0 0\n1 0\n0 1\ncells 1\n0 1 2\n");
  auto r = run_cli("mesh-quality cli_single.mesh");
  CHECK(r.exit_code == 0);
  CHECK(first_line(r.out) == "H_T0,h_T0,ratio");
  CHECK(r.out.find("summary,H=4,max_ratio=") != std::string::npos);

  write_file("cli_tjunction.mesh",
             "anisomesh 2\nvertices 4\n0 0\n2 0\n1 1\n1 0\ncells 2\n0 1 2\n0 3 2\n");
  CHECK(run_cli("mesh-quality cli_tjunction.mesh").exit_code == 3);
  CHECK(run_cli("mesh-quality cli_tjunction.mesh --allow-nonconforming").exit_code == 0);

  CHECK(run_cli("mesh-quality does_not_exist.mesh").exit_code == 2);

  write_file("cli_dup.mesh",
             "anisomesh 2\nvertices 3\n0 0\n1 0\n0 1\ncells 2\n0 1 2\n2 0 1\n");
  CHECK(run_cli("mesh-quality cli_dup.mesh").exit_code == 2);
}

TEST_CASE("convergence contract") {
  auto r = run_cli(
      "convergence --element lagrange --k 1 --l 1 --m 0 --p 2 --field trig "
      "--family \"uniform-ref;seed=unit-triangle;levels=4\"");
  CHECK(r.exit_code == 0);
  CHECK(first_line(r.out) == "h,H,error,max_error,max_bound_factor,max_ratio,observed_order");

  // H column strictly decreasing over a strip sequence
  auto strip = run_cli(
      "convergence --element lagrange --k 1 --m 0 --field trig "
      "--family \"aniso-strip-2d;gamma=2;levels=3\" --format json");
  CHECK(strip.exit_code == 0);
  auto js = json::parse(strip.out);
  double prev = 1e300;
  for (const auto& row : js["rows"]) {
    double big = row["H"].get<double>();
    CHECK(big < prev);
    prev = big;
  }
  CHECK(js["order_applicable"] == true);
  CHECK(js["order_in_range"] == true);

  // incompatible indices are a usage error
  CHECK(run_cli("convergence --element lagrange --k 1 --m 3 --field trig").exit_code == 64);
  CHECK(run_cli("convergence --element rt --k 0 --m 1 --field vtrig").exit_code == 64);
  CHECK(run_cli("convergence --element nosuch --field trig").exit_code == 64);
}

TEST_CASE("optimality contract") {
  auto r = run_cli("optimality --s-list 0.25,0.0625 --eps-list 1.5");
  CHECK(r.exit_code == 0);
  CHECK(first_line(r.out) == "s,eps,I_T,H_T,ratio,pass");
  // every row passes the lower bound
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    CHECK(line.back() == '1');
    ++rows;
  }
  CHECK(rows == 2);

  CHECK(run_cli("optimality --s-list 1.5 --eps-list 1.5").exit_code == 64);
  CHECK(run_cli("optimality --s-list 0.5 --eps-list 2.5").exit_code == 64);
}

TEST_CASE("unknown subcommands are usage errors") {
  CHECK(run_cli("frobnicate").exit_code == 64);
  CHECK(run_cli("").exit_code == 64);
}
