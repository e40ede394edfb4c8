#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <string>
#include <sys/wait.h>

// End-to-end checks of the command-line tool built alongside the library.

namespace {

struct run_result {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

run_result run_cli(const std::string& args) {
  const std::string cmd = std::string(CLI_BINARY) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  run_result res;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) res.output.append(buf, n);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("examples list prints one row per built-in problem") {
  const run_result r = run_cli("examples list");
  CHECK(r.exit_code == 0);
  CHECK(count_lines(r.output) == 4);
  CHECK(r.output.find("exa1  q=40  λ≈26.9376+6.9215i") != std::string::npos);
  CHECK(r.output.find("exa2") != std::string::npos);
  CHECK(r.output.find("exa3  q=8") != std::string::npos);
  CHECK(r.output.find("exa4  q=π²/4+2  λ≈±3.8741i") != std::string::npos);
}

TEST_CASE("solve reports the spectrum as JSON and exits by the count bound") {
  const run_result r = run_cli("solve --example exa4 --box -5,5,0.5,20 --real-window -10,10");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"real_eigs\"") != std::string::npos);
  CHECK(r.output.find("\"nonreal\"") != std::string::npos);
  CHECK(r.output.find("\"M\": 1") != std::string::npos);
  CHECK(r.output.find("\"N\": 1") != std::string::npos);
  CHECK(r.output.find("\"bound_ok\": true") != std::string::npos);
  CHECK(r.output.find("3.874079") != std::string::npos);
}

TEST_CASE("solve handles an eigenvalue-free box") {
  const run_result r = run_cli("solve --example exa4 --box 100,101,1,2 --real-window 2,3");
  CHECK(r.exit_code == 0);  // 0 <= N, so the bound still holds
  CHECK(r.output.find("\"M\": 0") != std::string::npos);
}

TEST_CASE("solve emits CSV when asked") {
  const run_result r = run_cli("solve --example exa4 --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.output.rfind("type,re,im,residual\n", 0) == 0);
  CHECK(r.output.find("\nnonreal,") != std::string::npos);
}

TEST_CASE("analyze emits the structural report") {
  const run_result r = run_cli("analyze --example exa4 --lambda 3.87i");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"interlace_ok\": true") != std::string::npos);
  CHECK(r.output.find("\"g_sign\": \"negative\"") != std::string::npos);
  CHECK(r.output.find("\"endpoint_audit_passed\": true") != std::string::npos);
}

TEST_CASE("plotdata streams the sampled components") {
  const run_result r = run_cli("plotdata --example exa4 --lambda 3.87i");
  CHECK(r.exit_code == 0);
  CHECK(r.output.rfind("x,phi,psi,G\n", 0) == 0);
  CHECK(count_lines(r.output) >= 1001);
}

TEST_CASE("verify reports a passing example") {
  const run_result r = run_cli("verify --example exa4");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("exa4: PASS") != std::string::npos);
  CHECK(r.output.find("FAIL") == std::string::npos);
}

TEST_CASE("input errors exit with code 2") {
  const run_result both = run_cli("solve --example exa1 --problem /tmp/nope.json");
  CHECK(both.exit_code == 2);
  CHECK(both.output.find("input error") != std::string::npos);

  const run_result unknown = run_cli("solve --example zzz");
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.output.find("input error") != std::string::npos);

  const run_result bad_box = run_cli("solve --example exa1 --box 5,1,2,3");
  CHECK(bad_box.exit_code == 2);

  const run_result bad_file = run_cli(std::string("solve --problem ") + TEST_DATA_DIR +
                                      "/malformed.json");
  CHECK(bad_file.exit_code == 2);
  CHECK(bad_file.output.find("input error") != std::string::npos);

  const run_result no_scope = run_cli("verify --example exa1 --lambda 1i");
  CHECK(no_scope.exit_code == 2);  // --lambda is not a verify flag
}

TEST_CASE("refinement far from the spectrum exits with code 3") {
  const run_result r = run_cli("analyze --example exa4 --lambda 50+50i");
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("nonconvergence") != std::string::npos);
}
