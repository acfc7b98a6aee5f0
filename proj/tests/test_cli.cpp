#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

// End-to-end tests for the command-line driver. The binary under test and the
// model-file directory are supplied via the PROBMINE_CLI and PROBMINE_MODELS
// environment variables (ctest sets them; set them by hand for manual runs).

namespace {

struct RunResult {
  int rc;
  std::string out;
};

const char* cli_path() {
  static const char* p = std::getenv("PROBMINE_CLI");
  REQUIRE(p != nullptr);
  return p;
}

const char* models_dir() {
  static const char* p = std::getenv("PROBMINE_MODELS");
  REQUIRE(p != nullptr);
  return p;
}

RunResult run(const std::string& args) {
  std::string cmd = std::string(cli_path()) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string model(const std::string& name) {
  return std::string(models_dir()) + "/" + name;
}

}  // namespace

TEST_CASE("translate --dialectica matches the documented output") {
  RunResult r = run("translate --dialectica \"all x:0. ex y:0. y >=0 x\"");
  CHECK(r.rc == 0);
  CHECK(r.out == "ex Y:0(0). all x:0. (Y x) >=0 x\n");
}

TEST_CASE("fluct matches the documented output") {
  RunResult r = run("fluct --seq 0,1,0,1 --k 1 --horizon 4");
  CHECK(r.rc == 0);
  CHECK(r.out == "3\n");
}

TEST_CASE("parse echoes the canonical rendering") {
  RunResult r = run("parse \"all x:0. (p:0(0) x) >=0 0\"");
  CHECK(r.rc == 0);
  CHECK(r.out == "all x:0. (p:0(0) x) >=0 0\n");
}

TEST_CASE("typecheck reports OK on well-typed input") {
  RunResult r = run("typecheck \"all x:0. x >=0 0\"");
  CHECK(r.rc == 0);
  CHECK(r.out == "OK\n");
}

TEST_CASE("prob expand and inner print the threshold expansions") {
  RunResult outer = run("prob expand \"Pr[ w in (A:Ev) ] >= 1/2\"");
  CHECK(outer.rc == 0);
  CHECK(outer.out == "all A':Ev. Pr(A') < 1/2 -> ex w:Om. w in (A'^c) & w in A:Ev\n");

  RunResult inner = run("prob inner \"Pr[ w in (A:Ev) ] <= 1/2\"");
  CHECK(inner.rc == 0);
  CHECK(inner.out == "all A':Ev. Pr(A') > 1/2 -> ex w:Om. w in A' & !w in A:Ev\n");
}

TEST_CASE("prob form classifies the three statement shapes") {
  RunResult f2 = run("prob form \"all x:0. Pr[ ex n:0. w in (A:Ev(0)(0) x n) ] >= 1/2\"");
  CHECK(f2.rc == 0);
  CHECK(f2.out == "Form2 outer=x:0 inner=n\n");

  RunResult f3 = run(
      "prob form \"all m:0. all x:0. ex n:0. Pr[ w in (A:Ev(0)(0) x n) ] >= (1/2 - 2^-m)\"");
  CHECK(f3.rc == 0);
  CHECK(f3.out == "Form3 outer=x:0 inner=n error=m\n");

  RunResult other = run("prob form \"all x:0. x >=0 0\"");
  CHECK(other.rc == 0);
  CHECK(other.out == "Other diagnostic=\"no Pr-prefix pattern matched\"\n");
}

TEST_CASE("prob interpret renders the bounded reformulations") {
  RunResult f2 =
      run("prob interpret --mode c \"all x:0. Pr[ ex n:0. w in (A:Ev(0)(0) x n) ] >= 1/2\"");
  CHECK(f2.rc == 0);
  CHECK(f2.out ==
        "plus-two\n"
        "all m:0. all x:0. Pr[ ex n <= (Phi:0(0)(0) m x) : 0. w in (A:Ev(0)(0) x n) ] >= "
        "(1/2 - 2^-m)\n"
        "note: at type 0 the majorant x* coincides with x\n");

  RunResult f3 = run(
      "prob interpret --mode c \"all m:0. all x:0. ex n:0. Pr[ w in (A:Ev(0)(0) x n) ] >= "
      "(1/2 - 2^-m)\"");
  CHECK(f3.rc == 0);
  CHECK(f3.out ==
        "plus-three\n"
        "all m:0. all x:0. ex n <= (Phi:0(0)(0) m x) : 0. Pr[ w in (A:Ev(0)(0) x n) ] >= "
        "(1/2 - 2^-m)\n"
        "note: at type 0 the majorant x* coincides with x\n");
}

TEST_CASE("rewrite prints the result and its principles ledger") {
  RunResult r1 = run("rewrite --rule R1 \"Pr[ all x:0. w in (A:Ev(0) x) ] >= 1/2\"");
  CHECK(r1.rc == 0);
  CHECK(r1.out == "all x:0. Pr[ w in (A:Ev(0) x) ] >= 1/2\nprinciples: {}\n");

  RunResult r5 = run(
      "rewrite --rule R5 --assume antimonotone "
      "\"all x:0. Pr[ all n <= x:0 : 0. w in (A:Ev(0) n) ] >= 1/2\"");
  CHECK(r5.rc == 0);
  CHECK(r5.out ==
        "Pr[ all x:0. all n <= x : 0. w in (A:Ev(0) n) ] >= 1/2\n"
        "principles: {ClassicalLogic, UB_Omega(0)}\n");
}

TEST_CASE("sigma-add prints the lower and upper statements") {
  RunResult r = run("sigma-add \"A:Ev(0)\"");
  CHECK(r.rc == 0);
  CHECK(r.out ==
        "all l:0. Pr[ ex n:0. w in (A:Ev(0) n) ] >= sum(n, l, Pr(up A:Ev(0) n))\n"
        "all k:0. ex l:0. Pr[ ex n:0. w in (A:Ev(0) n) ] <= (sum(n, l, Pr(up A:Ev(0) n)) + "
        "2^-k)\n");
}

TEST_CASE("eval answers true/false against a model file") {
  RunResult t = run("eval --model " + model("sub4.model") + " \"Pr[ w in {a} ] >= 1/2\"");
  CHECK(t.rc == 0);
  CHECK(t.out == "true\n");

  RunResult f = run("eval --model " + model("sub4.model") + " \"Pr[ w in {a b} ] <= 0\"");
  CHECK(f.rc == 0);
  CHECK(f.out == "false\n");
}

TEST_CASE("verify emits one PASS line per model") {
  RunResult one =
      run("verify --suite outer-oracle --model " + model("sub4.model") + " --seed 7");
  CHECK(one.rc == 0);
  CHECK(one.out == "PASS suite=outer-oracle cases=200 model=sub4.model\n");

  // without --model, model-backed suites run across the builtin fleet
  RunResult fleet = run("verify --suite algebra --seed 7");
  CHECK(fleet.rc == 0);
  std::size_t lines = 0;
  for (char c : fleet.out)
    if (c == '\n') ++lines;
  CHECK(lines >= 5);
  CHECK(fleet.out.find("FAIL") == std::string::npos);
}

TEST_CASE("modulus transform handles expressions and tables") {
  RunResult e = run("modulus transform --expr \"m + x\"");
  CHECK(e.rc == 0);
  CHECK(e.out == "(((m + x) + 1) + x)\n");

  RunResult t = run("modulus transform --table \"0 1;2 3;4 5;6 7\"");
  CHECK(t.rc == 0);
  CHECK(t.out == "table [2 5] [4 7] [6]\n");
}

TEST_CASE("modulus check fails with a witness and exit code 1") {
  RunResult r = run("modulus check --kind io-pointwise --model " + model("coin.model") +
                    " --expr k --events \"a b|||\"");
  CHECK(r.rc == 1);
  CHECK(r.out.substr(0, 4) == "FAIL");
}

TEST_CASE("usage and parse errors exit with code 2") {
  CHECK(run("no-such-command").rc == 2);
  CHECK(run("parse \"all x:0.\"").rc == 2);
  CHECK(run("translate \"all x:0. x >=0 0\"").rc == 2);  // missing interpretation flag
  CHECK(run("verify --suite no-such-suite").rc == 2);
}

TEST_CASE("output is deterministic across repeated invocations") {
  std::string cmd = "verify --suite prenex --model " + model("sub4.model") + " --seed 99";
  RunResult a = run(cmd);
  RunResult b = run(cmd);
  CHECK(a.rc == 0);
  CHECK(a.rc == b.rc);
  CHECK(a.out == b.out);
}
