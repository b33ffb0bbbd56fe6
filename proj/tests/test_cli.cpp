#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <string>

namespace {

std::string cli_path() {
  const char* p = std::getenv("TWIRL_CLI_PATH");
  REQUIRE(p != nullptr);
  return p;
}

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args, bool merge_stderr = false) {
  std::string cmd = cli_path() + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("moment subcommand") {
  SECTION("k=3 prints the factored closed form and evaluates") {
    RunResult r = run("moment --k 3 --eval 5");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "3(N^3+3N^2-N-2)/(N-1)(N+1)(N+3)"));
    CHECK(contains(r.out, "3 + 0/N + 0/N^2 + 3/N^3"));
    CHECK(contains(r.out, "M_3(5) = 193/64"));
  }
  SECTION("k=2 evaluates to the constant") {
    RunResult r = run("moment --k 2 --eval 10");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "M_2(10) = 2"));
  }
  SECTION("evaluation at N <= k is flagged") {
    RunResult r = run("moment --k 3 --eval 2", /*merge_stderr=*/true);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "outside the Weingarten validity regime"));
    CHECK(contains(r.out, "\"small_n_caveat\":true"));
  }
  SECTION("pole evaluation exits nonzero with a diagnostic") {
    RunResult r = run("moment --k 3 --eval 1");
    CHECK(r.exit_code == 1);
    CHECK(contains(r.out, "pole"));
  }
  SECTION("usage errors exit 2") {
    CHECK(run("moment").exit_code == 2);
    CHECK(run("moment --k notanumber").exit_code == 2);
  }
}

TEST_CASE("wg subcommand") {
  SECTION("coe k=2 single cycle") {
    RunResult r = run("wg --ensemble coe --k 2 --type 2");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "-1/N(N+1)(N+3)"));
  }
  SECTION("cue k=1") {
    RunResult r = run("wg --ensemble cue --k 1 --type 1");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "1/N"));
  }
  SECTION("coe k=3 expanded leading term") {
    RunResult r = run("wg --ensemble coe --k 3 --type 3 --expand 1");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "2/N^5"));
  }
  SECTION("malformed partition") {
    CHECK(run("wg --ensemble coe --k 3 --type 2,2").exit_code == 2);
    CHECK(run("wg --ensemble coe --k 3 --type bogus").exit_code == 2);
  }
}

TEST_CASE("classify subcommand") {
  SECTION("verify at k=4") {
    RunResult r = run("classify --k 4 --verify");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "all clauses pass"));
  }
  SECTION("single-class counts at k=5") {
    RunResult r = run("classify --k 5 --alpha 1,1,1,1,1 --beta 3,1,1 --count");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "Irreg(1-1-1-1-1, 3-1-1) 25"));
    CHECK(contains(r.out, "Reg(1-1-1-1-1, 3-1-1) 50"));
  }
  SECTION("bad partition exits 2") {
    CHECK(run("classify --k 3 --alpha bogus --beta 1,1,1").exit_code == 2);
  }
}

TEST_CASE("phi subcommand") {
  SECTION("oracle agreement") {
    RunResult r = run("phi --k 3 --omega \"(1 ~1)\" --oracle --n 7 --perm grand");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "chi=1 m=2 phi=N^2 oracle=49 OK"));
  }
  SECTION("non-contributing permutation") {
    RunResult r = run("phi --k 6 --omega \"(2 ~3)(~2 3)(4 ~5)(~4 5)\"");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "chi=0 phi=0"));
  }
  SECTION("parse error carries a position and exits 2") {
    RunResult r = run("phi --k 2 --omega \"(1\"", /*merge_stderr=*/true);
    CHECK(r.exit_code == 2);
    CHECK(contains(r.out, "position"));
  }
  SECTION("dot export") {
    RunResult r = run("phi --k 2 --omega \"(1 2)(~1 ~2)\" --dot");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "digraph"));
    CHECK(contains(r.out, "style=dashed"));
  }
}

TEST_CASE("mc subcommand") {
  SECTION("csv output and success exit") {
    RunResult r = run("mc --k 2 --n 16 --samples 2000 --seed 7 --twist grand --ensemble coe");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "ensemble,twist,k,N,samples,seed,mean,std_error,reference,z,retried"));
    CHECK(contains(r.out, "coe,grand,2,16,2000,7,"));
  }
  SECTION("byte-identical reruns") {
    std::string args = "mc --k 2 --n 8 --samples 1000 --seed 42 --twist grand --ensemble coe";
    RunResult a = run(args);
    RunResult b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
  }
  SECTION("short-cycle twist warns and withholds the reference") {
    RunResult r = run("mc --k 2 --n 3 --samples 500 --seed 7 --twist grand --ensemble coe",
                      /*merge_stderr=*/true);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "2k"));
    CHECK(contains(r.out, "coe,grand,2,3,500,7,"));
  }
}

TEST_CASE("manifest goes to stderr") {
  RunResult merged = run("moment --k 2", true);
  CHECK(contains(merged.out, "manifest:"));
  RunResult plain = run("moment --k 2", false);
  CHECK_FALSE(contains(plain.out, "manifest:"));
}
