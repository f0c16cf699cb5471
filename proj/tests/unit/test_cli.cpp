#include <doctest.h>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "minimax/cli.hpp"
#include "minimax/complexity.hpp"
#include "minimax/errors.hpp"
#include "minimax/harness.hpp"

using namespace minimax;
namespace fs = std::filesystem;

namespace {

struct Captured {
  int code;
  std::string out;
};

Captured call(std::vector<std::string> args) {
  args.insert(args.begin(), "minimax-kit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream buf;
  auto* old = std::cout.rdbuf(buf.rdbuf());
  const int code = cli::main(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old);
  return {code, buf.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("minimax_kit_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("run writes identical outputs for identical inputs") {
  const auto a = scratch("run_a"), b = scratch("run_b");
  CHECK(call({"run", "--out", a.string(), "--seed", "3"}).code == cli::kOk);
  CHECK(call({"run", "--out", b.string(), "--seed", "3"}).code == cli::kOk);
  for (const char* f : {"trace.csv", "meta.txt", "problem.txt"}) {
    CHECK(read_text_file((a / f).string()) == read_text_file((b / f).string()));
  }
  const auto rows = trace_from_csv(read_text_file((a / "trace.csv").string()));
  CHECK(rows.front().t == 0);
}

TEST_CASE("exit codes") {
  const auto d = scratch("codes");
  CHECK(call({"run", "--out", d.string(), "--set", "max_iters=10"}).code == cli::kNotConverged);
  CHECK(trace_from_csv(read_text_file((d / "trace.csv").string())).size() == 11);
  CHECK(call({"run", "--out", d.string(), "--set", "max_iter=10"}).code == cli::kUsage);
  CHECK(call({"run", "--out", d.string(), "--set", "problem.kappa_target=0.5"}).code == cli::kUsage);
  CHECK(call({"run", "--bogus"}).code == cli::kUsage);
  CHECK(call({}).code == cli::kUsage);
  CHECK(call({"sweep", "--out", d.string(), "--set", "kappa_grid=2,4,8"}).code == cli::kUsage);
  CHECK(call({"verify", "--out", d.string(), "--set", "scope="}).code == cli::kUsage);
}

TEST_CASE("help lists every key with its default") {
  const std::vector<std::pair<std::string, const std::vector<cli::KeyInfo>*>> cmds = {
      {"run", &cli::run_keys()},
      {"sweep", &cli::sweep_keys()},
      {"verify", &cli::verify_keys()},
      {"prox-check", &cli::prox_check_keys()}};
  for (const auto& [cmd, keys] : cmds) {
    const auto r = call({cmd, "--help"});
    CHECK(r.code == cli::kOk);
    for (const auto& k : *keys) {
      INFO(cmd << " " << k.key);
      CHECK(r.out.find(k.key) != std::string::npos);
    }
  }
}

TEST_CASE("unknown keys name the nearest valid key") {
  try {
    cli::load_config(cli::run_keys(), std::nullopt, {"max_iter=5"}, std::nullopt);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("max_iters") != std::string::npos);
  }
}

TEST_CASE("config file and overrides compose") {
  const auto d = scratch("cfg");
  fs::create_directories(d);
  write_text_file((d / "c.txt").string(), "# run config\nmax_iters = 50\neps = 1e-3\n");
  const auto doc = cli::load_config(cli::run_keys(), (d / "c.txt").string(), {"eps=1e-2"}, 7);
  const auto spec = cli::run_spec_from(doc);
  CHECK(spec.max_iters == 50);
  CHECK(spec.eps == 1e-2);
  CHECK(spec.seed == 7);
}

TEST_CASE("sweep writes its files and records the resolved config") {
  const auto d = scratch("sweep");
  const auto r = call({"sweep", "--out", d.string(), "--set", "kappa_grid=2,4,8,20", "--set", "eps=1e-3", "--set",
                       "max_iters=20000", "--set", "problem.dim_x=3", "--set", "problem.dim_y=3"});
  CHECK(r.code == cli::kOk);
  const auto cells = sweep_from_csv(read_text_file((d / "sweep.csv").string()));
  CHECK(cells.size() == 24);
  CHECK(summary_from_csv(read_text_file((d / "summary.csv").string())).size() == 2);
  const auto meta = KeyValueDoc::read_file((d / "sweep_meta.txt").string());
  CHECK(meta.require_double("eps") == 1e-3);
}

TEST_CASE("verify failures are written for replay") {
  const auto d = scratch("verify");
  const auto r = call({"verify", "--out", d.string(), "--set", "scope=lyapunov", "--set", "kappas=16", "--set",
                       "instances=3", "--set", "dims=2", "--set", "lyapunov_iters=300", "--set", "eta_x_scale=10"});
  CHECK(r.code == cli::kInvariantFailure);
  CHECK(r.out.find("FAIL lyapunov.decrease") != std::string::npos);
  REQUIRE(fs::exists(d / "failing_run.txt"));
  CHECK(fs::exists(d / "failing_problem.txt"));
  CHECK(fs::exists(d / "failure.txt"));
  const auto replay = scratch("replay");
  CHECK(call({"run", "--config", (d / "failing_run.txt").string(), "--out", replay.string(), "--set", "eps=1e-30"})
            .code == cli::kNotConverged);
  CHECK(fs::exists(replay / "trace.csv"));
}

TEST_CASE("prox-check") {
  auto r = call({"prox-check", "--set", "v=3,-0.5,0"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("prox=2,0,0") != std::string::npos);
  r = call({"prox-check", "--set", "kind=box", "--set", "v=3,-2", "--set", "w=0,0", "--set", "u=1,-1"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("PASS optimality") != std::string::npos);
  CHECK(call({"prox-check", "--set", "kind=box", "--set", "lo=1", "--set", "hi=0"}).code == cli::kUsage);
}
