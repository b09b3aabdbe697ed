#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "todi/cli.hpp"
#include "todi/config.hpp"
#include "todi/io.hpp"

using namespace todi;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

const char* kSmallRun = "kind=todi\nepochs=5\nn_seq=32\nseed=10\n";

}  // namespace

TEST_CASE("usage errors") {
  const auto none = run({});
  CHECK(none.code == cli::kUsageError);
  CHECK((none.out + none.err).find("toy") != std::string::npos);
  const auto bogus = run({"frobnicate"});
  CHECK(bogus.code == cli::kUsageError);
  for (const char* sub : {"toy", "gradcheck", "train", "sweep", "compare"}) {
    CHECK(bogus.err.find(sub) != std::string::npos);
  }
  CHECK(run({"train"}).code == cli::kUsageError);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("help lists exactly the config keys") {
  const std::string help = cli::help_text();
  for (const auto& key : config::config_keys()) CHECK(help.find(key) != std::string::npos);
  CHECK(help.find("TODI_SEED") != std::string::npos);
}

TEST_CASE("toy writes a profile and a manifest") {
  TempDir dir("todi_cli_toy");
  for (const char* kind : {"bimodal_vs_unimodal", "shifted_gaussians", "random_dirichlet"}) {
    const auto out = dir / (std::string(kind) + ".csv");
    const auto r = run({"toy", "--kind", kind, "--vocab", "50", "--seed", "3", "--out", out});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("0 dominance violations") != std::string::npos);
    CHECK(fs::exists(out));
    const auto m = cli::manifest_from_json(io::read_file(cli::manifest_path(out)));
    CHECK(m.command == "toy");
    CHECK(m.seed == 3);
    CHECK(m.config_digest.size() == 64);
    CHECK(m.outputs == std::vector<std::string>{out});
  }
  CHECK(run({"toy", "--kind", "cubic", "--out", dir / "x.csv"}).code == cli::kUsageError);
  CHECK(run({"toy", "--kind", "random_dirichlet", "--vocab", "2", "--out", dir / "x.csv"}).code ==
        cli::kRuntimeError);
}

TEST_CASE("gradcheck prints a passing report") {
  const auto r = run({"gradcheck", "--instances", "2"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("\"pass\": true") != std::string::npos);
  CHECK(r.out.find("generalized_todi(beta=inf)") != std::string::npos);
}

TEST_CASE("train rejects unsupported kinds with a usage error") {
  TempDir dir("todi_cli_akl");
  io::write_file(dir / "akl.cfg", "kind=AKL\n");
  const auto r = run({"train", "--config", dir / "akl.cfg", "--out", dir / "t.csv"});
  CHECK(r.code == cli::kUsageError);
  CHECK(r.err.find("unsupported kind") != std::string::npos);
  CHECK(r.err.find("generalized_todi") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "t.csv"));

  io::write_file(dir / "typo.cfg", "epoch=3\n");
  CHECK(run({"train", "--config", dir / "typo.cfg", "--out", dir / "t.csv"}).code == cli::kUsageError);
  CHECK(run({"train", "--config", dir / "missing.cfg", "--out", dir / "t.csv"}).code == cli::kUsageError);
}

TEST_CASE("train is reproducible and the manifest describes the run") {
  TempDir dir("todi_cli_train");
  io::write_file(dir / "run.cfg", kSmallRun);
  REQUIRE(run({"train", "--config", dir / "run.cfg", "--out", dir / "a.csv"}).code == cli::kOk);
  REQUIRE(run({"train", "--config", dir / "run.cfg", "--out", dir / "b.csv"}).code == cli::kOk);
  CHECK(io::read_file(dir / "a.csv") == io::read_file(dir / "b.csv"));

  const auto m = cli::manifest_from_json(io::read_file(cli::manifest_path(dir / "a.csv")));
  CHECK(m.command == "train");
  CHECK(m.seed == 10);
  CHECK(m.artifact_version == cli::kArtifactVersion);
  CHECK(m.config_digest == config::config_digest(config::parse_config(kSmallRun)));
}

TEST_CASE("seed precedence: flag over TODI_SEED over config") {
  TempDir dir("todi_cli_seed");
  io::write_file(dir / "run.cfg", kSmallRun);
  auto seed_of = [&](const std::string& out) {
    return cli::manifest_from_json(io::read_file(cli::manifest_path(out))).seed;
  };
  ::setenv("TODI_SEED", "20", 1);
  REQUIRE(run({"train", "--config", dir / "run.cfg", "--out", dir / "env.csv"}).code == cli::kOk);
  REQUIRE(run({"train", "--config", dir / "run.cfg", "--out", dir / "flag.csv", "--seed", "30"}).code == cli::kOk);
  ::setenv("TODI_SEED", "x", 1);
  CHECK(run({"train", "--config", dir / "run.cfg", "--out", dir / "bad.csv"}).code == cli::kUsageError);
  ::unsetenv("TODI_SEED");
  REQUIRE(run({"train", "--config", dir / "run.cfg", "--out", dir / "cfg.csv"}).code == cli::kOk);
  CHECK(seed_of(dir / "env.csv") == 20);
  CHECK(seed_of(dir / "flag.csv") == 30);
  CHECK(seed_of(dir / "cfg.csv") == 10);
  CHECK(io::read_file(dir / "env.csv") != io::read_file(dir / "cfg.csv"));

  // Same digest and seed: same bytes.
  REQUIRE(run({"train", "--config", dir / "run.cfg", "--out", dir / "flag2.csv", "--seed", "30"}).code == cli::kOk);
  CHECK(io::read_file(dir / "flag.csv") == io::read_file(dir / "flag2.csv"));
}

TEST_CASE("aborted training exits 2 and keeps the partial trace") {
  TempDir dir("todi_cli_abort");
  io::write_file(dir / "boom.cfg", "kind=fkl\nlr=1e308\nepochs=5\n");
  const auto r = run({"train", "--config", dir / "boom.cfg", "--out", dir / "t.csv"});
  CHECK(r.code == cli::kRuntimeError);
  CHECK(r.err.find("training aborted") != std::string::npos);
  CHECK(io::read_file(dir / "t.csv").rfind("epoch,train_loss", 0) == 0);
}

TEST_CASE("sweep and compare") {
  TempDir dir("todi_cli_sweep");
  fs::create_directories(dir.path / "cfgs");
  io::write_file(dir / "cfgs/b_todi.cfg", "kind=todi\nepochs=4\nn_seq=32\n");
  io::write_file(dir / "cfgs/a_fkl.cfg", "kind=fkl\nepochs=4\nn_seq=32\n");
  io::write_file(dir / "cfgs/notes.txt", "ignored\n");
  const std::vector<std::string> base{"sweep", "--configs", dir / "cfgs", "--seeds", "10,20", "--threads", "2"};
  auto with_out = [&](const std::string& out) {
    auto a = base;
    a.insert(a.end(), {"--out", out});
    return a;
  };
  REQUIRE(run(with_out(dir / "s1.csv")).code == cli::kOk);
  REQUIRE(run(with_out(dir / "s2.csv")).code == cli::kOk);
  const auto body = io::read_file(dir / "s1.csv");
  CHECK(body == io::read_file(dir / "s2.csv"));
  CHECK(body.find("\na_fkl,fkl,2,0,ok,") != std::string::npos);
  CHECK(body.find("\nb_todi,todi,2,0,ok,") < body.size());
  CHECK(body.find("a_fkl") < body.find("b_todi"));

  const auto c = run({"compare", dir / "s1.csv", dir / "s2.csv", "--out", dir / "cmp.csv"});
  CHECK(c.code == cli::kOk);
  const auto cmp = io::read_file(dir / "cmp.csv");
  CHECK(cmp.rfind("config,metric,a,b,winner\n", 0) == 0);
  CHECK(cmp.find(",tie\n") != std::string::npos);

  CHECK(run({"sweep", "--configs", dir / "nowhere", "--out", dir / "x.csv"}).code == cli::kUsageError);
  CHECK(run({"sweep", "--configs", dir / "cfgs", "--seeds", "a,b", "--out", dir / "x.csv"}).code ==
        cli::kUsageError);
}
