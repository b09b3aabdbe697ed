#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "todi/config.hpp"
#include "todi/error.hpp"
#include "todi/io.hpp"

using namespace todi;
using namespace todi::config;
using harness::TrainConfig;

TEST_CASE("format_double round trips") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, std::nextafter(1.0, 2.0)}) {
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::parse_double("-inf") == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(io::parse_double("1.5x"), InvalidInput);
  CHECK_THROWS_AS(io::parse_double(""), InvalidInput);
  CHECK(io::parse_int("-12") == -12);
  CHECK_THROWS_AS(io::parse_int("3.0"), InvalidInput);
}

TEST_CASE("split and trim") {
  CHECK(io::split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
  CHECK(io::trim("  x y\t\r") == "x y");
}

TEST_CASE("dist sequence json round trip") {
  io::MaskedDistSeq s;
  s.rows.push_back(VocabDist::from_probs(std::vector<double>{0.25, 0.75}));
  s.rows.push_back(VocabDist::from_probs(std::vector<double>{0.5, 0.5}));
  s.mask = {true, false};
  const auto back = io::dist_seq_from_json(io::to_json(s));
  CHECK(back.mask == s.mask);
  REQUIRE(back.rows.size() == 2);
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t i = 0; i < 2; ++i) CHECK(back.rows[t].prob(i) == doctest::Approx(s.rows[t].prob(i)).epsilon(1e-15));
  CHECK(io::dist_seq_from_json("{\"probs\": [[0.5, 0.5]]}").mask == Mask{true});
  CHECK_THROWS_AS(io::dist_seq_from_json("{\"probs\": [[0.5, 0.5]], \"mask\": [true, true]}"), InvalidInput);
  CHECK_THROWS_AS(io::dist_seq_from_json("not json"), InvalidInput);
}

TEST_CASE("triples csv") {
  Matrix m(2, 2);
  m(1, 0) = 0.5;
  std::ostringstream out;
  io::write_triples_csv(out, m);
  CHECK(out.str() == "t,i,value\n0,0,0\n0,1,0\n1,0,0.5\n1,1,0\n");
}

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# sweep member\n"
      "kind = generalized_todi\n"
      "beta = -1   # reversed\n"
      "\n"
      "epochs=12\n"
      "optimizer=sgd\n"
      "teacher_kind=peaked\n");
  CHECK(c.spec.kind == Kind::GeneralizedToDi);
  CHECK(*c.spec.beta == -1.0);
  CHECK(c.epochs == 12);
  CHECK(c.optimizer == harness::OptimizerKind::SGD);
  CHECK(c.teacher_kind == harness::TeacherKind::Peaked);
  CHECK(c.lr == TrainConfig{}.lr);

  CHECK(*parse_config("kind=generalized_todi\nbeta=inf\n").spec.beta == kStepBeta);
  CHECK(*parse_config("kind=skl\n").spec.lambda == kDefaultSkew);
  CHECK(parse_config("") == TrainConfig{});
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("colour=blue\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("epochs=1\nepochs=2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("epochs\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("epochs=ten\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("kind=fkl\nbeta=1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("kind=todi\nbeta=2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("kind=skl\nlambda=1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("lr=-1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("teacher_vocab=4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("optimizer=rmsprop\n"), ConfigError);
  try {
    parse_config("kind=AKL\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("unsupported kind") != std::string::npos);
  }
}

TEST_CASE("canonical text round trips and covers every key") {
  TrainConfig c;
  c.spec = DivergenceSpec::fixed_mix(0.25);
  c.lr = 0.003;
  c.seed = 40;
  c.teacher_order = 2;
  const std::string text = to_config_text(c);
  CHECK(parse_config(text) == c);
  CHECK(to_config_text(parse_config(text)) == text);

  // Every key appears once the kind-specific parameters are accounted for.
  std::string all;
  for (auto spec : {DivergenceSpec::skl(0.2), DivergenceSpec::fixed_mix(0.1), DivergenceSpec::generalized_todi(2.0)}) {
    TrainConfig k;
    k.spec = spec;
    all += to_config_text(k);
  }
  for (const auto& key : config_keys()) {
    const bool present = all.rfind(key + "=", 0) == 0 || all.find("\n" + key + "=") != std::string::npos;
    CHECK_MESSAGE(present, key);
  }
}

TEST_CASE("digest") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  TrainConfig a, b;
  CHECK(config_digest(a) == config_digest(b));
  b.seed = 11;
  CHECK(config_digest(a) != config_digest(b));
  CHECK(config_digest(parse_config("kind = todi\n")) == config_digest(parse_config("# same\nkind=todi")));
}

TEST_CASE("file helpers") {
  const auto path = (std::filesystem::temp_directory_path() / "todi_io_test.txt").string();
  io::write_file(path, "a\nb\n");
  CHECK(io::read_file(path) == "a\nb\n");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(io::read_file(path), Error);
}
