#include <doctest.h>

#include <random>

#include "logbatch/config.hpp"
#include "logbatch/errors.hpp"

using namespace logbatch;

TEST_CASE("empty config yields the defaults") {
  const auto cfg = parse_config("");
  CHECK(cfg.dbscan_eps == 0.5);
  CHECK(cfg.dbscan_min_samples == 5);
  CHECK(cfg.batch_size == 10);
  CHECK(cfg.temperature == 0.0);
  CHECK(cfg.sampling_method == SamplingMethod::diversity);
  CHECK(cfg.partitioning_enabled);
  CHECK(cfg.caching_enabled);
  CHECK(cfg == PipelineConfig{});
  CHECK(load_config("") == PipelineConfig{});
}

TEST_CASE("single override") {
  const auto cfg = parse_config("", {{"batch_size", "1"}});
  CHECK(cfg.batch_size == 1);
  PipelineConfig expected;
  expected.batch_size = 1;
  CHECK(cfg == expected);
  CHECK(parse_config("", {{"sampling.batch_size", "3"}}).batch_size == 3);
}

TEST_CASE("overrides beat file values") {
  const auto cfg = parse_config("[sampling]\nbatch_size = 4\n", {{"batch_size", "6"}});
  CHECK(cfg.batch_size == 6);
  CHECK(parse_config("[sampling]\nbatch_size = 4\n").batch_size == 4);
}

TEST_CASE("invalid values name the key") {
  auto key_of = [](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of([] { parse_config("", {{"dbscan_eps", "-1"}}); }) == "dbscan_eps");
  CHECK(key_of([] { parse_config("", {{"batch_size", "0"}}); }) == "batch_size");
  CHECK(key_of([] { parse_config("", {{"dbscan_min_samples", "0"}}); }) == "dbscan_min_samples");
  CHECK(key_of([] { parse_config("[partition]\nbogus = 1\n"); }) == "bogus");
  CHECK(key_of([] { parse_config("[cache]\nbatch_size = 2\n"); }) == "batch_size");
  CHECK(key_of([] { parse_config("", {{"sampling_method", "greedy"}}); }) == "sampling_method");
  CHECK(key_of([] { parse_config("", {{"caching_enabled", "maybe"}}); }) == "caching_enabled");
  PipelineConfig bad;
  bad.temperature = -0.5;
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("save/load round-trip on random configs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::uniform_int_distribution<int> small(1, 50);
  for (int i = 0; i < 200; ++i) {
    PipelineConfig c;
    c.chunk_size = static_cast<std::size_t>(small(rng)) * 37;
    c.dbscan_eps = u(rng) + 1e-9;
    c.dbscan_min_samples = small(rng);
    c.batch_size = small(rng);
    c.sampling_method = static_cast<SamplingMethod>(small(rng) % 3);
    c.temperature = u(rng) / 3.0;
    c.partitioning_enabled = small(rng) % 2;
    c.caching_enabled = small(rng) % 2;
    c.llm_backend = static_cast<BackendKind>(small(rng) % 3);
    c.max_retries = small(rng) % 6;
    c.rng_seed = rng();
    c.retry_budget = small(rng) % 5;
    c.workers = 1 + small(rng) % 4;
    c.max_in_flight = small(rng);
    c.fallback_enabled = small(rng) % 2;
    c.extra_delims = (i % 3 == 0) ? "|@" : "";
    REQUIRE_NOTHROW(validate(c));
    const auto text = save_config(c);
    CHECK(parse_config(text) == c);
  }
}

TEST_CASE("every key appears in the saved file") {
  const auto text = save_config(PipelineConfig{});
  for (const auto& k : config_keys()) CHECK(text.find(k + " = ") != std::string::npos);
}
