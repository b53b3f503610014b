#include <doctest.h>

#include <random>
#include <sstream>

#include "cache_gen.hpp"
#include "logbatch/errors.hpp"
#include "logbatch/template_cache.hpp"

using namespace logbatch;
using V = std::vector<std::string>;

TEST_CASE("regex construction") {
  CHECK(regex_of("a.b <*>") == R"(^a\.b\s+(.+?)$)");
  CHECK(regex_of("x(1)  [y]") == R"(^x\(1\)\s+\[y\]$)");
}

TEST_CASE("template captures") {
  const LogTemplate t("Failed to report <*> to master; giving up");
  CHECK(t.wildcard_count() == 1);
  CHECK(t.captures("Failed to report rdd_5_1 to master; giving up") == std::optional<V>(V{"rdd_5_1"}));
  CHECK(LogTemplate("a <*> c").captures("a b b c") == std::optional<V>(V{"b b"}));
  const LogTemplate lit("plain text here");
  CHECK(lit.captures("plain text here") == std::optional<V>(V{}));
  CHECK(lit.matches("plain   text\there"));
  CHECK_FALSE(lit.matches("plain text here!"));
  CHECK(t.instantiate({"X"}) == "Failed to report X to master; giving up");
}

TEST_CASE("match adds the token count check") {
  TemplateCache cache;
  const auto e = cache.insert(LogTemplate("Failed to report <*> to master; giving up"),
                              "Failed to report rdd_5_1 to master; giving up");
  CHECK(match(e, "Failed to report rdd_5_1 to master; giving up") == std::optional<V>(V{"rdd_5_1"}));
  // The regex alone would accept this one; the token count rejects it.
  CHECK(LogTemplate("Failed to report <*> to master; giving up").matches("Failed to report a b to master; giving up"));
  CHECK_FALSE(match(e, "Failed to report a b to master; giving up").has_value());
  const auto lit = cache.insert(LogTemplate("all done"), "all done");
  CHECK(match(lit, "all done") == std::optional<V>(V{}));
}

TEST_CASE("lookup probe order") {
  TemplateCache cache;
  CHECK_FALSE(cache.lookup("anything").has_value());

  cache.insert(LogTemplate("send <*> bytes"), "send 5 bytes", 2);
  cache.insert(LogTemplate("<*> 5 bytes"), "send 5 bytes", 10);
  auto hit = cache.lookup("send 5 bytes");
  REQUIRE(hit);
  CHECK(hit->entry.tmpl.text() == "<*> 5 bytes");

  TemplateCache c2;
  c2.insert(LogTemplate("A <*> x"), "A q x", 3);
  c2.insert(LogTemplate("<*> q x"), "A q x", 1);
  // Three hits that only B can serve: B goes 1 -> 4.
  for (int i = 0; i < 3; ++i) {
    hit = c2.lookup("Z q x");
    REQUIRE(hit);
    CHECK(hit->entry.tmpl.text() == "<*> q x");
  }
  hit = c2.lookup("A q x");
  REQUIRE(hit);
  CHECK(hit->entry.tmpl.text() == "<*> q x");
  CHECK(hit->parameters == V{"A"});
}

TEST_CASE("insert semantics") {
  TemplateCache cache;
  auto e = cache.insert(LogTemplate("job <*> done"), "job 7 done", 7);
  CHECK(e.frequency == 7);
  cache.insert(LogTemplate("job <*> done"), "job 8 done", 3);
  REQUIRE(cache.size() == 1);
  CHECK(cache.entries()[0].frequency == 10);
  auto hit = cache.lookup("job 7 done");
  REQUIRE(hit);
  CHECK(hit->parameters == V{"7"});
  CHECK_THROWS_AS(cache.insert(LogTemplate("other <*>"), "nope"), ContractViolation);
}

TEST_CASE("dump and load") {
  TemplateCache cache;
  cache.insert(LogTemplate("tab\there <*>"), "tab\there x", 4);
  cache.insert(LogTemplate("back\\slash <*>"), "back\\slash y", 2);
  std::stringstream ss;
  cache.dump(ss);
  TemplateCache copy;
  copy.load(ss);
  const auto a = cache.entries();
  const auto b = copy.entries();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tmpl.text() == b[i].tmpl.text());
    CHECK(a[i].reference_log == b[i].reference_log);
    CHECK(a[i].frequency == b[i].frequency);
  }
}

TEST_CASE("roundtrip property") {
  std::mt19937_64 rng(1234);
  std::size_t failures = 0;
  for (int i = 0; i < 300; ++i) {
    const auto inst = cache_gen::random_instance(rng);
    TemplateCache cache;
    cache.insert(LogTemplate(inst.template_text), inst.log);
    const auto hit = cache.lookup(inst.log);
    if (!hit || hit->parameters != inst.parameters) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("match shortcuts agree with the regex") {
  std::mt19937_64 rng(55);
  const std::string alphabet = "ab. \t*";
  auto random_text = [&](int max_len) {
    std::string s;
    for (int k = std::uniform_int_distribution<int>(1, max_len)(rng); k > 0; --k) {
      s.push_back(alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)]);
    }
    return s;
  };
  for (int i = 0; i < 3000; ++i) {
    auto tt = random_text(6);
    if (i % 2 == 1) tt.insert(std::uniform_int_distribution<std::size_t>(0, tt.size())(rng), "<*>");
    if (i % 4 == 3) tt += " <*>";
    const LogTemplate t(tt);
    for (int j = 0; j < 5; ++j) {
      const auto log = random_text(7);
      CHECK(t.matches(log) == boost::regex_match(log, t.matcher()));
    }
    if (t.wildcard_count() == 0) CHECK(t.matches(t.text()));
  }
}
