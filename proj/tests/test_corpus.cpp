#include <doctest.h>

#include <set>

#include "concept_align/corpus.hpp"
#include "concept_align/error.hpp"
#include "concept_align/io.hpp"
#include "support.hpp"

using namespace concept_align;

namespace {

const ConceptSpec& find(const std::vector<ConceptSpec>& specs, std::string_view id) {
  for (const auto& s : specs) {
    if (s.concept_id() == id) return s;
  }
  FAIL("missing concept " << id);
  throw;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  throw;
}

constexpr std::string_view kBackground =
    "Katherine and Alice are colleagues in a software company, both working as software engineers in the same "
    "development team.";

}  // namespace

TEST_CASE("default dyad context") {
  const auto ctx = DyadContext::standard();
  CHECK(ctx.person_a == "Katherine");
  CHECK(ctx.person_b == "Alice");
  CHECK(ctx.background == kBackground);
  CHECK(kind_of([] { DyadContext{"Ann", "Ann", "x"}.validate(); }) == ErrorKind::Validation);
  CHECK(kind_of([] { DyadContext{"Ann", "Bo", ""}.validate(); }) == ErrorKind::Validation);
}

TEST_CASE("willingness2 prompts reverse the roles") {
  const auto spec = find(builtin_trust_concepts(), "willingness2");
  const auto p = render_prompts(spec, DyadContext::standard());
  CHECK(p.negative == std::string(kBackground) +
                          " Create a one-line story where Alice demonstrates unwillingness to help Katherine "
                          "complete her work.");
  CHECK(p.positive == std::string(kBackground) +
                          " Create a one-line story where Alice demonstrates willingness to help Katherine "
                          "complete her work.");
}

TEST_CASE("risk1 and benevolence2 prompts") {
  const auto ctx = DyadContext::standard();
  const auto trust = builtin_trust_concepts();
  const auto risk = render_prompts(find(trust, "risk1"), ctx);
  CHECK(risk.positive.ends_with("Katherine is willing to take risk to help Alice."));
  CHECK(risk.negative.ends_with("Create a one-line story where Katherine is not willing to take risk to help Alice."));
  const auto ben = render_prompts(find(trust, "benevolence2"), ctx);
  CHECK(ben.positive.ends_with(
      "Alice shows benevolence by kindly helping Katherine without expecting anything in return."));
  CHECK(ben.negative.ends_with(
      "Alice shows spite by deliberately doing something that harms or causes trouble for Katherine."));
}

TEST_CASE("template errors") {
  const auto ctx = DyadContext::standard();
  ConceptSpec spec{"plain", Direction::AtoB, "No placeholders here.", "None here either.", Category::TrustRelated};
  CHECK(kind_of([&] { render_prompts(spec, ctx); }) == ErrorKind::Template);
  CHECK(kind_of([&] { spec.validate(); }) == ErrorKind::Template);
  CHECK(kind_of([&] { render_template("{A} meets {C}", ctx); }) == ErrorKind::Template);
  CHECK(kind_of([&] { render_template("{A} meets {B", ctx); }) == ErrorKind::Template);
  CHECK(kind_of([&] { render_template("{A} meets B}", ctx); }) == ErrorKind::Template);
  CHECK(render_template("{B} and {A}", ctx) == "Alice and Katherine");
}

TEST_CASE("builtin baseline concepts") {
  const auto specs = builtin_baseline_concepts();
  REQUIRE(specs.size() == 60);
  std::size_t pos = 0, neg = 0;
  std::set<std::string> ids, bases;
  for (const auto& s : specs) {
    ids.insert(s.concept_id());
    bases.insert(s.base_name);
    pos += s.category == Category::BaselinePositive;
    neg += s.category == Category::BaselineNegative;
  }
  CHECK(ids.size() == 60);
  CHECK(bases.size() == 30);
  CHECK(pos == 30);
  CHECK(neg == 30);
  CHECK(ids.contains("trust1"));
  CHECK(ids.contains("trust2"));
  CHECK(find(specs, "jealousy1").category == Category::BaselineNegative);
  CHECK(find(specs, "jealousy1").direction == Direction::AtoB);
  CHECK(find(specs, "optimistic2").direction == Direction::BtoA);
}

TEST_CASE("builtin trust concepts follow the scored directions") {
  const auto specs = builtin_trust_concepts();
  REQUIRE(specs.size() == 20);
  const std::set<std::string> expected = {
      "confidence1", "experience1", "reputation1",   "cooperation2",    "competence2",
      "honesty2",    "performance2", "expectation1", "dependency1",     "ability2",
      "predictable2", "integrity2",  "benevolence2", "risk1",           "responsibility2",
      "reliability2", "willingness2", "commitment2", "security1",       "fulfillment1"};
  std::set<std::string> ids;
  for (const auto& s : specs) {
    ids.insert(s.concept_id());
    CHECK(s.category == Category::TrustRelated);
  }
  CHECK(ids == expected);
  CHECK(find(specs, "cooperation2").direction == Direction::BtoA);
  CHECK(find(specs, "security1").direction == Direction::AtoB);
}

TEST_CASE("builtin registry merges trust concepts into the baseline") {
  const auto reg = builtin_registry();
  CHECK(reg.size() == 78);
  CHECK(reg.at("confidence1").category == Category::BaselinePositive);
  CHECK(reg.at("willingness2").category == Category::TrustRelated);
  // Shared concepts carry identical templates in both lists.
  const auto trust = builtin_trust_concepts();
  for (const auto id : {"confidence1", "cooperation2"}) {
    CHECK(reg.at(id).positive_template == find(trust, id).positive_template);
    CHECK(reg.at(id).negative_template == find(trust, id).negative_template);
  }
}

TEST_CASE("every builtin concept contrasts and shares the background") {
  const auto ctx = DyadContext::standard();
  const auto reg = builtin_registry();
  for (const auto& spec : reg.specs()) {
    CAPTURE(spec.concept_id());
    const auto a = render_prompts(spec, ctx);
    const auto b = render_prompts(spec, ctx);
    CHECK(a.positive == b.positive);
    CHECK(a.negative == b.negative);
    CHECK(a.positive != a.negative);
    CHECK(a.positive.starts_with(ctx.background + " "));
    CHECK(a.negative.starts_with(ctx.background + " "));
  }
}

TEST_CASE("concept id round trip") {
  const auto reg = builtin_registry();
  for (const auto& spec : reg.specs()) {
    const auto parsed = ConceptId::parse(spec.concept_id());
    CHECK(parsed.base_name == spec.base_name);
    CHECK(parsed.direction == spec.direction);
  }
  CHECK(ConceptId::parse("abc11") == ConceptId{"abc1", Direction::AtoB});
  CHECK(kind_of([] { ConceptId::parse("trust3"); }) == ErrorKind::Validation);
  CHECK(kind_of([] { ConceptId::parse("1"); }) == ErrorKind::Validation);
  CHECK(kind_of([] { ConceptId::parse("tr ust1"); }) == ErrorKind::Validation);
}

TEST_CASE("registry json round trip and duplicate detection") {
  const auto specs = builtin_registry().specs();
  CHECK(parse_registry(registry_to_json(specs)) == specs);

  auto dup = builtin_baseline_concepts();
  dup.push_back(dup.front());
  CHECK(kind_of([&] { ConceptRegistry{dup}; }) == ErrorKind::Validation);
  CHECK(kind_of([] { parse_registry(R"([{"base_name":"x","direction":"up"}])"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_registry("{}"); }) == ErrorKind::Parse);
}

TEST_CASE("corpus parsing") {
  SUBCASE("three valid lines") {
    const auto corpus = parse_corpus(
        R"({"concept_id":"trust1","polarity":"positive","index":0,"text":"Katherine lets Alice lead."}
{"concept_id":"trust1","polarity":"negative","index":0,"text":"Katherine rechecks all of Alice's work."}

{"concept_id":"fear2","polarity":"positive","index":3,"text":"Alice avoids Katherine."}
)");
    CHECK(corpus.records.size() == 3);
    CHECK(corpus.manifest.at("trust1") == ClassCounts{1, 1});
    CHECK(corpus.manifest.at("fear2") == ClassCounts{1, 0});
    CHECK(corpus.warnings.size() == 2);
    CHECK(corpus.records[2].index == 3);
  }
  SUBCASE("empty text names the line") {
    try {
      parse_corpus(R"({"concept_id":"trust1","polarity":"positive","index":0,"text":"ok"}
{"concept_id":"trust1","polarity":"negative","index":0,"text":""})");
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Parse);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("malformed lines") {
    CHECK(kind_of([] { parse_corpus("not json"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_corpus(R"({"concept_id":"trust1","polarity":"maybe","index":0,"text":"x"})"); }) ==
          ErrorKind::Parse);
    CHECK(kind_of([] { parse_corpus(R"({"concept_id":"trust1","polarity":"positive","index":-1,"text":"x"})"); }) ==
          ErrorKind::Parse);
    CHECK(kind_of([] { parse_corpus(R"({"concept_id":"trust","polarity":"positive","index":0,"text":"x"})"); }) ==
          ErrorKind::Parse);
    CHECK(kind_of([] { parse_corpus(R"({"concept_id":"trust1","polarity":"positive","index":0,"text":"a\nb"})"); }) ==
          ErrorKind::Parse);
  }
  SUBCASE("registry and duplicate validation") {
    const auto reg = builtin_registry();
    const std::string line = R"({"concept_id":"zebra1","polarity":"positive","index":0,"text":"x"})";
    CHECK(parse_corpus(line).records.size() == 1);
    CHECK(kind_of([&] { parse_corpus(line, &reg); }) == ErrorKind::Validation);
    const std::string twice = R"({"concept_id":"trust1","polarity":"positive","index":0,"text":"x"}
{"concept_id":"trust1","polarity":"positive","index":0,"text":"y"})";
    CHECK(kind_of([&] { parse_corpus(twice); }) == ErrorKind::Validation);
  }
}

TEST_CASE("full-size corpus file has no warnings") {
  test_support::TempDir dir("corpus");
  std::string text;
  for (const auto pol : {Polarity::Positive, Polarity::Negative}) {
    for (int i = 0; i < 100; ++i) {
      text += story_to_json_line({"trust1", pol, i, "Story " + std::to_string(i) + "."}) + "\n";
    }
  }
  io::write_text(dir.path() / "corpus.jsonl", text);
  const auto reg = builtin_registry();
  const auto corpus = load_corpus(dir.path() / "corpus.jsonl", &reg);
  CHECK(corpus.records.size() == 200);
  CHECK(corpus.manifest.size() == 1);
  CHECK(corpus.manifest.at("trust1") == ClassCounts{100, 100});
  CHECK(corpus.warnings.empty());
  CHECK(kind_of([&] { load_corpus(dir.path() / "missing.jsonl"); }) == ErrorKind::Io);
}
