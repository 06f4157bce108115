#include <doctest.h>

#include <random>

#include "argen/codec.hpp"
#include "argen/ontology.hpp"
#include "random_instances.hpp"
#include "test_util.hpp"

using namespace argen;

namespace {

Span span_of(const std::string& text, const std::string& word) {
  std::size_t pos = text.find(word);
  REQUIRE(pos != std::string::npos);
  return {pos, pos + word.size()};
}

// The running Life:Die example: one agent, two victims, an instrument and a
// place, trigger "killed".
EventInstance life_die_instance() {
  EventInstance inst;
  inst.doc_id = "doc";
  inst.sent_id = "1";
  inst.language = "en";
  inst.text =
      "the coalition killed civilians and a woman with a missile near the houses";
  inst.event_type = "Life:Die";
  inst.trigger = {span_of(inst.text, "killed"), "killed"};
  inst.arguments = {
      {span_of(inst.text, "coalition"), "coalition", "Agent"},
      {span_of(inst.text, "civilians"), "civilians", "Victim"},
      {span_of(inst.text, "woman"), "woman", "Victim"},
      {span_of(inst.text, "missile"), "missile", "Instrument"},
      {span_of(inst.text, "houses"), "houses", "Place"},
  };
  return inst;
}

EventTemplate life_die_template(TemplateStyle style = TemplateStyle::special_tokens) {
  test::TempDir dir;
  EventOntology ont = load_ontology(
      dir.write("ont.tsv", "Life:Die\tAgent,Victim,Instrument,Place\n"));
  return get_template(ont, "Life:Die", style);
}

}  // namespace

TEST_CASE("encode_target fills slots, joins multiples with [and]") {
  EventInstance inst = life_die_instance();
  EventTemplate tmpl = life_die_template();
  CHECK(encode_target(inst, tmpl) ==
        "<Agent> coalition </Agent> <Victim> civilians [and] woman </Victim> "
        "<Instrument> missile </Instrument> <Place> houses </Place>");
}

TEST_CASE("encode_target keeps [None] for empty roles") {
  EventInstance inst = life_die_instance();
  inst.arguments.clear();
  EventTemplate tmpl = life_die_template();
  CHECK(encode_target(inst, tmpl) == render_empty(tmpl));
}

TEST_CASE("encode_target rejects roles outside the template") {
  EventInstance inst = life_die_instance();
  inst.arguments.push_back({span_of(inst.text, "the"), "the", "Buyer"});
  CHECK_THROWS(encode_target(inst, life_die_template()));
}

TEST_CASE("encode_target rejects reserved tokens inside argument text") {
  EventInstance inst = life_die_instance();
  inst.text += " [None]";
  inst.arguments[0] = {span_of(inst.text, "[None]"), "[None]", "Agent"};
  CHECK_THROWS(encode_target(inst, life_die_template()));
}

TEST_CASE("decode_target inverts the Life:Die example") {
  EventInstance inst = life_die_instance();
  EventTemplate tmpl = life_die_template();
  RoleAssignments decoded = decode_target(encode_target(inst, tmpl), tmpl);
  CHECK(decoded["Agent"] == std::vector<std::string>{"coalition"});
  CHECK(decoded["Victim"] == std::vector<std::string>{"civilians", "woman"});
  CHECK(decoded["Instrument"] == std::vector<std::string>{"missile"});
  CHECK(decoded["Place"] == std::vector<std::string>{"houses"});
}

TEST_CASE("decode_target single-slot fragment") {
  EventTemplate tmpl = life_die_template();
  RoleAssignments decoded =
      decode_target("<Victim> civilians [and] woman </Victim>", tmpl);
  CHECK(decoded["Victim"] == std::vector<std::string>{"civilians", "woman"});
  CHECK(decoded["Agent"].empty());
}

TEST_CASE("decode_target tolerates malformed output") {
  EventTemplate tmpl = life_die_template();

  // missing close tag: that slot decodes empty, earlier slots survive
  RoleAssignments decoded =
      decode_target("<Agent> coalition </Agent> <Place> houses", tmpl);
  CHECK(decoded["Agent"] == std::vector<std::string>{"coalition"});
  CHECK(decoded["Place"].empty());
  CHECK(decoded["Victim"].empty());

  // arbitrary garbage never throws, keys stay within the template roles
  for (const std::string junk :
       {"", "</Agent>", "<Agent>", "[and] [and]", "no tags at all",
        "<Agent> </Agent> stray <Victim> [None] </Victim> tail"}) {
    RoleAssignments r = decode_target(junk, tmpl);
    for (const auto& [role, args] : r) CHECK(tmpl.has_role(role));
  }
}

TEST_CASE("decode_target english-token style") {
  EventInstance inst = life_die_instance();
  EventTemplate tmpl = life_die_template(TemplateStyle::english_tokens);
  std::string target = encode_target(inst, tmpl);
  CHECK(target ==
        "Agent: coalition <SEP> Victim: civilians [and] woman <SEP> "
        "Instrument: missile <SEP> Place: houses");
  RoleAssignments decoded = decode_target(target, tmpl);
  CHECK(decoded["Victim"] == std::vector<std::string>{"civilians", "woman"});
  CHECK(decoded["Place"] == std::vector<std::string>{"houses"});
}

TEST_CASE("codec round-trip over randomized instances in three scripts") {
  std::mt19937_64 rng(20240811);
  for (auto range : {test::ScriptRange::latin, test::ScriptRange::cjk,
                     test::ScriptRange::arabic}) {
    for (auto style :
         {TemplateStyle::special_tokens, TemplateStyle::english_tokens}) {
      for (int i = 0; i < 150; ++i) {
        auto [inst, tmpl] = test::random_instance(rng, range, style);
        RoleAssignments gold = gold_assignments(inst, tmpl);
        RoleAssignments decoded = decode_target(encode_target(inst, tmpl), tmpl);
        CHECK(decoded == gold);
      }
    }
  }
}

TEST_CASE("decode_target fuzz: arbitrary bytes never throw") {
  EventTemplate tmpl = life_die_template();
  std::mt19937_64 rng(99);
  for (int i = 0; i < 500; ++i) {
    std::size_t len = rng() % 120;
    std::string junk;
    for (std::size_t k = 0; k < len; ++k)
      junk.push_back(static_cast<char>(rng() % 256));
    RoleAssignments r = decode_target(junk, tmpl);
    for (const auto& [role, args] : r) {
      CHECK(tmpl.has_role(role));
      for (const auto& a : args) {
        CHECK(a.find(tmpl.none_token) == std::string::npos);
      }
    }
  }
}

TEST_CASE("resolve_offsets unique match is exact") {
  EventInstance inst = life_die_instance();
  RoleAssignments assignments{{"Instrument", {"missile"}}};
  auto preds = resolve_offsets(assignments, inst);
  REQUIRE(preds.size() == 1);
  CHECK(preds[0].resolution == Resolution::exact);
  REQUIRE(preds[0].span.has_value());
  CHECK(inst.text.substr(preds[0].span->start,
                         preds[0].span->end - preds[0].span->start) == "missile");
}

TEST_CASE("resolve_offsets picks the occurrence nearest the trigger") {
  // "dog" at offsets 10 and 90, trigger at 85.
  std::string text(100, '.');
  text.replace(10, 3, "dog");
  text.replace(85, 3, "bit");
  text.replace(90, 3, "dog");
  EventInstance inst;
  inst.text = text;
  inst.trigger = {{85, 88}, "bit"};

  auto preds = resolve_offsets({{"Agent", {"dog"}}}, inst);
  REQUIRE(preds.size() == 1);
  CHECK(preds[0].resolution == Resolution::nearest_to_trigger);
  CHECK(preds[0].span == Span{90, 93});

  // the k-th duplicate takes the k-th nearest occurrence
  auto dup = resolve_offsets({{"Agent", {"dog", "dog"}}}, inst);
  REQUIRE(dup.size() == 2);
  CHECK(dup[0].span == Span{90, 93});
  CHECK(dup[1].span == Span{10, 13});

  // more duplicates than occurrences: the extras stay unresolved
  auto triple = resolve_offsets({{"Agent", {"dog", "dog", "dog"}}}, inst);
  REQUIRE(triple.size() == 3);
  CHECK(triple[2].resolution == Resolution::unresolved);
}

TEST_CASE("resolve_offsets distance ties break leftmost") {
  // "cat" at 10 and 20, trigger starts at 15: equal distance, take 10.
  std::string text(40, '.');
  text.replace(10, 3, "cat");
  text.replace(15, 2, "xy");
  text.replace(20, 3, "cat");
  EventInstance inst;
  inst.text = text;
  inst.trigger = {{15, 17}, "xy"};
  auto preds = resolve_offsets({{"Agent", {"cat"}}}, inst);
  REQUIRE(preds.size() == 1);
  CHECK(preds[0].span == Span{10, 13});
}

TEST_CASE("resolve_offsets marks generated-but-absent text unresolved") {
  EventInstance inst;
  inst.text = "only one studio here";
  inst.trigger = {{0, 4}, "only"};
  auto preds = resolve_offsets({{"Place", {"studios"}}}, inst);
  REQUIRE(preds.size() == 1);
  CHECK(preds[0].resolution == Resolution::unresolved);
  CHECK_FALSE(preds[0].span.has_value());
}

TEST_CASE("resolve_offsets span always reproduces the argument text") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto [inst, tmpl] =
        test::random_instance(rng, test::ScriptRange::latin,
                              TemplateStyle::special_tokens);
    RoleAssignments gold = gold_assignments(inst, tmpl);
    for (const auto& pred : resolve_offsets(gold, inst)) {
      if (pred.resolution == Resolution::unresolved) continue;
      REQUIRE(pred.span.has_value());
      CHECK(inst.text.substr(pred.span->start, pred.span->end - pred.span->start) ==
            pred.text);
    }
  }
}
