#include <doctest.h>

#include "argen/codec.hpp"
#include "argen/prompt.hpp"
#include "test_util.hpp"

using namespace argen;

namespace {

EventInstance small_instance(const std::string& language = "en") {
  EventInstance inst;
  inst.text = "a missile hit the houses";
  inst.language = language;
  inst.event_type = "Life:Die";
  std::size_t pos = inst.text.find("hit");
  inst.trigger = {{pos, pos + 3}, "hit"};
  return inst;
}

EventTemplate tiny_template() {
  test::TempDir dir;
  EventOntology ont =
      load_ontology(dir.write("ont.tsv", "Life:Die\tAgent,Place\n"));
  return get_template(ont, "Life:Die", TemplateStyle::special_tokens);
}

}  // namespace

TEST_CASE("build_input mode none: passage, trigger, template") {
  PromptConfig config;
  ModelInput input = build_input(small_instance(), tiny_template(), config);
  CHECK(input.text ==
        "a missile hit the houses <SEP> hit <SEP> "
        "<Agent> [None] </Agent> <Place> [None] </Place>");
  CHECK(input.passage_char_base == 0);
}

TEST_CASE("build_input inserts the event type token per mode") {
  EventTemplate tmpl = tiny_template();

  PromptConfig english;
  english.event_type_mode = EventTypeMode::english_tokens;
  CHECK(build_input(small_instance("zh"), tmpl, english).text.find(
            "<SEP> Life:Die <SEP>") != std::string::npos);

  PromptConfig special;
  special.event_type_mode = EventTypeMode::special_tokens;
  CHECK(build_input(small_instance(), tmpl, special).text.find(
            "<SEP> <--life:die--> <SEP>") != std::string::npos);
  CHECK(event_type_special_token("Attack") == "<--attack-->");

  PromptConfig translated;
  translated.event_type_mode = EventTypeMode::translated_tokens;
  translated.translation_table[{"Life:Die", "zh"}] = "\xe6\xad\xbb\xe4\xba\xa1";
  ModelInput input = build_input(small_instance("zh"), tmpl, translated);
  CHECK(input.text.find("\xe6\xad\xbb\xe4\xba\xa1") != std::string::npos);

  // missing table entry is an error
  CHECK_THROWS(build_input(small_instance("ar"), tmpl, translated));
}

TEST_CASE("build_input omission equivalence in mode none") {
  PromptConfig config;
  EventTemplate tmpl = tiny_template();
  ModelInput input = build_input(small_instance(), tmpl, config);
  std::string tail = render_empty(tmpl);
  REQUIRE(input.text.size() >= tail.size());
  std::string prefix = input.text.substr(0, input.text.size() - tail.size());
  CHECK(prefix.find("Life:Die") == std::string::npos);
}

TEST_CASE("build_input always ends with the empty template") {
  EventTemplate tmpl = tiny_template();
  for (auto mode : {EventTypeMode::none, EventTypeMode::english_tokens,
                    EventTypeMode::special_tokens}) {
    PromptConfig config;
    config.event_type_mode = mode;
    ModelInput input = build_input(small_instance(), tmpl, config);
    CHECK(input.text.ends_with(render_empty(tmpl)));
  }
}

TEST_CASE("build_input requires a trigger surface string") {
  EventInstance inst = small_instance();
  inst.trigger.text.clear();
  CHECK_THROWS(build_input(inst, tiny_template(), PromptConfig{}));
}

TEST_CASE("translation table file round-trip") {
  test::TempDir dir;
  std::string path = dir.write(
      "table.tsv", "# comment\nAttack\tzh\t\xe6\x94\xbb\xe5\x87\xbb\nAttack\ten\tAttack\n");
  TranslationTable table = load_translation_table(path);
  CHECK(table.size() == 2);
  CHECK(table.at({"Attack", "zh"}) == "\xe6\x94\xbb\xe5\x87\xbb");
  CHECK_THROWS(load_translation_table(dir.write("bad.tsv", "Attack zh x\n")));
}
