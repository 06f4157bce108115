#pragma once

#include <map>
#include <optional>
#include <string>

#include "argen/ontology.hpp"
#include "argen/types.hpp"

namespace argen {

enum class EventTypeMode { none, english_tokens, translated_tokens, special_tokens };

const char* to_string(EventTypeMode m);
std::optional<EventTypeMode> event_type_mode_from_string(const std::string& s);

/// (event type, language) -> token string, for translated_tokens mode.
using TranslationTable = std::map<std::pair<std::string, std::string>, std::string>;

/// Translation table file format: EventType<TAB>language<TAB>token lines,
/// '#' comments.
TranslationTable load_translation_table(const std::string& path);

struct PromptConfig {
  EventTypeMode event_type_mode = EventTypeMode::none;
  TranslationTable translation_table;
  std::string separator_token = kSepToken;
};

/// Encoder input text plus the offset of the passage within it.
struct ModelInput {
  std::string text;
  std::size_t passage_char_base = 0;
};

/// Reserved token representing an event type in special_tokens mode, e.g.
/// "<--life:die-->" for Life:Die.
std::string event_type_special_token(const std::string& event_type);

/// Assembles the encoder input:
///   passage <SEP> trigger [<SEP> event-type token] <SEP> empty template
/// The event-type token is omitted in mode none; its form per mode follows
/// the configured table (translated_tokens) or the event type name.
ModelInput build_input(const EventInstance& instance, const EventTemplate& tmpl,
                       const PromptConfig& config);

}  // namespace argen
