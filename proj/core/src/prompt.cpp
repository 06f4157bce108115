#include "argen/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace argen {

const char* to_string(EventTypeMode m) {
  switch (m) {
    case EventTypeMode::none: return "none";
    case EventTypeMode::english_tokens: return "english_tokens";
    case EventTypeMode::translated_tokens: return "translated_tokens";
    case EventTypeMode::special_tokens: return "special_tokens";
  }
  return "?";
}

std::optional<EventTypeMode> event_type_mode_from_string(const std::string& s) {
  if (s == "none") return EventTypeMode::none;
  if (s == "english_tokens") return EventTypeMode::english_tokens;
  if (s == "translated_tokens") return EventTypeMode::translated_tokens;
  if (s == "special_tokens") return EventTypeMode::special_tokens;
  return std::nullopt;
}

TranslationTable load_translation_table(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("translation table: cannot open '" + path + "'");
  TranslationTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos
                                             : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw std::runtime_error("translation table: line " +
                               std::to_string(lineno) +
                               ": expected EventType<TAB>language<TAB>token");
    std::string event_type = line.substr(0, t1);
    std::string language = line.substr(t1 + 1, t2 - t1 - 1);
    std::string token = line.substr(t2 + 1);
    if (!line.empty() && token.ends_with("\r")) token.pop_back();
    table[{event_type, language}] = token;
  }
  return table;
}

std::string event_type_special_token(const std::string& event_type) {
  std::string lowered;
  lowered.reserve(event_type.size());
  for (char c : event_type)
    lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return "<--" + lowered + "-->";
}

ModelInput build_input(const EventInstance& instance, const EventTemplate& tmpl,
                       const PromptConfig& config) {
  if (instance.trigger.text.empty())
    throw std::runtime_error("build_input: empty trigger surface string");

  const std::string sep = " " + config.separator_token + " ";
  std::string text = instance.text + sep + instance.trigger.text;

  switch (config.event_type_mode) {
    case EventTypeMode::none:
      break;
    case EventTypeMode::english_tokens:
      text += sep + instance.event_type;
      break;
    case EventTypeMode::translated_tokens: {
      auto it = config.translation_table.find(
          {instance.event_type, instance.language});
      if (it == config.translation_table.end())
        throw std::runtime_error("build_input: no translation for ('" +
                                 instance.event_type + "', '" +
                                 instance.language + "')");
      text += sep + it->second;
      break;
    }
    case EventTypeMode::special_tokens:
      text += sep + event_type_special_token(instance.event_type);
      break;
  }

  text += sep + render_empty(tmpl);
  return ModelInput{std::move(text), 0};
}

}  // namespace argen
