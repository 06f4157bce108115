#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace argen {

/// Half-open character span [start, end) into a passage's raw text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

struct Trigger {
  Span span;
  std::string text;
};

struct Argument {
  Span span;
  std::string text;
  std::string role;
};

/// One token of the passage together with its character span in the raw text.
struct Token {
  std::string text;
  Span span;
};

/// One passage with a trigger, an event type, and the gold argument list.
struct EventInstance {
  std::string doc_id;
  std::string sent_id;
  std::string language;
  std::string text;
  std::vector<Token> tokens;
  Trigger trigger;
  std::string event_type;
  std::vector<Argument> arguments;  // kept in passage order

  std::string key() const { return doc_id + "|" + sent_id; }
};

/// Role name -> ordered argument strings, the decoded (pre-offset) form of a
/// generated output string.
using RoleAssignments = std::map<std::string, std::vector<std::string>>;

enum class Resolution { exact, nearest_to_trigger, unresolved };

const char* to_string(Resolution r);
std::optional<Resolution> resolution_from_string(const std::string& s);

/// A generated argument located (or not) in the passage.
struct ArgumentPrediction {
  std::string role;
  std::string text;
  std::optional<Span> span;  // absent iff resolution == unresolved
  Resolution resolution = Resolution::unresolved;
};

}  // namespace argen
