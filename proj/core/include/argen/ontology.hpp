#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace argen {

/// Event ontology: event type -> ordered role inventory. Immutable after
/// load; safe to share across threads.
class EventOntology {
 public:
  struct Entry {
    std::string event_type;
    std::vector<std::string> roles;
  };

  EventOntology() = default;
  EventOntology(std::vector<Entry> entries, std::string version);

  bool has_event_type(const std::string& name) const;
  const std::vector<std::string>& roles_of(const std::string& event_type) const;
  const std::vector<Entry>& entries() const { return entries_; }
  const std::string& version() const { return version_; }

  /// Distinct role names across all event types, in first-seen order.
  std::vector<std::string> distinct_roles() const;

 private:
  std::vector<Entry> entries_;  // file order
  std::string version_;
};

/// Ontology file format: one event type per line,
///   EventType<TAB>Role1,Role2,...
/// in canonical role order. Lines starting with '#' are comments.
EventOntology load_ontology(const std::string& path);

enum class TemplateStyle { special_tokens, english_tokens };

const char* to_string(TemplateStyle s);
std::optional<TemplateStyle> template_style_from_string(const std::string& s);

/// Canonical reserved tokens. Role tags are derived as "<Role>"/"</Role>"
/// and are shared across event types that reuse the same role name.
inline constexpr const char* kNoneToken = "[None]";
inline constexpr const char* kAndToken = "[and]";
inline constexpr const char* kSepToken = "<SEP>";
inline constexpr const char* kEosToken = "</s>";

std::string role_open_token(const std::string& role);
std::string role_close_token(const std::string& role);

/// Per-event-type output skeleton. In special_tokens style each slot is a
/// reserved open/close tag pair; in english_tokens style the slot opener is
/// the plain-text "Role:" label and slots are separated by <SEP>.
struct EventTemplate {
  struct Slot {
    std::string role;
    std::string open_token;
    std::string close_token;
  };

  std::string event_type;
  std::vector<Slot> slots;
  TemplateStyle style = TemplateStyle::special_tokens;
  std::string none_token = kNoneToken;
  std::string and_token = kAndToken;

  bool has_role(const std::string& role) const;
};

/// Materializes the template for one event type. Slots follow ontology order
/// unless role_order_seed is given, in which case they are permuted by a
/// deterministic seeded shuffle (same seed, same permutation).
EventTemplate get_template(const EventOntology& ontology,
                           const std::string& event_type, TemplateStyle style,
                           std::optional<std::uint64_t> role_order_seed = {});

/// Renders the template with every slot holding exactly one none token, e.g.
///   <Agent> [None] </Agent> <Victim> [None] </Victim>
std::string render_empty(const EventTemplate& tmpl);

/// {none, and} + one open/close pair per distinct role + end-of-sequence.
std::set<std::string> special_token_inventory(const EventOntology& ontology);

}  // namespace argen
