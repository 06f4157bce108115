#include "argen/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace argen {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

EventOntology::EventOntology(std::vector<Entry> entries, std::string version)
    : entries_(std::move(entries)), version_(std::move(version)) {
  std::unordered_set<std::string> seen_types;
  for (const auto& entry : entries_) {
    if (entry.event_type.empty())
      throw std::runtime_error("ontology: empty event type name");
    if (!seen_types.insert(entry.event_type).second)
      throw std::runtime_error("ontology: duplicate event type '" +
                               entry.event_type + "'");
    if (entry.roles.empty())
      throw std::runtime_error("ontology: event type '" + entry.event_type +
                               "' has no roles");
    std::unordered_set<std::string> seen_roles;
    for (const auto& role : entry.roles) {
      if (role.empty())
        throw std::runtime_error("ontology: empty role name under '" +
                                 entry.event_type + "'");
      if (!seen_roles.insert(role).second)
        throw std::runtime_error("ontology: duplicate role '" + role +
                                 "' under '" + entry.event_type + "'");
    }
  }
}

bool EventOntology::has_event_type(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Entry& e) { return e.event_type == name; });
}

const std::vector<std::string>& EventOntology::roles_of(
    const std::string& event_type) const {
  for (const auto& e : entries_)
    if (e.event_type == event_type) return e.roles;
  throw std::runtime_error("ontology: unknown event type '" + event_type +
                           "'");
}

std::vector<std::string> EventOntology::distinct_roles() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& e : entries_)
    for (const auto& role : e.roles)
      if (seen.insert(role).second) out.push_back(role);
  return out;
}

EventOntology load_ontology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ontology: cannot open '" + path + "'");

  std::vector<EventOntology::Entry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t tab = t.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("ontology: line " + std::to_string(lineno) +
                               ": expected EventType<TAB>Role1,Role2,...");
    EventOntology::Entry entry;
    entry.event_type = trim(t.substr(0, tab));
    std::stringstream roles(t.substr(tab + 1));
    std::string role;
    while (std::getline(roles, role, ',')) {
      role = trim(role);
      if (!role.empty()) entry.roles.push_back(role);
    }
    entries.push_back(std::move(entry));
  }
  return EventOntology(std::move(entries), path);
}

const char* to_string(TemplateStyle s) {
  switch (s) {
    case TemplateStyle::special_tokens: return "special_tokens";
    case TemplateStyle::english_tokens: return "english_tokens";
  }
  return "?";
}

std::optional<TemplateStyle> template_style_from_string(const std::string& s) {
  if (s == "special_tokens") return TemplateStyle::special_tokens;
  if (s == "english_tokens") return TemplateStyle::english_tokens;
  return std::nullopt;
}

std::string role_open_token(const std::string& role) { return "<" + role + ">"; }
std::string role_close_token(const std::string& role) {
  return "</" + role + ">";
}

bool EventTemplate::has_role(const std::string& role) const {
  return std::any_of(slots.begin(), slots.end(),
                     [&](const Slot& s) { return s.role == role; });
}

namespace {

// Fisher-Yates with explicit bounded draws so permutations do not depend on
// the standard library's distribution implementation.
void seeded_shuffle(std::vector<std::string>& roles, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = roles.size(); i > 1; --i) {
    std::uint64_t j = rng() % i;
    std::swap(roles[i - 1], roles[j]);
  }
}

}  // namespace

EventTemplate get_template(const EventOntology& ontology,
                           const std::string& event_type, TemplateStyle style,
                           std::optional<std::uint64_t> role_order_seed) {
  std::vector<std::string> roles = ontology.roles_of(event_type);
  if (role_order_seed) seeded_shuffle(roles, *role_order_seed);

  EventTemplate tmpl;
  tmpl.event_type = event_type;
  tmpl.style = style;
  for (const auto& role : roles) {
    if (style == TemplateStyle::special_tokens) {
      tmpl.slots.push_back({role, role_open_token(role), role_close_token(role)});
    } else {
      tmpl.slots.push_back({role, role + ":", kSepToken});
    }
  }
  return tmpl;
}

std::string render_empty(const EventTemplate& tmpl) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.slots.size(); ++i) {
    const auto& slot = tmpl.slots[i];
    if (!out.empty()) out += " ";
    if (tmpl.style == TemplateStyle::special_tokens) {
      out += slot.open_token + " " + tmpl.none_token + " " + slot.close_token;
    } else {
      out += slot.open_token + " " + tmpl.none_token;
      if (i + 1 < tmpl.slots.size()) out += " " + std::string(kSepToken);
    }
  }
  return out;
}

std::set<std::string> special_token_inventory(const EventOntology& ontology) {
  std::set<std::string> inventory;
  inventory.insert(kNoneToken);
  inventory.insert(kAndToken);
  inventory.insert(kEosToken);
  for (const auto& role : ontology.distinct_roles()) {
    inventory.insert(role_open_token(role));
    inventory.insert(role_close_token(role));
  }
  return inventory;
}

}  // namespace argen
