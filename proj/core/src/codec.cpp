#include "argen/codec.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace argen {

const char* to_string(Resolution r) {
  switch (r) {
    case Resolution::exact: return "exact";
    case Resolution::nearest_to_trigger: return "nearest_to_trigger";
    case Resolution::unresolved: return "unresolved";
  }
  return "?";
}

std::optional<Resolution> resolution_from_string(const std::string& s) {
  if (s == "exact") return Resolution::exact;
  if (s == "nearest_to_trigger") return Resolution::nearest_to_trigger;
  if (s == "unresolved") return Resolution::unresolved;
  return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> reserved_tokens_of(const EventTemplate& tmpl) {
  std::vector<std::string> reserved{tmpl.none_token, tmpl.and_token};
  for (const auto& slot : tmpl.slots) {
    reserved.push_back(slot.open_token);
    reserved.push_back(slot.close_token);
  }
  return reserved;
}

void check_no_reserved(const std::string& text, const EventTemplate& tmpl) {
  for (const auto& tok : reserved_tokens_of(tmpl)) {
    if (text.find(tok) != std::string::npos)
      throw std::runtime_error("encode_target: argument text '" + text +
                               "' contains reserved token '" + tok + "'");
  }
}

std::string render_slot_content(const std::vector<std::string>& args,
                                const EventTemplate& tmpl) {
  if (args.empty()) return tmpl.none_token;
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += " " + tmpl.and_token + " ";
    out += args[i];
  }
  return out;
}

// Removes every occurrence of `needle` from `s`.
std::string erase_all(std::string s, const std::string& needle) {
  std::size_t pos = 0;
  while ((pos = s.find(needle, pos)) != std::string::npos) s.erase(pos, needle.size());
  return s;
}

std::vector<std::string> parse_slot_content(const std::string& content,
                                            const EventTemplate& tmpl) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t next = content.find(tmpl.and_token, pos);
    std::string piece = next == std::string::npos
                            ? content.substr(pos)
                            : content.substr(pos, next - pos);
    piece = trim(erase_all(piece, tmpl.none_token));
    if (!piece.empty()) out.push_back(piece);
    if (next == std::string::npos) break;
    pos = next + tmpl.and_token.size();
  }
  return out;
}

}  // namespace

std::string encode_assignments(const RoleAssignments& assignments,
                               const EventTemplate& tmpl) {
  for (const auto& [role, args] : assignments) {
    if (!tmpl.has_role(role))
      throw std::runtime_error("encode_target: role '" + role +
                               "' absent from template for '" +
                               tmpl.event_type + "'");
    for (const auto& text : args) check_no_reserved(text, tmpl);
  }

  std::string out;
  for (std::size_t i = 0; i < tmpl.slots.size(); ++i) {
    const auto& slot = tmpl.slots[i];
    auto it = assignments.find(slot.role);
    const std::vector<std::string> empty;
    const auto& args = it == assignments.end() ? empty : it->second;
    if (!out.empty()) out += " ";
    if (tmpl.style == TemplateStyle::special_tokens) {
      out += slot.open_token + " " + render_slot_content(args, tmpl) + " " +
             slot.close_token;
    } else {
      out += slot.open_token + " " + render_slot_content(args, tmpl);
      if (i + 1 < tmpl.slots.size()) out += " " + std::string(kSepToken);
    }
  }
  return out;
}

RoleAssignments gold_assignments(const EventInstance& instance,
                                 const EventTemplate& tmpl) {
  RoleAssignments assignments;
  for (const auto& slot : tmpl.slots) assignments[slot.role];
  std::vector<Argument> args = instance.arguments;
  std::stable_sort(args.begin(), args.end(),
                   [](const Argument& a, const Argument& b) {
                     return a.span.start < b.span.start;
                   });
  for (const auto& arg : args) {
    if (!tmpl.has_role(arg.role))
      throw std::runtime_error("encode_target: role '" + arg.role +
                               "' absent from template for '" +
                               tmpl.event_type + "'");
    assignments[arg.role].push_back(arg.text);
  }
  return assignments;
}

std::string encode_target(const EventInstance& instance,
                          const EventTemplate& tmpl) {
  return encode_assignments(gold_assignments(instance, tmpl), tmpl);
}

RoleAssignments decode_target(const std::string& output,
                              const EventTemplate& tmpl) {
  RoleAssignments assignments;
  for (const auto& slot : tmpl.slots) assignments[slot.role];

  for (std::size_t i = 0; i < tmpl.slots.size(); ++i) {
    const auto& slot = tmpl.slots[i];
    std::size_t open = output.find(slot.open_token);
    if (open == std::string::npos) continue;
    std::size_t begin = open + slot.open_token.size();

    std::size_t end;
    if (tmpl.style == TemplateStyle::special_tokens) {
      end = output.find(slot.close_token, begin);
      if (end == std::string::npos) continue;  // malformed slot: empty list
    } else {
      // English-token slots run until the next separator, the next slot
      // label, or the end of the string.
      end = output.find(slot.close_token, begin);
      for (const auto& other : tmpl.slots) {
        if (other.role == slot.role) continue;
        std::size_t p = output.find(other.open_token, begin);
        if (p != std::string::npos && p < end) end = p;
      }
      if (end == std::string::npos) end = output.size();
    }

    assignments[slot.role] =
        parse_slot_content(output.substr(begin, end - begin), tmpl);
  }
  return assignments;
}

namespace {

std::vector<std::size_t> find_occurrences(const std::string& haystack,
                                          const std::string& needle) {
  std::vector<std::size_t> out;
  if (needle.empty()) return out;
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    out.push_back(pos);
    ++pos;  // allow overlapping matches
  }
  return out;
}

}  // namespace

std::vector<ArgumentPrediction> resolve_offsets(
    const RoleAssignments& assignments, const EventInstance& instance) {
  std::vector<ArgumentPrediction> predictions;
  const long long trigger_start =
      static_cast<long long>(instance.trigger.span.start);

  for (const auto& [role, args] : assignments) {
    // k-th duplicate of a string under one role takes the k-th nearest match
    std::map<std::string, std::size_t> dup_index;
    for (const auto& text : args) {
      std::size_t k = dup_index[text]++;
      ArgumentPrediction pred;
      pred.role = role;
      pred.text = text;
      auto occurrences = find_occurrences(instance.text, text);
      if (occurrences.empty() || k >= occurrences.size()) {
        pred.resolution = Resolution::unresolved;
        predictions.push_back(std::move(pred));
        continue;
      }
      std::stable_sort(occurrences.begin(), occurrences.end(),
                       [&](std::size_t a, std::size_t b) {
                         long long da =
                             std::llabs(static_cast<long long>(a) - trigger_start);
                         long long db =
                             std::llabs(static_cast<long long>(b) - trigger_start);
                         if (da != db) return da < db;
                         return a < b;  // ties: leftmost
                       });
      pred.span = Span{occurrences[k], occurrences[k] + text.size()};
      pred.resolution = occurrences.size() == 1 ? Resolution::exact
                                                : Resolution::nearest_to_trigger;
      predictions.push_back(std::move(pred));
    }
  }
  return predictions;
}

}  // namespace argen
