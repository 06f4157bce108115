#pragma once

#include <string>
#include <vector>

#include "argen/ontology.hpp"
#include "argen/types.hpp"

namespace argen {

/// Serializes the instance's gold arguments into the target output string:
/// each slot holds its arguments joined by the and-token (passage order), or
/// the none token when the role is empty. Throws if an argument's role is
/// absent from the template or its text contains a reserved token.
std::string encode_target(const EventInstance& instance,
                          const EventTemplate& tmpl);

/// Same serialization driven by a role->strings map instead of spans.
std::string encode_assignments(const RoleAssignments& assignments,
                               const EventTemplate& tmpl);

/// Parses arbitrary generated text back into role assignments. Total
/// function: slots whose tag pair is absent or malformed decode to the empty
/// list, content outside recognized tag pairs is ignored, none tokens are
/// filtered and the and-token splits multi-argument slots.
RoleAssignments decode_target(const std::string& output,
                              const EventTemplate& tmpl);

/// Locates each argument string in the passage by exact substring search.
/// Unique match -> exact; several matches -> the occurrence nearest the
/// trigger start (ties leftmost), with the k-th duplicate of a string under
/// one role taking the k-th nearest occurrence; no match -> unresolved.
std::vector<ArgumentPrediction> resolve_offsets(
    const RoleAssignments& assignments, const EventInstance& instance);

/// Role -> ordered argument strings projection of the gold annotation.
RoleAssignments gold_assignments(const EventInstance& instance,
                                 const EventTemplate& tmpl);

}  // namespace argen
