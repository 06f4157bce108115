#pragma once

#include <set>
#include <vector>

#include "argen/copy_model.hpp"

namespace argen {

/// Token ids permitted at every constrained decoding step: input tokens,
/// the reserved special inventory, and end-of-sequence.
struct AllowedSet {
  std::vector<char> allowed;  // indexed by token id
  int eos_id = -1;

  bool allows(int id) const {
    return id >= 0 && id < static_cast<int>(allowed.size()) && allowed[id];
  }
  std::size_t count() const;
};

/// Exact union of input ids and specials; the specials set must contain the
/// end-of-sequence id.
AllowedSet allowed_token_set(const std::vector<int>& input_ids,
                             const std::set<int>& specials, int eos_id,
                             int vocab_size);

/// Masks logits outside the allowed set to -inf, leaving allowed entries
/// unchanged.
Eigen::RowVectorXd constrained_step(const Eigen::RowVectorXd& logits,
                                    const AllowedSet& allowed);

/// One beam hypothesis: generated token ids plus cumulative log P.
struct BeamHypothesis {
  std::vector<int> token_ids;
  double log_prob = 0.0;
  bool completed = false;
};

struct BeamResult {
  std::vector<int> token_ids;
  double normalized_score = 0.0;
  bool truncated = false;
  std::vector<BeamHypothesis> finished;  // best-first
};

/// Length-normalized beam search over the copy mixture. With a constraint,
/// every emitted token is a member of the allowed set. Width 1 reproduces
/// greedy decoding bitwise.
BeamResult beam_search(const CopyModel& model, const std::vector<int>& input_ids,
                       int start_id, int eos_id, int width, int max_len,
                       const AllowedSet* constraint = nullptr);

}  // namespace argen
