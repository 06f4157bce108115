#include "argen/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace argen {

std::size_t AllowedSet::count() const {
  std::size_t n = 0;
  for (char c : allowed) n += c ? 1 : 0;
  return n;
}

AllowedSet allowed_token_set(const std::vector<int>& input_ids,
                             const std::set<int>& specials, int eos_id,
                             int vocab_size) {
  if (input_ids.empty())
    throw std::invalid_argument("allowed_token_set: empty input");
  if (specials.empty() || specials.count(eos_id) == 0)
    throw std::invalid_argument(
        "allowed_token_set: specials must contain the end-of-sequence token");
  AllowedSet set;
  set.allowed.assign(static_cast<std::size_t>(vocab_size), 0);
  set.eos_id = eos_id;
  auto mark = [&](int id) {
    if (id < 0 || id >= vocab_size)
      throw std::out_of_range("allowed_token_set: token id " + std::to_string(id));
    set.allowed[static_cast<std::size_t>(id)] = 1;
  };
  for (int id : input_ids) mark(id);
  for (int id : specials) mark(id);
  return set;
}

Eigen::RowVectorXd constrained_step(const Eigen::RowVectorXd& logits,
                                    const AllowedSet& allowed) {
  if (logits.size() != static_cast<Eigen::Index>(allowed.allowed.size()))
    throw std::invalid_argument("constrained_step: logits length " +
                                std::to_string(logits.size()) +
                                " vs vocabulary " +
                                std::to_string(allowed.allowed.size()));
  Eigen::RowVectorXd out = logits;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < out.size(); ++j)
    if (!allowed.allowed[static_cast<std::size_t>(j)]) out(j) = neg_inf;
  return out;
}

namespace {

struct LiveHypothesis {
  std::vector<int> token_ids;
  double log_prob = 0.0;
  std::unique_ptr<DecoderState> state;
  int pending_token = -1;  // fed on the next expansion
};

struct Candidate {
  std::size_t parent;
  int token;
  double log_prob;
};

double normalized(double log_prob, std::size_t length) {
  return log_prob / static_cast<double>(std::max<std::size_t>(1, length));
}

}  // namespace

BeamResult beam_search(const CopyModel& model, const std::vector<int>& input_ids,
                       int start_id, int eos_id, int width, int max_len,
                       const AllowedSet* constraint) {
  if (width < 1) throw std::invalid_argument("beam_search: width must be >= 1");
  if (max_len < 1) throw std::invalid_argument("beam_search: max_len must be >= 1");

  auto ctx = model.backend().encode(input_ids);

  std::vector<LiveHypothesis> live;
  {
    LiveHypothesis root;
    root.state = model.backend().new_decoder_state(*ctx);
    root.pending_token = start_id;
    live.push_back(std::move(root));
  }

  std::vector<BeamHypothesis> finished;

  for (int step = 0; step < max_len && !live.empty(); ++step) {
    if (static_cast<int>(finished.size()) >= width) break;

    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < live.size(); ++i) {
      StepOutput out =
          model.backend().decode_step(*ctx, *live[i].state, live[i].pending_token);
      Eigen::RowVectorXd masked;
      if (constraint) masked = constrained_step(out.logits, *constraint);
      StepDistribution sd = model.step_distribution(
          out, input_ids, constraint ? &masked : nullptr);
      for (Eigen::Index v = 0; v < sd.p_mix.size(); ++v) {
        if (constraint && !constraint->allows(static_cast<int>(v))) continue;
        candidates.push_back(
            {i, static_cast<int>(v),
             live[i].log_prob + std::log(std::max(sd.p_mix(v), 1e-300))});
      }
    }
    // Highest score first; ties resolved toward the earlier parent and the
    // lower token id so width 1 matches greedy argmax exactly.
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                if (a.parent != b.parent) return a.parent < b.parent;
                return a.token < b.token;
              });

    std::vector<LiveHypothesis> next_live;
    std::size_t taken = 0;
    for (const auto& cand : candidates) {
      if (taken >= static_cast<std::size_t>(width)) break;
      const LiveHypothesis& parent = live[cand.parent];
      if (cand.token == eos_id) {
        BeamHypothesis done;
        done.token_ids = parent.token_ids;
        done.log_prob = cand.log_prob;
        done.completed = true;
        finished.push_back(std::move(done));
      } else {
        LiveHypothesis child;
        child.token_ids = parent.token_ids;
        child.token_ids.push_back(cand.token);
        child.log_prob = cand.log_prob;
        child.pending_token = cand.token;
        child.state = parent.state->clone();
        next_live.push_back(std::move(child));
      }
      ++taken;
    }
    live = std::move(next_live);
  }

  BeamResult result;
  std::sort(finished.begin(), finished.end(),
            [](const BeamHypothesis& a, const BeamHypothesis& b) {
              double na = normalized(a.log_prob, a.token_ids.size() + 1);
              double nb = normalized(b.log_prob, b.token_ids.size() + 1);
              if (na != nb) return na > nb;
              return a.token_ids.size() < b.token_ids.size();
            });
  if (!finished.empty()) {
    result.token_ids = finished.front().token_ids;
    result.normalized_score =
        normalized(finished.front().log_prob, finished.front().token_ids.size() + 1);
    result.truncated = false;
  } else if (!live.empty()) {
    // Max length reached without end-of-sequence: best live hypothesis,
    // flagged as truncated.
    auto best = std::max_element(
        live.begin(), live.end(),
        [](const LiveHypothesis& a, const LiveHypothesis& b) {
          return normalized(a.log_prob, a.token_ids.size()) <
                 normalized(b.log_prob, b.token_ids.size());
        });
    result.token_ids = best->token_ids;
    result.normalized_score = normalized(best->log_prob, best->token_ids.size());
    result.truncated = true;
  }
  result.finished = std::move(finished);
  return result;
}

}  // namespace argen
