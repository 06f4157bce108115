#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace argen {

/// Byte-pair tokenizer with an atomic reserved-token layer.
///
/// Reserved tokens (template tags, [None], [and], <SEP>, event-type tokens,
/// the end-of-sequence marker) are matched greedily before any subword
/// segmentation and can never be produced by a merge, so the natural
/// subword vocabulary stays disjoint from the reserved inventory.
///
/// Words are marked with a leading U+2581 so decode() restores single-space
/// word boundaries; runs of whitespace are normalized to one space.
class BpeTokenizer {
 public:
  static constexpr const char* kPadToken = "<PAD>";  // also the start token
  static constexpr const char* kUnkToken = "<UNK>";

  BpeTokenizer() = default;

  /// Learns `num_merges` byte-pair merges over the corpus. Reserved tokens
  /// are registered before training and stripped from the merge stream.
  static BpeTokenizer train(const std::vector<std::string>& corpus,
                            std::size_t num_merges,
                            const std::vector<std::string>& reserved_tokens);

  /// Rebuilds a tokenizer from serialized tables (checkpoint loading).
  static BpeTokenizer from_tables(std::vector<std::string> vocab,
                                  std::vector<std::pair<int, int>> merges,
                                  std::vector<std::string> reserved_tokens);

  std::vector<int> encode(const std::string& text) const;
  std::string decode(const std::vector<int>& ids) const;

  int id_of(const std::string& token) const;  // -1 when absent
  const std::string& token_of(int id) const;
  int vocab_size() const { return static_cast<int>(vocab_.size()); }

  bool is_reserved(int id) const;
  int pad_id() const { return pad_id_; }
  int unk_id() const { return unk_id_; }
  int eos_id() const { return eos_id_; }

  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::vector<std::pair<int, int>>& merges() const { return merges_; }
  const std::vector<std::string>& reserved_tokens() const {
    return reserved_tokens_;
  }

 private:
  int add_token(const std::string& token);
  void index_reserved();
  std::vector<int> encode_word(const std::string& word) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> token_ids_;
  std::vector<std::pair<int, int>> merges_;           // rank order
  std::unordered_map<long long, int> merge_rank_;     // (a,b) key -> rank
  std::unordered_map<long long, int> merge_result_;   // (a,b) key -> merged id
  std::vector<std::string> reserved_tokens_;
  std::unordered_set<int> reserved_ids_;
  int pad_id_ = -1;
  int unk_id_ = -1;
  int eos_id_ = -1;
};

}  // namespace argen
