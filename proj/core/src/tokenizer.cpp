#include "argen/tokenizer.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "argen/ontology.hpp"
#include "argen/unicode.hpp"

namespace argen {

namespace {

constexpr const char* kWordMarker = "\xe2\x96\x81";  // U+2581

long long pair_key(int a, int b) {
  return (static_cast<long long>(a) << 32) | static_cast<unsigned int>(b);
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

std::vector<std::string> split_words(const std::string& segment) {
  std::vector<std::string> words;
  std::string current;
  for (char c : segment) {
    if (is_space(c)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

}  // namespace

int BpeTokenizer::add_token(const std::string& token) {
  auto it = token_ids_.find(token);
  if (it != token_ids_.end()) return it->second;
  int id = static_cast<int>(vocab_.size());
  vocab_.push_back(token);
  token_ids_[token] = id;
  return id;
}

void BpeTokenizer::index_reserved() {
  reserved_ids_.clear();
  for (const auto& tok : reserved_tokens_) reserved_ids_.insert(token_ids_.at(tok));
  pad_id_ = token_ids_.at(kPadToken);
  unk_id_ = token_ids_.at(kUnkToken);
  auto it = token_ids_.find(kEosToken);
  eos_id_ = it == token_ids_.end() ? -1 : it->second;
  // Sort longest-first so greedy reserved matching prefers e.g. "</Agent>"
  // over a hypothetical shorter prefix.
  std::sort(reserved_tokens_.begin(), reserved_tokens_.end(),
            [](const std::string& a, const std::string& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a < b;
            });
}

BpeTokenizer BpeTokenizer::train(const std::vector<std::string>& corpus,
                                 std::size_t num_merges,
                                 const std::vector<std::string>& reserved_tokens) {
  BpeTokenizer tok;
  tok.add_token(kPadToken);
  tok.add_token(kUnkToken);
  tok.reserved_tokens_.assign(reserved_tokens.begin(), reserved_tokens.end());
  if (std::find(tok.reserved_tokens_.begin(), tok.reserved_tokens_.end(),
                kEosToken) == tok.reserved_tokens_.end())
    tok.reserved_tokens_.push_back(kEosToken);
  for (const auto& r : tok.reserved_tokens_) tok.add_token(r);
  tok.index_reserved();

  // Word frequency table over the corpus with reserved tokens stripped out.
  std::map<std::string, long> word_freq;
  for (const auto& text : corpus) {
    std::size_t pos = 0;
    std::string segment;
    while (pos < text.size()) {
      bool matched = false;
      for (const auto& r : tok.reserved_tokens_) {
        if (text.compare(pos, r.size(), r) == 0) {
          for (const auto& w : split_words(segment)) word_freq[w]++;
          segment.clear();
          pos += r.size();
          matched = true;
          break;
        }
      }
      if (!matched) segment.push_back(text[pos++]);
    }
    for (const auto& w : split_words(segment)) word_freq[w]++;
  }

  // Seed the alphabet and express every word as a symbol-id sequence.
  std::vector<std::pair<std::vector<int>, long>> sequences;
  sequences.reserve(word_freq.size());
  for (const auto& [word, freq] : word_freq) {
    std::vector<int> ids;
    for (const auto& cp : utf8_codepoints(kWordMarker + word))
      ids.push_back(tok.add_token(cp));
    sequences.emplace_back(std::move(ids), freq);
  }

  for (std::size_t m = 0; m < num_merges; ++m) {
    // Count adjacent pairs weighted by word frequency.
    std::map<std::pair<int, int>, long> pair_freq;
    for (const auto& [ids, freq] : sequences)
      for (std::size_t i = 0; i + 1 < ids.size(); ++i)
        pair_freq[{ids[i], ids[i + 1]}] += freq;

    // Most frequent pair; ties resolved by the merged string so training is
    // deterministic across platforms.
    std::pair<int, int> best{-1, -1};
    long best_freq = 1;
    std::string best_str;
    for (const auto& [pair, freq] : pair_freq) {
      std::string merged = tok.vocab_[pair.first] + tok.vocab_[pair.second];
      if (tok.token_ids_.count(merged) &&
          tok.reserved_ids_.count(tok.token_ids_[merged]))
        continue;  // never synthesize a reserved string
      if (freq > best_freq || (freq == best_freq && best.first != -1 &&
                               merged < best_str)) {
        best = pair;
        best_freq = freq;
        best_str = merged;
      }
    }
    if (best.first < 0) break;  // no pair occurs twice

    int merged_id = tok.add_token(best_str);
    int rank = static_cast<int>(tok.merges_.size());
    tok.merges_.emplace_back(best.first, best.second);
    tok.merge_rank_[pair_key(best.first, best.second)] = rank;
    tok.merge_result_[pair_key(best.first, best.second)] = merged_id;

    for (auto& [ids, freq] : sequences) {
      std::vector<int> next;
      next.reserve(ids.size());
      std::size_t i = 0;
      while (i < ids.size()) {
        if (i + 1 < ids.size() && ids[i] == best.first &&
            ids[i + 1] == best.second) {
          next.push_back(merged_id);
          i += 2;
        } else {
          next.push_back(ids[i++]);
        }
      }
      ids = std::move(next);
    }
  }
  return tok;
}

BpeTokenizer BpeTokenizer::from_tables(std::vector<std::string> vocab,
                                       std::vector<std::pair<int, int>> merges,
                                       std::vector<std::string> reserved_tokens) {
  BpeTokenizer tok;
  tok.vocab_ = std::move(vocab);
  for (std::size_t i = 0; i < tok.vocab_.size(); ++i)
    tok.token_ids_[tok.vocab_[i]] = static_cast<int>(i);
  tok.merges_ = std::move(merges);
  for (std::size_t r = 0; r < tok.merges_.size(); ++r) {
    auto [a, b] = tok.merges_[r];
    std::string merged = tok.vocab_.at(a) + tok.vocab_.at(b);
    tok.merge_rank_[pair_key(a, b)] = static_cast<int>(r);
    tok.merge_result_[pair_key(a, b)] = tok.token_ids_.at(merged);
  }
  tok.reserved_tokens_ = std::move(reserved_tokens);
  tok.index_reserved();
  return tok;
}

std::vector<int> BpeTokenizer::encode_word(const std::string& word) const {
  std::vector<int> ids;
  for (const auto& cp : utf8_codepoints(kWordMarker + word)) {
    auto it = token_ids_.find(cp);
    ids.push_back(it == token_ids_.end() ? unk_id_ : it->second);
  }
  while (ids.size() > 1) {
    int best_rank = -1;
    std::pair<int, int> best{-1, -1};
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      auto it = merge_rank_.find(pair_key(ids[i], ids[i + 1]));
      if (it != merge_rank_.end() &&
          (best_rank < 0 || it->second < best_rank)) {
        best_rank = it->second;
        best = {ids[i], ids[i + 1]};
      }
    }
    if (best_rank < 0) break;
    int merged_id = merge_result_.at(pair_key(best.first, best.second));
    std::vector<int> next;
    next.reserve(ids.size());
    std::size_t i = 0;
    while (i < ids.size()) {
      if (i + 1 < ids.size() && ids[i] == best.first && ids[i + 1] == best.second) {
        next.push_back(merged_id);
        i += 2;
      } else {
        next.push_back(ids[i++]);
      }
    }
    ids = std::move(next);
  }
  return ids;
}

std::vector<int> BpeTokenizer::encode(const std::string& text) const {
  std::vector<int> out;
  std::string segment;
  auto flush = [&] {
    for (const auto& w : split_words(segment))
      for (int id : encode_word(w)) out.push_back(id);
    segment.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    bool matched = false;
    for (const auto& r : reserved_tokens_) {
      if (text.compare(pos, r.size(), r) == 0) {
        flush();
        out.push_back(token_ids_.at(r));
        pos += r.size();
        matched = true;
        break;
      }
    }
    if (!matched) segment.push_back(text[pos++]);
  }
  flush();
  return out;
}

std::string BpeTokenizer::decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) {
    const std::string& tok = token_of(id);
    if (id == pad_id_) continue;
    if (is_reserved(id) || id == unk_id_) {
      if (!out.empty()) out += " ";
      out += tok;
    } else if (tok.size() >= 3 && tok.compare(0, 3, kWordMarker) == 0) {
      if (!out.empty()) out += " ";
      out += tok.substr(3);
    } else {
      out += tok;
    }
  }
  return out;
}

int BpeTokenizer::id_of(const std::string& token) const {
  auto it = token_ids_.find(token);
  return it == token_ids_.end() ? -1 : it->second;
}

const std::string& BpeTokenizer::token_of(int id) const {
  if (id < 0 || id >= vocab_size())
    throw std::out_of_range("tokenizer: token id " + std::to_string(id));
  return vocab_[static_cast<std::size_t>(id)];
}

bool BpeTokenizer::is_reserved(int id) const { return reserved_ids_.count(id) > 0; }

}  // namespace argen
