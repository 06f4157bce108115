#include "argen/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "argen/codec.hpp"

namespace argen {

using nlohmann::json;

namespace {

[[noreturn]] void line_error(const std::string& path, std::size_t lineno,
                             const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
}

void check_span(const Span& span, const std::string& surface,
                const std::string& text, const std::string& path,
                std::size_t lineno, const char* what) {
  if (span.start >= span.end || span.end > text.size())
    line_error(path, lineno,
               std::string(what) + " span [" + std::to_string(span.start) + "," +
                   std::to_string(span.end) + ") out of bounds for text of length " +
                   std::to_string(text.size()));
  if (text.substr(span.start, span.end - span.start) != surface)
    line_error(path, lineno,
               std::string(what) + " surface '" + surface +
                   "' does not match text at its span");
}

std::vector<Token> tokens_with_spans(const std::vector<std::string>& words,
                                     const std::string& text,
                                     const std::string& path, std::size_t lineno) {
  std::vector<Token> tokens;
  std::size_t cursor = 0;
  for (const auto& w : words) {
    std::size_t pos = text.find(w, cursor);
    if (pos == std::string::npos)
      line_error(path, lineno, "token '" + w + "' not found in text order");
    tokens.push_back({w, {pos, pos + w.size()}});
    cursor = pos + w.size();
  }
  return tokens;
}

std::vector<std::string> whitespace_words(const std::string& text) {
  std::vector<std::string> words;
  std::string current;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

bool ends_with_punctuation(const std::string& token) {
  static const std::vector<std::string> marks = {
      ".", ",", ";", ":", "!", "?",
      "\xd8\x8c" /* Arabic comma */, "\xd8\x9b" /* Arabic semicolon */,
      "\xd8\x9f" /* Arabic question mark */, "\xe3\x80\x82" /* ideographic stop */,
      "\xef\xbc\x8c" /* fullwidth comma */};
  for (const auto& m : marks)
    if (token.size() >= m.size() &&
        token.compare(token.size() - m.size(), m.size(), m) == 0)
      return true;
  return false;
}

json prediction_to_json(const ArgumentPrediction& p) {
  json j{{"role", p.role}, {"text", p.text}, {"resolution", to_string(p.resolution)}};
  if (p.span) {
    j["start"] = p.span->start;
    j["end"] = p.span->end;
  } else {
    j["start"] = nullptr;
    j["end"] = nullptr;
  }
  return j;
}

ArgumentPrediction prediction_from_json(const json& j, const std::string& path,
                                        std::size_t lineno) {
  ArgumentPrediction p;
  p.role = j.at("role").get<std::string>();
  p.text = j.at("text").get<std::string>();
  auto res = resolution_from_string(j.at("resolution").get<std::string>());
  if (!res) line_error(path, lineno, "unknown resolution value");
  p.resolution = *res;
  if (!j.at("start").is_null() && !j.at("end").is_null()) {
    p.span = Span{j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()};
  } else if (p.resolution != Resolution::unresolved) {
    line_error(path, lineno, "resolved prediction with null offsets");
  }
  return p;
}

}  // namespace

DatasetSplit::Counts DatasetSplit::recompute_counts() const {
  Counts c;
  std::set<std::string> keys;
  for (const auto& inst : instances) {
    keys.insert(inst.key());
    ++c.events;
    c.arguments += inst.arguments.size();
  }
  for (const auto& sent : plain_sentences) keys.insert(sent.key());
  c.sentences = keys.size();
  return c;
}

DatasetSplit load_jsonl(const std::string& path, const EventOntology* ontology) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset: cannot open '" + path + "'");

  DatasetSplit split;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error(path, lineno, std::string("malformed JSON: ") + e.what());
    }

    EventInstance inst;
    try {
      inst.doc_id = j.at("doc_id").get<std::string>();
      inst.sent_id = j.at("sent_id").get<std::string>();
      inst.language = j.value("language", std::string{});
      inst.text = j.at("text").get<std::string>();
      std::vector<std::string> words;
      if (j.contains("tokens") && !j.at("tokens").empty())
        words = j.at("tokens").get<std::vector<std::string>>();
      else
        words = whitespace_words(inst.text);
      inst.tokens = tokens_with_spans(words, inst.text, path, lineno);
    } catch (const json::exception& e) {
      line_error(path, lineno, std::string("bad record: ") + e.what());
    }
    if (split.language.empty()) split.language = inst.language;

    bool has_event = j.contains("event_type") && !j.at("event_type").is_null();
    if (!has_event) {
      split.plain_sentences.push_back(std::move(inst));
      continue;
    }

    try {
      inst.event_type = j.at("event_type").get<std::string>();
      const auto& tr = j.at("trigger");
      inst.trigger.span = {tr.at("start").get<std::size_t>(),
                           tr.at("end").get<std::size_t>()};
      inst.trigger.text = tr.at("text").get<std::string>();
      for (const auto& a : j.value("arguments", json::array())) {
        Argument arg;
        arg.span = {a.at("start").get<std::size_t>(), a.at("end").get<std::size_t>()};
        arg.text = a.at("text").get<std::string>();
        arg.role = a.at("role").get<std::string>();
        inst.arguments.push_back(std::move(arg));
      }
    } catch (const json::exception& e) {
      line_error(path, lineno, std::string("bad record: ") + e.what());
    }

    check_span(inst.trigger.span, inst.trigger.text, inst.text, path, lineno,
               "trigger");
    for (const auto& arg : inst.arguments)
      check_span(arg.span, arg.text, inst.text, path, lineno, "argument");

    if (ontology) {
      if (!ontology->has_event_type(inst.event_type))
        line_error(path, lineno, "unknown event type '" + inst.event_type + "'");
      const auto& roles = ontology->roles_of(inst.event_type);
      for (const auto& arg : inst.arguments)
        if (std::find(roles.begin(), roles.end(), arg.role) == roles.end())
          line_error(path, lineno, "unknown role '" + arg.role + "' for '" +
                                       inst.event_type + "'");
    }

    std::stable_sort(inst.arguments.begin(), inst.arguments.end(),
                     [](const Argument& a, const Argument& b) {
                       return a.span.start < b.span.start;
                     });
    split.instances.push_back(std::move(inst));
  }
  split.counts = split.recompute_counts();
  return split;
}

void write_jsonl(const DatasetSplit& split, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dataset: cannot write '" + path + "'");
  auto record = [](const EventInstance& inst, bool has_event) {
    json j;
    j["doc_id"] = inst.doc_id;
    j["sent_id"] = inst.sent_id;
    j["language"] = inst.language;
    j["text"] = inst.text;
    json toks = json::array();
    for (const auto& t : inst.tokens) toks.push_back(t.text);
    j["tokens"] = toks;
    if (has_event) {
      j["event_type"] = inst.event_type;
      j["trigger"] = {{"start", inst.trigger.span.start},
                      {"end", inst.trigger.span.end},
                      {"text", inst.trigger.text}};
      json args = json::array();
      for (const auto& a : inst.arguments)
        args.push_back({{"start", a.span.start},
                        {"end", a.span.end},
                        {"text", a.text},
                        {"role", a.role}});
      j["arguments"] = args;
    } else {
      j["event_type"] = nullptr;
    }
    return j;
  };
  for (const auto& inst : split.instances) out << record(inst, true) << "\n";
  for (const auto& sent : split.plain_sentences) out << record(sent, false) << "\n";
  if (!out) throw std::runtime_error("dataset: write failed for '" + path + "'");
}

std::pair<std::vector<EventInstance>, PortionMap> split_long_sentence(
    const EventInstance& instance, std::size_t max_tokens) {
  if (max_tokens < 2)
    throw std::invalid_argument("split_long_sentence: max_tokens must be >= 2");
  const auto& tokens = instance.tokens;
  const std::size_t n = tokens.size();

  // Trigger token range [t0, t1): tokens overlapping the trigger char span.
  std::size_t t0 = n, t1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tokens[i].span.end > instance.trigger.span.start &&
        tokens[i].span.start < instance.trigger.span.end) {
      t0 = std::min(t0, i);
      t1 = std::max(t1, i + 1);
    }
  }
  if (t0 >= t1)
    throw std::runtime_error("split_long_sentence: trigger not aligned to tokens");
  if (t1 - t0 >= max_tokens)
    throw std::runtime_error(
        "split_long_sentence: trigger spans more tokens than the limit allows");

  // Token boundaries of the portions.
  std::vector<std::size_t> bounds{0};
  while (bounds.back() < n) {
    std::size_t start = bounds.back();
    std::size_t end;
    if (n - start < max_tokens) {
      end = n;
    } else {
      std::size_t limit = start + max_tokens - 1;  // portions stay < max_tokens
      end = limit;
      for (std::size_t s = limit; s > start; --s) {
        if (ends_with_punctuation(tokens[s - 1].text)) {
          end = s;
          break;
        }
      }
      // Never cut through the trigger.
      if (t0 < end && t1 > end) {
        if (t0 > start)
          end = t0;
        else if (t1 - start < max_tokens)
          end = t1;
        else
          throw std::runtime_error(
              "split_long_sentence: cannot place a boundary off the trigger");
      }
    }
    if (end <= start)
      throw std::runtime_error("split_long_sentence: empty portion");
    bounds.push_back(end);
  }

  const std::size_t num_portions = bounds.size() - 1;
  PortionMap map;
  std::vector<EventInstance> portions;
  for (std::size_t p = 0; p < num_portions; ++p) {
    std::size_t tok_begin = bounds[p], tok_end = bounds[p + 1];
    std::size_t char_begin = p == 0 ? 0 : tokens[tok_begin].span.start;
    std::size_t char_end = p + 1 == num_portions
                               ? instance.text.size()
                               : tokens[tok_end].span.start;
    map.entries.push_back({char_begin, tok_begin});

    EventInstance portion;
    portion.doc_id = instance.doc_id;
    portion.sent_id = num_portions == 1
                          ? instance.sent_id
                          : instance.sent_id + "#p" + std::to_string(p);
    portion.language = instance.language;
    portion.text = instance.text.substr(char_begin, char_end - char_begin);
    for (std::size_t i = tok_begin; i < tok_end; ++i)
      portion.tokens.push_back({tokens[i].text,
                                {tokens[i].span.start - char_begin,
                                 tokens[i].span.end - char_begin}});

    bool carries_event = t0 >= tok_begin && t1 <= tok_end;
    if (carries_event) {
      map.trigger_portion = p;
      portion.event_type = instance.event_type;
      portion.trigger.text = instance.trigger.text;
      portion.trigger.span = {instance.trigger.span.start - char_begin,
                              instance.trigger.span.end - char_begin};
      for (const auto& arg : instance.arguments) {
        if (arg.span.start >= char_begin && arg.span.end <= char_end) {
          Argument shifted = arg;
          shifted.span = {arg.span.start - char_begin, arg.span.end - char_begin};
          portion.arguments.push_back(std::move(shifted));
        } else {
          map.dropped_arguments.push_back(arg);
        }
      }
    }
    portions.push_back(std::move(portion));
  }
  return {std::move(portions), std::move(map)};
}

std::vector<ArgumentPrediction> merge_portion_predictions(
    const std::vector<std::pair<std::size_t, std::vector<ArgumentPrediction>>>&
        portion_predictions,
    const PortionMap& map) {
  std::vector<ArgumentPrediction> merged;
  for (const auto& [portion, preds] : portion_predictions) {
    if (portion >= map.entries.size())
      throw std::out_of_range("merge_portion_predictions: unknown portion index " +
                              std::to_string(portion));
    std::size_t delta = map.entries[portion].char_delta;
    for (const auto& pred : preds) {
      ArgumentPrediction shifted = pred;
      if (shifted.span)
        shifted.span = Span{shifted.span->start + delta, shifted.span->end + delta};
      merged.push_back(std::move(shifted));
    }
  }
  return merged;
}

void write_predictions(const std::vector<InstancePredictions>& predictions,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("predictions: cannot write '" + path + "'");
  for (const auto& inst : predictions) {
    json j;
    j["doc_id"] = inst.doc_id;
    j["sent_id"] = inst.sent_id;
    j["event_type"] = inst.event_type;
    json preds = json::array();
    for (const auto& p : inst.predictions) preds.push_back(prediction_to_json(p));
    j["predictions"] = preds;
    out << j << "\n";
  }
  if (!out) throw std::runtime_error("predictions: write failed for '" + path + "'");
}

std::vector<InstancePredictions> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("predictions: cannot open '" + path + "'");
  std::vector<InstancePredictions> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error(path, lineno, std::string("malformed JSON: ") + e.what());
    }
    InstancePredictions inst;
    try {
      inst.doc_id = j.at("doc_id").get<std::string>();
      inst.sent_id = j.at("sent_id").get<std::string>();
      inst.event_type = j.at("event_type").get<std::string>();
      for (const auto& p : j.at("predictions"))
        inst.predictions.push_back(prediction_from_json(p, path, lineno));
    } catch (const json::exception& e) {
      line_error(path, lineno, std::string("bad record: ") + e.what());
    }
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace argen
