#include "argen/unicode.hpp"

#include <array>

namespace argen {

namespace {

int sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 1;  // invalid lead byte, treat as single unit
}

std::optional<std::uint32_t> decode_at(const std::string& s, std::size_t i,
                                       int len) {
  if (i + static_cast<std::size_t>(len) > s.size()) return std::nullopt;
  std::uint32_t cp = 0;
  unsigned char lead = static_cast<unsigned char>(s[i]);
  switch (len) {
    case 1: return lead;
    case 2: cp = lead & 0x1f; break;
    case 3: cp = lead & 0x0f; break;
    case 4: cp = lead & 0x07; break;
    default: return std::nullopt;
  }
  for (int k = 1; k < len; ++k) {
    unsigned char c = static_cast<unsigned char>(s[i + k]);
    if ((c >> 6) != 0x2) return std::nullopt;
    cp = (cp << 6) | (c & 0x3f);
  }
  return cp;
}

}  // namespace

std::vector<std::string> utf8_codepoints(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    int len = sequence_length(static_cast<unsigned char>(s[i]));
    if (!decode_at(s, i, len)) len = 1;
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0, i = 0;
  while (i < s.size()) {
    int len = sequence_length(static_cast<unsigned char>(s[i]));
    if (!decode_at(s, i, len)) len = 1;
    i += len;
    ++n;
  }
  return n;
}

const char* to_string(Script s) {
  switch (s) {
    case Script::latin: return "latin";
    case Script::cjk: return "cjk";
    case Script::arabic: return "arabic";
    case Script::other: return "other";
  }
  return "?";
}

Script script_of_codepoint(std::uint32_t cp) {
  if ((cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z') ||
      (cp >= 0x00c0 && cp <= 0x024f))  // Latin-1 Supplement .. Latin Extended-B
    return Script::latin;
  if ((cp >= 0x0600 && cp <= 0x06ff) || (cp >= 0x0750 && cp <= 0x077f) ||
      (cp >= 0x08a0 && cp <= 0x08ff) || (cp >= 0xfb50 && cp <= 0xfdff) ||
      (cp >= 0xfe70 && cp <= 0xfeff))
    return Script::arabic;
  if ((cp >= 0x4e00 && cp <= 0x9fff) || (cp >= 0x3400 && cp <= 0x4dbf) ||
      (cp >= 0x3040 && cp <= 0x30ff) ||  // kana
      (cp >= 0xf900 && cp <= 0xfaff))
    return Script::cjk;
  return Script::other;
}

Script dominant_script(const std::string& s) {
  std::array<std::size_t, 4> counts{};
  std::size_t i = 0;
  while (i < s.size()) {
    int len = sequence_length(static_cast<unsigned char>(s[i]));
    auto cp = decode_at(s, i, len);
    if (!cp) {
      ++i;
      continue;
    }
    i += len;
    Script sc = script_of_codepoint(*cp);
    // ASCII digits/punctuation/space land in `other`; skip them so that
    // mixed text like "12 studios" is still classified by its letters.
    if (sc == Script::other && *cp < 0x370) continue;
    counts[static_cast<std::size_t>(sc)]++;
  }
  std::size_t best = 3, best_count = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] > best_count) {
      best = k;
      best_count = counts[k];
    }
  }
  return best_count == 0 ? Script::other : static_cast<Script>(best);
}

}  // namespace argen
