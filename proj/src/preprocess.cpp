#include "hategraph/preprocess.hpp"

#include <fstream>

#include "hategraph/util.hpp"

namespace hategraph::preprocess {

namespace {

bool drop_token(std::string_view t) {
  return t.starts_with("http://") || t.starts_with("https://") || t.starts_with("www.") ||
         t.starts_with("@") || t.starts_with("#") || t == "RT";
}

// Unicode blocks treated as punctuation besides ASCII; everything else
// non-ASCII (accented letters, emoji) passes through untouched.
bool is_unicode_punct(uint32_t cp) {
  return (cp >= 0x00A1 && cp <= 0x00BF) ||  // Latin-1 punctuation and symbols
         (cp >= 0x2000 && cp <= 0x206F) ||  // general punctuation
         (cp >= 0x2E00 && cp <= 0x2E7F) ||  // supplemental punctuation
         (cp >= 0x3000 && cp <= 0x303F) ||  // CJK symbols and punctuation
         (cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
         (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65);
}

// Decodes one UTF-8 code point at s[i]; advances i. Invalid bytes decode to
// 0xFFFD and consume one byte.
uint32_t decode_utf8(std::string_view s, size_t& i, size_t& len) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  size_t remaining = s.size() - i;
  uint32_t cp = 0xFFFD;
  len = 1;
  if (c < 0x80) {
    cp = c;
  } else if ((c >> 5) == 0x6 && remaining >= 2 && (s[i + 1] & 0xC0) == 0x80) {
    cp = (static_cast<uint32_t>(c & 0x1F) << 6) | (s[i + 1] & 0x3F);
    len = 2;
  } else if ((c >> 4) == 0xE && remaining >= 3 && (s[i + 1] & 0xC0) == 0x80 &&
             (s[i + 2] & 0xC0) == 0x80) {
    cp = (static_cast<uint32_t>(c & 0x0F) << 12) | (static_cast<uint32_t>(s[i + 1] & 0x3F) << 6) |
         (s[i + 2] & 0x3F);
    len = 3;
  } else if ((c >> 3) == 0x1E && remaining >= 4 && (s[i + 1] & 0xC0) == 0x80 &&
             (s[i + 2] & 0xC0) == 0x80 && (s[i + 3] & 0xC0) == 0x80) {
    cp = (static_cast<uint32_t>(c & 0x07) << 18) | (static_cast<uint32_t>(s[i + 1] & 0x3F) << 12) |
         (static_cast<uint32_t>(s[i + 2] & 0x3F) << 6) | (s[i + 3] & 0x3F);
    len = 4;
  }
  i += len;
  return cp;
}

}  // namespace

std::string clean_tweet(std::string_view raw) {
  std::vector<std::string> tokens = util::split_whitespace(raw);
  std::string joined;
  for (const auto& t : tokens) {
    if (drop_token(t)) continue;
    if (!joined.empty()) joined += ' ';
    joined += t;
  }

  std::string out;
  out.reserve(joined.size());
  bool pending_space = false;
  size_t i = 0;
  while (i < joined.size()) {
    size_t start = i, len = 0;
    uint32_t cp = decode_utf8(joined, i, len);
    if (cp == ' ') {
      pending_space = true;
      continue;
    }
    if (cp < 0x80) {
      char c = static_cast<char>(cp);
      bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
      if (!alnum) continue;  // ASCII punctuation, symbols, controls
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    } else {
      if (cp == 0xFFFD && len == 1) continue;  // invalid byte
      if (is_unicode_punct(cp)) continue;
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out.append(joined, start, len);
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view cleaned) {
  return util::split_whitespace(cleaned);
}

StopwordSet::StopwordSet(std::vector<std::string> words) {
  for (auto& w : words) words_.insert(std::move(w));
}

StopwordSet StopwordSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword file: " + path.string());
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view sv = util::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    set.words_.insert(util::to_lower_ascii(sv));
  }
  if (set.words_.empty())
    throw std::runtime_error("stopword file has no entries: " + path.string());
  return set;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordSet& stop) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!stop.contains(t)) out.push_back(t);
  return out;
}

std::string canonical_text(std::string_view raw, const StopwordSet& stop) {
  std::vector<std::string> tokens = remove_stopwords(tokenize(clean_tweet(raw)), stop);
  return util::join(tokens, " ");
}

}  // namespace hategraph::preprocess
