#include "affectlens/text_normalizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "affectlens/error.hpp"
#include "affectlens/utf8.hpp"

namespace affectlens {

namespace {

unsigned char fold(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 'A' && u <= 'Z') ? static_cast<unsigned char>(u + 32) : u;
}

bool ascii_alnum(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') ||
         (u >= '0' && u <= '9');
}

bool ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\v';
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && ascii_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !ascii_space(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string join(const std::vector<std::string_view>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out.append(tokens[i]);
  }
  return out;
}

bool starts_with_fold(std::string_view token, std::string_view prefix) {
  if (token.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (fold(token[i]) != fold(prefix[i])) return false;
  }
  return true;
}

bool is_url_token(std::string_view token) {
  if (starts_with_fold(token, "http://") || starts_with_fold(token, "https://") ||
      starts_with_fold(token, "www.")) {
    return true;
  }
  // t.co shortlinks often appear with the scheme already stripped.
  return token.find("t.co/") != std::string_view::npos;
}

// Whitespace-class codepoints beyond ASCII.
bool is_space_cp(char32_t cp) {
  return cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 ||
         cp == 0x2029 || cp == 0x205F || cp == 0x3000;
}

// Punctuation, symbol and emoji codepoints the final strip pass deletes.
// Non-ASCII letters deliberately fall outside every range here.
bool is_removable_cp(char32_t cp) {
  if (cp < 0x80) return false;  // ASCII handled separately
  return (cp >= 0x00A1 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7 ||
         (cp >= 0x0609 && cp <= 0x060D) || cp == 0x061B || cp == 0x061E ||
         cp == 0x061F || (cp >= 0x066A && cp <= 0x066D) || cp == 0x06D4 ||
         cp == 0x0964 || cp == 0x0965 ||
         (cp >= 0x2000 && cp <= 0x206F) || (cp >= 0x20A0 && cp <= 0x20CF) ||
         (cp >= 0x2100 && cp <= 0x2BFF) || (cp >= 0x2E00 && cp <= 0x2E7F) ||
         (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFE00 && cp <= 0xFE0F) ||
         (cp >= 0xFE30 && cp <= 0xFE6F) || (cp >= 0xFF01 && cp <= 0xFF0F) ||
         (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
         (cp >= 0xFF5B && cp <= 0xFF65) || (cp >= 0xFFE0 && cp <= 0xFFEE) ||
         cp == 0xFEFF || cp == 0xFFFD ||
         (cp >= 0x1F000 && cp <= 0x1FFFF) || (cp >= 0xE0000 && cp <= 0xE007F);
}

const char* kind_file(RewriteKind kind) {
  switch (kind) {
    case RewriteKind::emoticon: return "emoticons.tsv";
    case RewriteKind::emoji: return "emoji.tsv";
    case RewriteKind::slang: return "slang.tsv";
    case RewriteKind::contraction: return "contractions.tsv";
  }
  return "";
}

}  // namespace

RewriteTable::RewriteTable(
    RewriteKind kind, std::vector<std::pair<std::string, std::string>> entries)
    : kind_(kind), entries_(std::move(entries)), by_first_byte_(256) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const std::string& pat = entries_[i].first;
    if (pat.empty()) {
      throw Error("E_TABLE", "rewrite table entry has an empty pattern");
    }
    std::string folded;
    folded.reserve(pat.size());
    for (char c : pat) folded.push_back(static_cast<char>(fold(c)));
    if (!seen.insert(folded).second) {
      throw Error("E_TABLE", "duplicate rewrite pattern: " + pat);
    }
    by_first_byte_[fold(pat[0])].push_back(i);
  }
  for (auto& bucket : by_first_byte_) {
    std::stable_sort(bucket.begin(), bucket.end(),
                     [this](std::size_t a, std::size_t b) {
                       return entries_[a].first.size() >
                              entries_[b].first.size();
                     });
  }
}

RewriteTable RewriteTable::load(const std::string& path, RewriteKind kind) {
  std::ifstream in(path);
  if (!in) throw Error("E_IO", "cannot open rewrite table: " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("E_PARSE", path + ":" + std::to_string(lineno) +
                                  ": expected pattern<TAB>replacement");
    }
    std::string pattern = line.substr(0, tab);
    std::string replacement = line.substr(tab + 1);
    // Replacements must survive strip_noise untouched (spaces aside),
    // otherwise the cascade would destroy what a rewrite just produced.
    std::size_t i = 0;
    while (i < replacement.size()) {
      const char c = replacement[i];
      if (static_cast<unsigned char>(c) < 0x80) {
        if (!ascii_alnum(c) && c != ' ') {
          throw Error("E_PARSE", path + ":" + std::to_string(lineno) +
                                      ": replacement contains a character the "
                                      "strip pass removes");
        }
        ++i;
      } else {
        const char32_t cp = utf8::decode(replacement, i);
        if (is_removable_cp(cp) || is_space_cp(cp)) {
          throw Error("E_PARSE", path + ":" + std::to_string(lineno) +
                                      ": replacement contains a character the "
                                      "strip pass removes");
        }
      }
    }
    entries.emplace_back(std::move(pattern), std::move(replacement));
  }
  return RewriteTable(kind, std::move(entries));
}

std::string RewriteTable::apply(std::string_view text) const {
  if (entries_.empty()) return std::string(text);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool matched = false;
    for (std::size_t idx : by_first_byte_[fold(text[i])]) {
      const auto& [pat, rep] = entries_[idx];
      if (i + pat.size() > text.size()) continue;
      bool eq = true;
      for (std::size_t k = 0; k < pat.size(); ++k) {
        if (fold(text[i + k]) != fold(pat[k])) {
          eq = false;
          break;
        }
      }
      if (!eq) continue;
      // Alphanumeric pattern edges only match on token boundaries.
      if (ascii_alnum(pat.front()) && i > 0 && ascii_alnum(text[i - 1])) {
        continue;
      }
      const std::size_t end = i + pat.size();
      if (ascii_alnum(pat.back()) && end < text.size() &&
          ascii_alnum(text[end])) {
        continue;
      }
      out += rep;
      i = end;
      matched = true;
      break;
    }
    if (!matched) {
      out.push_back(text[i]);
      ++i;
    }
  }
  return out;
}

RewriteTables RewriteTables::load_dir(const std::string& dir) {
  auto path = [&](RewriteKind k) { return dir + "/" + kind_file(k); };
  RewriteTables t;
  t.emoticons = RewriteTable::load(path(RewriteKind::emoticon), RewriteKind::emoticon);
  t.emoji = RewriteTable::load(path(RewriteKind::emoji), RewriteKind::emoji);
  t.slang = RewriteTable::load(path(RewriteKind::slang), RewriteKind::slang);
  t.contractions =
      RewriteTable::load(path(RewriteKind::contraction), RewriteKind::contraction);
  return t;
}

std::string strip_entities(std::string_view text) {
  std::vector<std::string_view> kept;
  for (std::string_view token : split_ws(text)) {
    if (token.front() == '@') continue;
    if (token == "RT") continue;
    if (is_url_token(token)) continue;
    kept.push_back(token);
  }
  return join(kept);
}

std::string dehash(std::string_view text) {
  std::vector<std::string_view> kept;
  for (std::string_view token : split_ws(text)) {
    while (!token.empty() && token.front() == '#') token.remove_prefix(1);
    if (!token.empty()) kept.push_back(token);
  }
  return join(kept);
}

std::string rewrite_tokens(std::string_view text, const RewriteTable& table) {
  return table.apply(text);
}

std::string strip_noise(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b = static_cast<unsigned char>(text[i]);
    if (b < 0x80) {
      ++i;
      if (ascii_space(static_cast<char>(b))) {
        pending_space = true;
      } else if (ascii_alnum(static_cast<char>(b))) {
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(fold(static_cast<char>(b))));
      }
      // other ASCII is punctuation or control: dropped
    } else {
      const char32_t cp = utf8::decode(text, i);
      if (is_space_cp(cp)) {
        pending_space = true;
      } else if (!is_removable_cp(cp)) {
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        utf8::encode(cp, out);
      }
    }
  }
  return out;
}

CleanTweet normalize(const RawTweet& raw, const RewriteTables& tables) {
  std::string text = strip_entities(raw.text);
  text = dehash(text);
  text = tables.emoticons.apply(text);
  text = tables.emoji.apply(text);
  text = tables.slang.apply(text);
  text = tables.contractions.apply(text);
  text = strip_noise(text);

  CleanTweet clean;
  clean.id = raw.id;
  clean.created_at = raw.created_at;
  clean.text = std::move(text);
  for (std::string_view token : split_ws(clean.text)) {
    clean.tokens.emplace_back(token);
  }
  return clean;
}

}  // namespace affectlens
