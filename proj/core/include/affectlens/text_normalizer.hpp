#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affectlens/timeparse.hpp"

namespace affectlens {

struct RawTweet {
  std::string id;
  EpochSeconds created_at = 0;
  std::string text;
};

struct CleanTweet {
  std::string id;
  EpochSeconds created_at = 0;
  std::string text;
  std::vector<std::string> tokens;
};

enum class RewriteKind { emoticon, emoji, slang, contraction };

// Pattern -> replacement phrase table, loaded from a TSV file. Matching is
// longest-pattern-first, single left-to-right pass, ASCII-case-insensitive.
// Patterns that start or end with an alphanumeric only match on a token
// boundary, so "CUL8R" rewrites as a whole word while ":-)" matches anywhere.
class RewriteTable {
 public:
  RewriteTable() = default;
  RewriteTable(RewriteKind kind,
               std::vector<std::pair<std::string, std::string>> entries);

  // TSV: "pattern<TAB>replacement" per line, '#'-prefixed comments ignored.
  static RewriteTable load(const std::string& path, RewriteKind kind);

  RewriteKind kind() const { return kind_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  std::string apply(std::string_view text) const;

 private:
  RewriteKind kind_ = RewriteKind::slang;
  std::vector<std::pair<std::string, std::string>> entries_;
  // Entry indices ordered by descending pattern length, grouped by the
  // case-folded first byte of the pattern.
  std::vector<std::vector<std::size_t>> by_first_byte_;
};

struct RewriteTables {
  RewriteTable emoticons;
  RewriteTable emoji;
  RewriteTable slang;
  RewriteTable contractions;

  // Loads emoticons.tsv, emoji.tsv, slang.tsv, contractions.tsv from dir.
  static RewriteTables load_dir(const std::string& dir);
};

// Drops @-mentions, URL tokens (http://, https://, www., t.co/...) and
// standalone case-sensitive "RT" tokens.
std::string strip_entities(std::string_view text);

// "#word" -> "word"; a bare "#" disappears.
std::string dehash(std::string_view text);

std::string rewrite_tokens(std::string_view text, const RewriteTable& table);

// Removes punctuation and symbol/emoji codepoints, folds whitespace runs to
// single spaces, trims, and lowercases ASCII letters. Non-ASCII letters
// survive.
std::string strip_noise(std::string_view text);

// Full cascade: strip_entities, dehash, emoticon/emoji/slang/contraction
// rewrites, strip_noise. An all-noise tweet comes out with empty tokens.
CleanTweet normalize(const RawTweet& raw, const RewriteTables& tables);

}  // namespace affectlens
