#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace affectlens {

// Normalized per-category match counts; entry c lives in [0,1].
using FeatureVector = std::vector<double>;

// Category -> word list lexicon. Category order is the file's key order and
// defines the feature dimension; a word may sit in several categories.
class AffectLexicon {
 public:
  static AffectLexicon load(const std::string& path);

  std::size_t dimension() const { return categories_.size(); }
  const std::vector<std::string>& categories() const { return categories_; }

  // Categories containing the (lowercase) term; empty when none do.
  const std::vector<std::size_t>* categories_of(const std::string& term) const;

 private:
  std::vector<std::string> categories_;
  std::unordered_map<std::string, std::vector<std::size_t>> term_index_;
};

// values[c] = |{tokens in category c}| / max(1, |tokens|).
FeatureVector featurize(const std::vector<std::string>& tokens,
                        const AffectLexicon& lex);

}  // namespace affectlens
