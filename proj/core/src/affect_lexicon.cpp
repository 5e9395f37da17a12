#include "affectlens/affect_lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "affectlens/error.hpp"

namespace affectlens {

namespace {

std::string ascii_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : static_cast<char>(c);
  });
  return s;
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(),
                            text.begin() + static_cast<std::ptrdiff_t>(
                                               std::min(byte, text.size())),
                            '\n'));
}

}  // namespace

AffectLexicon AffectLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("E_IO", "cannot open lexicon: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  // The parser callback sees keys in file order, which both preserves the
  // category order contract and exposes duplicates the object would merge.
  std::vector<std::string> keys;
  auto cb = [&](int depth, nlohmann::json::parse_event_t event,
                nlohmann::json& parsed) {
    if (depth == 1 && event == nlohmann::json::parse_event_t::key) {
      keys.push_back(parsed.get<std::string>());
    }
    return true;
  };
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text, cb);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("E_PARSE", path + ":" +
                               std::to_string(line_of_byte(text, e.byte)) +
                               ": " + e.what());
  }
  if (!doc.is_object()) {
    throw Error("E_PARSE", path + ": lexicon root must be a JSON object");
  }

  AffectLexicon lex;
  std::unordered_set<std::string> seen;
  for (const auto& key : keys) {
    if (!seen.insert(key).second) {
      throw Error("E_DUPLICATE_CATEGORY", path + ": duplicate category: " + key);
    }
    const auto& terms = doc.at(key);
    if (!terms.is_array()) {
      throw Error("E_PARSE", path + ": category '" + key +
                                 "' must map to an array of terms");
    }
    const std::size_t index = lex.categories_.size();
    lex.categories_.push_back(key);
    for (const auto& t : terms) {
      if (!t.is_string()) {
        throw Error("E_PARSE", path + ": category '" + key +
                                   "' contains a non-string term");
      }
      const std::string term = ascii_lower(t.get<std::string>());
      auto& cats = lex.term_index_[term];
      if (cats.empty() || cats.back() != index) cats.push_back(index);
    }
  }
  if (lex.categories_.empty()) {
    throw Error("E_PARSE", path + ": lexicon has no categories");
  }
  return lex;
}

const std::vector<std::size_t>* AffectLexicon::categories_of(
    const std::string& term) const {
  const auto it = term_index_.find(term);
  return it == term_index_.end() ? nullptr : &it->second;
}

FeatureVector featurize(const std::vector<std::string>& tokens,
                        const AffectLexicon& lex) {
  FeatureVector values(lex.dimension(), 0.0);
  for (const auto& token : tokens) {
    if (const auto* cats = lex.categories_of(token)) {
      for (std::size_t c : *cats) values[c] += 1.0;
    }
  }
  const double denom = static_cast<double>(std::max<std::size_t>(1, tokens.size()));
  for (double& v : values) v /= denom;
  return values;
}

}  // namespace affectlens
