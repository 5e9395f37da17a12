#include "affectlens/taxonomy.hpp"

#include <algorithm>
#include <array>

namespace affectlens {

std::optional<std::size_t> EmotionTaxonomy::index_of(
    std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  return std::nullopt;
}

const EmotionTaxonomy& ait11() {
  static const EmotionTaxonomy t{
      "ait11",
      {"anger", "anticipation", "disgust", "fear", "joy", "love", "optimism",
       "pessimism", "sadness", "surprise", "trust"}};
  return t;
}

const EmotionTaxonomy& senwave11() {
  static const EmotionTaxonomy t{
      "senwave11",
      {"optimistic", "thankful", "empathetic", "pessimistic", "anxious", "sad",
       "annoyed", "denial", "official report", "joking", "surprise"}};
  return t;
}

namespace {
const std::array<const EmotionTaxonomy*, 2> kRegistry = {&ait11(),
                                                         &senwave11()};
}

const EmotionTaxonomy* find_taxonomy(std::string_view name) {
  for (const auto* t : kRegistry) {
    if (t->name == name) return t;
  }
  return nullptr;
}

const EmotionTaxonomy* detect_taxonomy(const std::vector<std::string>& labels) {
  const EmotionTaxonomy* best = nullptr;
  for (const auto* t : kRegistry) {
    const bool covers = std::all_of(
        labels.begin(), labels.end(),
        [&](const std::string& l) { return t->index_of(l).has_value(); });
    if (covers && (!best || t->size() < best->size())) best = t;
  }
  return best;
}

}  // namespace affectlens
