#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace affectlens {

// A fixed, ordered emotion label set. Label order defines bit positions
// everywhere downstream, so it never changes after registration.
struct EmotionTaxonomy {
  std::string name;
  std::vector<std::string> labels;

  std::size_t size() const { return labels.size(); }
  std::optional<std::size_t> index_of(std::string_view label) const;
};

// Boolean mask over one taxonomy, in taxonomy label order.
struct LabelVector {
  std::string taxonomy;
  std::vector<std::uint8_t> bits;
};

// anger .. trust; "neutral" is the all-zero vector, not a 12th label.
const EmotionTaxonomy& ait11();

// The ten SenWave emotions plus the extra "surprise" annotation.
const EmotionTaxonomy& senwave11();

const EmotionTaxonomy* find_taxonomy(std::string_view name);

// Smallest registered taxonomy whose label set covers every given name;
// nullptr when none does.
const EmotionTaxonomy* detect_taxonomy(const std::vector<std::string>& labels);

}  // namespace affectlens
