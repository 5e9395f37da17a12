#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "affectlens/taxonomy.hpp"
#include "affectlens/timeparse.hpp"

namespace affectlens {

struct LabeledTweet {
  std::string id;
  EpochSeconds created_at = 0;
  std::vector<std::uint8_t> bits;
};

// Projection onto a label subset, e.g. dropping "surprise" and
// "official report" before the trend analysis.
class LabelFilter {
 public:
  static LabelFilter make(const EmotionTaxonomy& taxonomy,
                          const std::vector<std::string>& drop);

  const std::vector<std::string>& labels() const { return labels_; }
  std::vector<std::uint8_t> apply(const std::vector<std::uint8_t>& bits) const;

 private:
  std::vector<std::size_t> keep_;
  std::vector<std::string> labels_;
};

struct TrendWindow {
  EpochSeconds start = 0;
  EpochSeconds end = 0;  // exclusive
  std::size_t tweet_count = 0;
  std::vector<double> shares;  // empty when the window has no tweets
};

struct TrendSeries {
  std::vector<std::string> emotions;
  std::vector<TrendWindow> windows;
};

struct Bin {
  std::size_t start_index = 0;  // position in chronological order
  std::size_t tweet_count = 0;
  std::vector<std::size_t> counts;
};

struct BinSeries {
  std::vector<std::string> emotions;
  std::vector<Bin> bins;
};

// Consecutive windows of window_seconds from origin up to the last tweet.
// share(e, w) = |{t in w : bits[e]}| / |{t in w}|; empty windows are kept
// with count 0. Requires origin <= every timestamp.
TrendSeries weekly_distribution(const std::vector<LabeledTweet>& tweets,
                                const std::vector<std::string>& emotions,
                                EpochSeconds origin,
                                EpochSeconds window_seconds = 7 * 86400);

// Chronological chunks of exactly bin_size tweets (ties broken by id);
// the final partial chunk is kept.
BinSeries fixed_count_bins(const std::vector<LabeledTweet>& tweets,
                           const std::vector<std::string>& emotions,
                           std::size_t bin_size = 5000);

// window_start,window_end,n,<one share column per emotion>
void write_trends_csv(std::ostream& os, const TrendSeries& series,
                      std::uint64_t seed);

// bin_index,n,<one count column per emotion>
void write_bins_csv(std::ostream& os, const BinSeries& series,
                    std::uint64_t seed);

}  // namespace affectlens
