#include "affectlens/trend_engine.hpp"

#include <algorithm>

#include "affectlens/csv.hpp"
#include "affectlens/error.hpp"

namespace affectlens {

LabelFilter LabelFilter::make(const EmotionTaxonomy& taxonomy,
                              const std::vector<std::string>& drop) {
  LabelFilter filter;
  for (const auto& name : drop) {
    if (!taxonomy.index_of(name)) {
      throw Error("E_UNKNOWN_LABEL",
                  "label '" + name + "' is not in taxonomy " + taxonomy.name);
    }
  }
  for (std::size_t i = 0; i < taxonomy.size(); ++i) {
    const auto& label = taxonomy.labels[i];
    if (std::find(drop.begin(), drop.end(), label) == drop.end()) {
      filter.keep_.push_back(i);
      filter.labels_.push_back(label);
    }
  }
  if (filter.keep_.empty()) {
    throw Error("E_EMPTY", "label filter would drop every label");
  }
  return filter;
}

std::vector<std::uint8_t> LabelFilter::apply(
    const std::vector<std::uint8_t>& bits) const {
  std::vector<std::uint8_t> out(keep_.size(), 0);
  for (std::size_t i = 0; i < keep_.size(); ++i) out[i] = bits.at(keep_[i]);
  return out;
}

TrendSeries weekly_distribution(const std::vector<LabeledTweet>& tweets,
                                const std::vector<std::string>& emotions,
                                EpochSeconds origin,
                                EpochSeconds window_seconds) {
  if (window_seconds <= 0) throw Error("E_CONFIG", "window must be positive");
  TrendSeries series;
  series.emotions = emotions;
  if (tweets.empty()) return series;

  EpochSeconds last = tweets.front().created_at;
  for (const auto& t : tweets) {
    if (t.created_at < origin) {
      throw Error("E_RANGE", "tweet " + t.id + " precedes the analysis origin");
    }
    last = std::max(last, t.created_at);
  }
  const std::size_t window_count =
      static_cast<std::size_t>((last - origin) / window_seconds) + 1;

  std::vector<std::size_t> totals(window_count, 0);
  std::vector<std::vector<std::size_t>> hits(
      window_count, std::vector<std::size_t>(emotions.size(), 0));
  for (const auto& t : tweets) {
    const auto w = static_cast<std::size_t>((t.created_at - origin) / window_seconds);
    ++totals[w];
    for (std::size_t e = 0; e < emotions.size(); ++e) {
      if (e < t.bits.size() && t.bits[e]) ++hits[w][e];
    }
  }

  series.windows.reserve(window_count);
  for (std::size_t w = 0; w < window_count; ++w) {
    TrendWindow window;
    window.start = origin + static_cast<EpochSeconds>(w) * window_seconds;
    window.end = window.start + window_seconds;
    window.tweet_count = totals[w];
    if (totals[w] > 0) {
      window.shares.resize(emotions.size());
      for (std::size_t e = 0; e < emotions.size(); ++e) {
        window.shares[e] = static_cast<double>(hits[w][e]) /
                           static_cast<double>(totals[w]);
      }
    }
    series.windows.push_back(std::move(window));
  }
  return series;
}

BinSeries fixed_count_bins(const std::vector<LabeledTweet>& tweets,
                           const std::vector<std::string>& emotions,
                           std::size_t bin_size) {
  if (bin_size == 0) throw Error("E_CONFIG", "bin size must be >= 1");
  BinSeries series;
  series.emotions = emotions;

  std::vector<const LabeledTweet*> sorted;
  sorted.reserve(tweets.size());
  for (const auto& t : tweets) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledTweet* a, const LabeledTweet* b) {
              if (a->created_at != b->created_at) {
                return a->created_at < b->created_at;
              }
              return a->id < b->id;
            });

  for (std::size_t start = 0; start < sorted.size(); start += bin_size) {
    const std::size_t end = std::min(sorted.size(), start + bin_size);
    Bin bin;
    bin.start_index = start;
    bin.tweet_count = end - start;
    bin.counts.assign(emotions.size(), 0);
    for (std::size_t i = start; i < end; ++i) {
      for (std::size_t e = 0; e < emotions.size(); ++e) {
        if (e < sorted[i]->bits.size() && sorted[i]->bits[e]) ++bin.counts[e];
      }
    }
    series.bins.push_back(std::move(bin));
  }
  return series;
}

void write_trends_csv(std::ostream& os, const TrendSeries& series,
                      std::uint64_t seed) {
  os << "# affectlens trends v1 seed=" << seed << "\n";
  std::vector<std::string> header = {"window_start", "window_end", "n"};
  for (const auto& e : series.emotions) header.push_back(e);
  csv::write_row(os, header);
  for (const auto& w : series.windows) {
    std::vector<std::string> row = {format_iso8601(w.start),
                                    format_iso8601(w.end),
                                    std::to_string(w.tweet_count)};
    for (std::size_t e = 0; e < series.emotions.size(); ++e) {
      row.push_back(w.shares.empty() ? std::string()
                                     : csv::format_double(w.shares[e]));
    }
    csv::write_row(os, row);
  }
}

void write_bins_csv(std::ostream& os, const BinSeries& series,
                    std::uint64_t seed) {
  os << "# affectlens bins v1 seed=" << seed << "\n";
  std::vector<std::string> header = {"bin_index", "n"};
  for (const auto& e : series.emotions) header.push_back(e);
  csv::write_row(os, header);
  for (std::size_t i = 0; i < series.bins.size(); ++i) {
    const auto& bin = series.bins[i];
    std::vector<std::string> row = {std::to_string(i),
                                    std::to_string(bin.tweet_count)};
    for (std::size_t c : bin.counts) row.push_back(std::to_string(c));
    csv::write_row(os, row);
  }
}

}  // namespace affectlens
