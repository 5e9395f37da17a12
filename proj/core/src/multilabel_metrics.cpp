#include "affectlens/multilabel_metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "affectlens/csv.hpp"
#include "affectlens/error.hpp"

namespace affectlens {

namespace {

void require_pairs(const std::vector<EvalPair>& pairs) {
  if (pairs.empty()) throw Error("E_EMPTY", "no evaluation pairs");
  for (const auto& p : pairs) {
    if (p.gold.size() != p.pred.size()) {
      throw Error("E_DIMENSION", "gold/pred label count mismatch");
    }
  }
}

}  // namespace

double jaccard_accuracy(const std::vector<EvalPair>& pairs) {
  require_pairs(pairs);
  double sum = 0.0;
  for (const auto& p : pairs) {
    std::size_t inter = 0, uni = 0;
    for (std::size_t l = 0; l < p.gold.size(); ++l) {
      inter += (p.gold[l] && p.pred[l]) ? 1 : 0;
      uni += (p.gold[l] || p.pred[l]) ? 1 : 0;
    }
    sum += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
  return sum / static_cast<double>(pairs.size());
}

double f1_macro(const std::vector<EvalPair>& pairs) {
  require_pairs(pairs);
  const std::size_t labels = pairs.front().gold.size();
  double sum = 0.0;
  for (std::size_t l = 0; l < labels; ++l) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& p : pairs) {
      if (p.pred[l] && p.gold[l]) ++tp;
      if (p.pred[l] && !p.gold[l]) ++fp;
      if (!p.pred[l] && p.gold[l]) ++fn;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    sum += denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
  }
  return sum / static_cast<double>(labels);
}

double f1_micro(const std::vector<EvalPair>& pairs) {
  require_pairs(pairs);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& p : pairs) {
    for (std::size_t l = 0; l < p.gold.size(); ++l) {
      if (p.pred[l] && p.gold[l]) ++tp;
      if (p.pred[l] && !p.gold[l]) ++fp;
      if (!p.pred[l] && p.gold[l]) ++fn;
    }
  }
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
}

double hamming_loss(const std::vector<EvalPair>& pairs) {
  require_pairs(pairs);
  std::size_t wrong = 0, total = 0;
  for (const auto& p : pairs) {
    for (std::size_t l = 0; l < p.gold.size(); ++l) {
      wrong += (p.gold[l] != p.pred[l]) ? 1 : 0;
    }
    total += p.gold.size();
  }
  return static_cast<double>(wrong) / static_cast<double>(total);
}

double weak_accuracy(const std::vector<EvalPair>& pairs) {
  // Complement identity holds exactly, never re-derived from counts.
  return 1.0 - hamming_loss(pairs);
}

double lrap(const std::vector<EvalPair>& pairs) {
  require_pairs(pairs);
  double sum = 0.0;
  for (const auto& p : pairs) {
    if (p.scores.size() != p.gold.size()) {
      throw Error("E_MISSING_SCORES", "LRAP needs one score per label");
    }
    const std::size_t labels = p.gold.size();
    const std::size_t true_count =
        static_cast<std::size_t>(std::count(p.gold.begin(), p.gold.end(), 1));
    if (true_count == 0) {
      sum += 1.0;
      continue;
    }
    // Sort once by descending score; tied labels share the best rank in
    // the run, i.e. rank = 1 + count of strictly higher scores.
    std::vector<std::size_t> order(labels);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return p.scores[a] > p.scores[b];
    });
    std::vector<std::size_t> rank(labels, 0);
    std::size_t i = 0;
    while (i < labels) {
      std::size_t j = i;
      while (j < labels && p.scores[order[j]] == p.scores[order[i]]) ++j;
      for (std::size_t k = i; k < j; ++k) rank[order[k]] = i + 1;
      i = j;
    }
    double sample = 0.0;
    for (std::size_t l = 0; l < labels; ++l) {
      if (!p.gold[l]) continue;
      std::size_t true_at_or_above = 0;
      for (std::size_t k = 0; k < labels; ++k) {
        if (p.gold[k] && rank[k] <= rank[l]) ++true_at_or_above;
      }
      sample += static_cast<double>(true_at_or_above) /
                static_cast<double>(rank[l]);
    }
    sum += sample / static_cast<double>(true_count);
  }
  return sum / static_cast<double>(pairs.size());
}

EvalReport evaluate(const std::vector<EvalPair>& pairs) {
  EvalReport r;
  r.jaccard = jaccard_accuracy(pairs);
  r.f1_macro = f1_macro(pairs);
  r.f1_micro = f1_micro(pairs);
  r.hamming = hamming_loss(pairs);
  r.weak_accuracy = 1.0 - r.hamming;
  r.lrap = lrap(pairs);
  return r;
}

std::string report_text(const EvalReport& report) {
  std::ostringstream os;
  const auto row = [&](const char* name, double v) {
    os << name;
    for (std::size_t i = std::string(name).size(); i < 16; ++i) os.put(' ');
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    os << buf << '\n';
  };
  row("jaccard", report.jaccard);
  row("f1_macro", report.f1_macro);
  row("f1_micro", report.f1_micro);
  row("weak_accuracy", report.weak_accuracy);
  row("lrap", report.lrap);
  row("hamming", report.hamming);
  return os.str();
}

void write_report_csv(std::ostream& os, const EvalReport& report,
                      std::uint64_t seed) {
  os << "# affectlens report v1 seed=" << seed << "\n";
  csv::write_row(os, {"metric", "value"});
  csv::write_row(os, {"jaccard", csv::format_double(report.jaccard)});
  csv::write_row(os, {"f1_macro", csv::format_double(report.f1_macro)});
  csv::write_row(os, {"f1_micro", csv::format_double(report.f1_micro)});
  csv::write_row(os, {"weak_accuracy", csv::format_double(report.weak_accuracy)});
  csv::write_row(os, {"lrap", csv::format_double(report.lrap)});
  csv::write_row(os, {"hamming", csv::format_double(report.hamming)});
}

}  // namespace affectlens
