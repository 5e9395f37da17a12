#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace affectlens {

struct EvalPair {
  std::vector<std::uint8_t> gold;
  std::vector<std::uint8_t> pred;
  std::vector<double> scores;  // empty when unavailable; required for LRAP
};

struct EvalReport {
  double jaccard = 0.0;
  double f1_macro = 0.0;
  double f1_micro = 0.0;
  double weak_accuracy = 0.0;
  double lrap = 0.0;
  double hamming = 0.0;
};

// Mean per-sample |gold ∩ pred| / |gold ∪ pred|; 1 when both sets are empty.
double jaccard_accuracy(const std::vector<EvalPair>& pairs);

// Unweighted mean of per-label F1; a label with no gold or predicted
// positives contributes 0.
double f1_macro(const std::vector<EvalPair>& pairs);

// F1 over pooled TP/FP/FN.
double f1_micro(const std::vector<EvalPair>& pairs);

// Fraction of label bits where pred != gold, over all samples x labels.
double hamming_loss(const std::vector<EvalPair>& pairs);

// Exactly 1 - hamming_loss.
double weak_accuracy(const std::vector<EvalPair>& pairs);

// Label ranking average precision. Ties share the best rank among them
// (rank = 1 + count of strictly higher scores); samples without true labels
// contribute 1.
double lrap(const std::vector<EvalPair>& pairs);

EvalReport evaluate(const std::vector<EvalPair>& pairs);

// Aligned, human-readable table.
std::string report_text(const EvalReport& report);

// One "metric,value" row per metric, preceded by a '#' manifest line.
void write_report_csv(std::ostream& os, const EvalReport& report,
                      std::uint64_t seed);

}  // namespace affectlens
