#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace affectlens {

enum class UnkPolicy { zero, mean };

// Static word vectors in GloVe text convention: "token v1 ... vd" per line.
class EmbeddingTable {
 public:
  static EmbeddingTable load(const std::string& path,
                             UnkPolicy policy = UnkPolicy::zero);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  UnkPolicy unk_policy() const { return policy_; }
  void set_unk_policy(UnkPolicy p) { policy_ = p; }

  bool contains(const std::string& token) const {
    return vectors_.count(token) != 0;
  }

  // Total: OOV tokens resolve to the zero vector or the corpus mean.
  const std::vector<double>& lookup(const std::string& token) const;

  const std::unordered_map<std::string, std::vector<double>>& vectors() const {
    return vectors_;
  }

  void save(const std::string& path) const;

 private:
  std::size_t dim_ = 0;
  UnkPolicy policy_ = UnkPolicy::zero;
  std::unordered_map<std::string, std::vector<double>> vectors_;
  std::vector<double> zero_;
  std::vector<double> mean_;
  std::vector<std::string> order_;  // file order, for byte-stable save
};

// Precomputed per-tweet encoder output: "id v1 ... vd" per line.
struct SentenceVectorStore {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> by_id;

  static SentenceVectorStore load(const std::string& path);
  void save(const std::string& path) const;

  const std::vector<double>* find(const std::string& id) const {
    const auto it = by_id.find(id);
    return it == by_id.end() ? nullptr : &it->second;
  }
};

}  // namespace affectlens
