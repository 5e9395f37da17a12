#include "affectlens/embedding_store.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "affectlens/csv.hpp"
#include "affectlens/error.hpp"

namespace affectlens {

namespace {

// Splits on runs of spaces/tabs. First field is the key, the rest parse as
// doubles.
bool parse_vector_line(const std::string& line, std::string& key,
                       std::vector<double>& values) {
  values.clear();
  std::size_t i = 0;
  const auto skip_ws = [&] {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  };
  skip_ws();
  std::size_t start = i;
  while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
  if (i == start) return false;
  key = line.substr(start, i - start);
  while (true) {
    skip_ws();
    if (i >= line.size()) break;
    double v = 0.0;
    const auto r = std::from_chars(line.data() + i, line.data() + line.size(), v);
    if (r.ec != std::errc()) return false;
    i = static_cast<std::size_t>(r.ptr - line.data());
    if (i < line.size() && line[i] != ' ' && line[i] != '\t') return false;
    values.push_back(v);
  }
  return !values.empty();
}

void write_vector_line(std::ostream& os, const std::string& key,
                       const std::vector<double>& values) {
  os << key;
  for (double v : values) os << ' ' << csv::format_double(v);
  os << '\n';
}

}  // namespace

EmbeddingTable EmbeddingTable::load(const std::string& path, UnkPolicy policy) {
  std::ifstream in(path);
  if (!in) throw Error("E_IO", "cannot open embeddings: " + path);

  EmbeddingTable table;
  table.policy_ = policy;
  std::string line;
  std::size_t lineno = 0;
  std::string token;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!parse_vector_line(line, token, values)) {
      throw Error("E_PARSE", path + ":" + std::to_string(lineno) +
                                 ": expected \"token v1 ... vd\"");
    }
    if (table.dim_ == 0) {
      table.dim_ = values.size();
    } else if (values.size() != table.dim_) {
      throw Error("E_DIMENSION",
                  path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(table.dim_) + " values, got " +
                      std::to_string(values.size()));
    }
    const auto [it, inserted] = table.vectors_.emplace(token, values);
    if (!inserted) {
      throw Error("E_DUPLICATE_TOKEN", path + ":" + std::to_string(lineno) +
                                           ": duplicate token: " + token);
    }
    table.order_.push_back(token);
  }
  if (table.dim_ == 0) throw Error("E_PARSE", path + ": empty embedding file");

  table.zero_.assign(table.dim_, 0.0);
  table.mean_.assign(table.dim_, 0.0);
  for (const auto& [_, vec] : table.vectors_) {
    for (std::size_t d = 0; d < table.dim_; ++d) table.mean_[d] += vec[d];
  }
  for (double& v : table.mean_) v /= static_cast<double>(table.vectors_.size());
  return table;
}

const std::vector<double>& EmbeddingTable::lookup(const std::string& token) const {
  const auto it = vectors_.find(token);
  if (it != vectors_.end()) return it->second;
  return policy_ == UnkPolicy::mean ? mean_ : zero_;
}

void EmbeddingTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("E_IO", "cannot write embeddings: " + path);
  for (const auto& token : order_) {
    write_vector_line(out, token, vectors_.at(token));
  }
}

SentenceVectorStore SentenceVectorStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("E_IO", "cannot open sentence vectors: " + path);

  SentenceVectorStore store;
  std::string line;
  std::size_t lineno = 0;
  std::string id;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!parse_vector_line(line, id, values)) {
      throw Error("E_PARSE", path + ":" + std::to_string(lineno) +
                                 ": expected \"id v1 ... vd\"");
    }
    if (store.dim == 0) {
      store.dim = values.size();
    } else if (values.size() != store.dim) {
      throw Error("E_DIMENSION",
                  path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(store.dim) + " values, got " +
                      std::to_string(values.size()));
    }
    const auto [it, inserted] = store.by_id.emplace(id, values);
    if (!inserted) {
      throw Error("E_DUPLICATE_ID", path + ":" + std::to_string(lineno) +
                                        ": duplicate id: " + id);
    }
  }
  if (store.dim == 0) throw Error("E_PARSE", path + ": empty sentence-vector file");
  return store;
}

void SentenceVectorStore::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("E_IO", "cannot write sentence vectors: " + path);
  std::vector<const std::string*> ids;
  ids.reserve(by_id.size());
  for (const auto& [id, _] : by_id) ids.push_back(&id);
  std::sort(ids.begin(), ids.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  for (const auto* id : ids) write_vector_line(out, *id, by_id.at(*id));
}

}  // namespace affectlens
