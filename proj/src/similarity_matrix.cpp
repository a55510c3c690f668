#include "citesim/similarity_matrix.hpp"

#include <array>
#include <stdexcept>

namespace citesim {

NaMask::NaMask(const CitationGraph& g, Rule rule) : rule_(rule) {
  if (rule_ == Rule::none) return;
  flags_.resize(g.size());
  for (PaperId p = 0; p < g.size(); ++p) {
    std::uint8_t f = 0;
    if (g.in(p).empty()) f |= kNoIn;
    if (g.out(p).empty()) f |= kNoOut;
    flags_[p] = f;
  }
}

std::size_t NaMask::count() const {
  if (rule_ == Rule::none) return 0;
  // Pair rule depends only on the two flag values; count nodes per flag class.
  std::array<std::size_t, 4> per_class{};
  for (auto f : flags_) ++per_class[f];
  std::size_t total = 0;
  for (std::uint8_t a = 0; a < 4; ++a) {
    for (std::uint8_t b = a; b < 4; ++b) {
      if (per_class[a] == 0 || per_class[b] == 0) continue;
      NaMask probe;
      probe.rule_ = rule_;
      probe.flags_ = {a, b};
      if (!probe(0, 1)) continue;
      total += a == b ? per_class[a] * (per_class[a] - 1) / 2 : per_class[a] * per_class[b];
    }
  }
  return total;
}

SimilarityMatrix::SimilarityMatrix(std::size_t n, Storage storage, ScoreContract contract)
    : n_(n), storage_(storage), contract_(contract) {
  if (storage_ == Storage::dense) dense_.assign(pair_count(), 0.0);
}

std::optional<double> SimilarityMatrix::score(PaperId p, PaperId q) const {
  if (p >= n_ || q >= n_) throw std::out_of_range("paper id out of range");
  if (na_(p, q)) return std::nullopt;
  return value(p, q);
}

void SimilarityMatrix::set(PaperId p, PaperId q, double v) {
  if (p == q) throw std::invalid_argument("diagonal is fixed at 1");
  if (p >= n_ || q >= n_) throw std::out_of_range("paper id out of range");
  if (p > q) std::swap(p, q);
  if (storage_ == Storage::dense) {
    dense_[tri_index(p, q)] = v;
    return;
  }
  const auto key = pair_key(p, q);
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  const auto pos = static_cast<std::size_t>(it - keys_.begin());
  if (it != keys_.end() && *it == key) {
    sparse_values_[pos] = v;
  } else if (it == keys_.end()) {
    if (v != 0.0) {
      keys_.push_back(key);
      sparse_values_.push_back(v);
    }
  } else {
    throw std::logic_error("sparse set() must append in key order");
  }
}

void SimilarityMatrix::assign_sparse(std::vector<std::uint64_t> keys,
                                     std::vector<double> values) {
  if (storage_ != Storage::sparse) throw std::logic_error("matrix is not sparse");
  if (keys.size() != values.size()) throw std::invalid_argument("size mismatch");
  std::size_t w = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i > 0 && keys[i] <= keys[i - 1]) {
      throw std::invalid_argument("sparse keys must be strictly increasing");
    }
    if (values[i] == 0.0) continue;
    keys[w] = keys[i];
    values[w] = values[i];
    ++w;
  }
  keys.resize(w);
  values.resize(w);
  keys_ = std::move(keys);
  sparse_values_ = std::move(values);
}

bool operator==(const SimilarityMatrix& a, const SimilarityMatrix& b) {
  if (a.n_ != b.n_ || a.contract_ != b.contract_ || a.na_.rule() != b.na_.rule()) {
    return false;
  }
  if (a.storage_ == b.storage_) {
    return a.dense_ == b.dense_ && a.keys_ == b.keys_ &&
           a.sparse_values_ == b.sparse_values_;
  }
  for (PaperId p = 0; p < a.n_; ++p)
    for (PaperId q = p + 1; q < a.n_; ++q)
      if (a.value(p, q) != b.value(p, q)) return false;
  return true;
}

}  // namespace citesim
