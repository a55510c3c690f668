#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "citesim/graph.hpp"

namespace citesim {

enum class ScoreContract { unit_interval, raw_count };

// Predicate over unordered pairs marking scores that cannot be measured
// because a required neighbor set is empty. It is a function of per-node
// emptiness flags, so it costs O(n) regardless of storage. The diagonal is
// never N/A.
class NaMask {
 public:
  enum class Rule {
    none,
    in,          // either paper has no in-links
    out,         // either paper has no out-links
    in_and_out,  // both the in-link and the out-link rule hold
    undirected,  // either paper is isolated
  };

  NaMask() = default;
  NaMask(const CitationGraph& g, Rule rule);

  Rule rule() const noexcept { return rule_; }

  bool operator()(PaperId p, PaperId q) const noexcept {
    if (rule_ == Rule::none || p == q) return false;
    const auto a = flags_[p], b = flags_[q];
    const bool in_na = ((a | b) & kNoIn) != 0;
    const bool out_na = ((a | b) & kNoOut) != 0;
    switch (rule_) {
      case Rule::in:
        return in_na;
      case Rule::out:
        return out_na;
      case Rule::in_and_out:
        return in_na && out_na;
      case Rule::undirected:
        return (a & (kNoIn | kNoOut)) == (kNoIn | kNoOut) ||
               (b & (kNoIn | kNoOut)) == (kNoIn | kNoOut);
      case Rule::none:
        break;
    }
    return false;
  }

  // Number of unordered off-diagonal N/A pairs.
  std::size_t count() const;

 private:
  static constexpr std::uint8_t kNoIn = 1;
  static constexpr std::uint8_t kNoOut = 2;

  Rule rule_ = Rule::none;
  std::vector<std::uint8_t> flags_;
};

// Symmetric pair -> score store. Each unordered pair occupies one cell, so
// score(p, q) and score(q, p) are the same value by construction. The
// diagonal is implicitly 1.
//
// Dense storage keeps the strict upper triangle. Sparse storage keeps only
// nonzero off-diagonal cells as sorted (key, value) arrays with key p*n+q,
// p < q; every absent cell reads as 0.
class SimilarityMatrix {
 public:
  enum class Storage { dense, sparse };

  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t n, Storage storage,
                   ScoreContract contract = ScoreContract::unit_interval);

  static Storage choose_storage(std::size_t n, std::size_t dense_limit) {
    return n <= dense_limit ? Storage::dense : Storage::sparse;
  }

  std::size_t size() const noexcept { return n_; }
  Storage storage() const noexcept { return storage_; }
  ScoreContract contract() const noexcept { return contract_; }

  // Iteration index k the entries represent (0 for non-iterative measures).
  int iteration() const noexcept { return iteration_; }
  void set_iteration(int k) noexcept { iteration_ = k; }

  const NaMask& na_mask() const noexcept { return na_; }
  void set_na_mask(NaMask mask) { na_ = std::move(mask); }
  bool is_na(PaperId p, PaperId q) const noexcept { return na_(p, q); }
  std::size_t na_count() const { return na_.count(); }

  // Stored value; 1 on the diagonal, 0 for N/A and absent cells. Unchecked.
  double value(PaperId p, PaperId q) const noexcept {
    if (p == q) return 1.0;
    if (p > q) std::swap(p, q);
    if (storage_ == Storage::dense) return dense_[tri_index(p, q)];
    const auto key = pair_key(p, q);
    const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) return 0.0;
    return sparse_values_[static_cast<std::size_t>(it - keys_.begin())];
  }

  // Checked read: nullopt for N/A pairs, throws std::out_of_range on bad ids.
  std::optional<double> score(PaperId p, PaperId q) const;

  // Off-diagonal write. Sparse storage only supports this for updating cells
  // already present or appending in increasing key order; bulk fills go
  // through dense_values() / assign_sparse().
  void set(PaperId p, PaperId q, double v);

  std::span<double> dense_values() noexcept { return dense_; }
  std::span<const double> dense_values() const noexcept { return dense_; }
  std::span<const std::uint64_t> sparse_keys() const noexcept { return keys_; }
  std::span<const double> sparse_values() const noexcept { return sparse_values_; }

  // Replaces sparse contents; keys must be strictly increasing. Zero values
  // are dropped.
  void assign_sparse(std::vector<std::uint64_t> keys, std::vector<double> values);

  std::size_t tri_index(PaperId p, PaperId q) const noexcept {
    // p < q
    const std::size_t pp = p;
    return pp * (2 * n_ - pp - 1) / 2 + (q - pp - 1);
  }
  std::uint64_t pair_key(PaperId p, PaperId q) const noexcept {
    return static_cast<std::uint64_t>(p) * n_ + q;
  }
  std::pair<PaperId, PaperId> key_pair(std::uint64_t key) const noexcept {
    return {static_cast<PaperId>(key / n_), static_cast<PaperId>(key % n_)};
  }

  // Visits every explicitly held off-diagonal cell (p < q) in increasing
  // (p, q) order: all pairs for dense storage, nonzero pairs for sparse.
  template <class F>
  void for_each_stored(F&& f) const {
    if (storage_ == Storage::dense) {
      std::size_t i = 0;
      for (PaperId p = 0; p < n_; ++p)
        for (PaperId q = p + 1; q < n_; ++q) f(p, q, dense_[i++]);
    } else {
      for (std::size_t i = 0; i < keys_.size(); ++i) {
        const auto [p, q] = key_pair(keys_[i]);
        f(p, q, sparse_values_[i]);
      }
    }
  }

  std::size_t pair_count() const noexcept { return n_ < 2 ? 0 : n_ * (n_ - 1) / 2; }

  // Same size, contract, N/A rule and bit-identical values on every pair,
  // independent of storage kind.
  friend bool operator==(const SimilarityMatrix& a, const SimilarityMatrix& b);

 private:
  std::size_t n_ = 0;
  Storage storage_ = Storage::dense;
  ScoreContract contract_ = ScoreContract::unit_interval;
  int iteration_ = 0;
  NaMask na_;
  std::vector<double> dense_;
  std::vector<std::uint64_t> keys_;
  std::vector<double> sparse_values_;
};

}  // namespace citesim
