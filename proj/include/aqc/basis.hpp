#pragma once

// Basis descriptors: the full 2^n space, fixed Hamming-weight sectors, and the
// even subspace of the global spin flip x <-> ~x.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqc/bits.hpp"

namespace aqc {

inline constexpr std::size_t default_max_sector_dim = std::size_t{1} << 26;

/// All n-bit strings with exactly k ones, in ascending numeric order.
///
/// The rank of a member is its position in that order, computed with the
/// combinatorial number system: the j-th set bit (ascending, 1-based j) at
/// position p contributes C(p, j).
class SectorBasis {
 public:
  SectorBasis(int n, int k, std::size_t max_dim = default_max_sector_dim) : n_(n), k_(k) {
    if (n < 1 || n > max_sector_qubits)
      throw ValidationError("sector basis: n must lie in [1, " +
                            std::to_string(max_sector_qubits) + "], got " + std::to_string(n));
    if (k < 0 || k > n)
      throw ValidationError("sector basis: k=" + std::to_string(k) + " outside [0, " +
                            std::to_string(n) + "]");
    std::uint64_t d = binomial(n, k);
    if (d > max_dim)
      throw ValidationError("sector basis: C(" + std::to_string(n) + "," + std::to_string(k) +
                            ")=" + std::to_string(d) + " exceeds the dimension budget " +
                            std::to_string(max_dim));
    members_.reserve(static_cast<std::size_t>(d));
    if (k == 0) {
      members_.push_back(0);
    } else {
      basis_t x = all_ones(k);
      for (std::uint64_t i = 0; i < d; ++i) {
        members_.push_back(x);
        if (i + 1 < d) x = next_same_weight(x);
      }
    }
  }

  int n() const { return n_; }
  int k() const { return k_; }
  int delta() const { return n_ - 2 * k_; }
  std::size_t dim() const { return members_.size(); }
  std::span<const basis_t> members() const { return members_; }

  basis_t unrank(std::size_t i) const { return members_[i]; }

  /// Rank of x; x must have exactly k ones and fit in n bits.
  std::size_t rank(basis_t x) const {
    std::uint64_t r = 0;
    int j = 1;
    while (x != 0) {
      int p = std::countr_zero(x);
      r += binomial(p, j);
      ++j;
      x &= x - 1;
    }
    return static_cast<std::size_t>(r);
  }

  std::optional<std::size_t> find(basis_t x) const {
    if (hamming_weight(x) != k_ || (x & ~all_ones(n_)) != 0) return std::nullopt;
    return rank(x);
  }

 private:
  int n_;
  int k_;
  std::vector<basis_t> members_;
};

enum class SpaceKind { full, sector, flip_even };

/// Which basis a state or operator lives in.
///
/// flip_even: basis vector i is (|i> + |~i>)/sqrt(2) for representatives i
/// with qubit n clear, so dim = 2^(n-1).
class Space {
 public:
  static Space full(int n) {
    check_full_n(n, "full space");
    return Space(SpaceKind::full, n, -1, nullptr);
  }

  static Space sector(std::shared_ptr<const SectorBasis> basis) {
    if (!basis) throw ValidationError("sector space: null basis");
    int n = basis->n();
    int k = basis->k();
    return Space(SpaceKind::sector, n, k, std::move(basis));
  }

  static Space sector(int n, int k) { return sector(std::make_shared<const SectorBasis>(n, k)); }

  static Space flip_even(int n) {
    check_full_n(n, "flip-even space");
    return Space(SpaceKind::flip_even, n, -1, nullptr);
  }

  SpaceKind kind() const { return kind_; }
  int n() const { return n_; }
  /// Hamming weight of a sector space, -1 otherwise.
  int k() const { return k_; }
  std::size_t dim() const { return dim_; }
  const SectorBasis* basis() const { return basis_.get(); }
  const std::shared_ptr<const SectorBasis>& basis_ptr() const { return basis_; }

  /// Full-space index of basis element i (the representative for flip_even).
  basis_t state(std::size_t i) const {
    return kind_ == SpaceKind::sector ? basis_->unrank(i) : static_cast<basis_t>(i);
  }

  /// Index of the basis element containing |x>, if any.
  std::optional<std::size_t> index(basis_t x) const {
    if ((x & ~all_ones(n_)) != 0) return std::nullopt;
    switch (kind_) {
      case SpaceKind::full:
        return static_cast<std::size_t>(x);
      case SpaceKind::sector:
        return basis_->find(x);
      case SpaceKind::flip_even:
        return static_cast<std::size_t>(representative(x));
    }
    return std::nullopt;
  }

  basis_t representative(basis_t x) const {
    return (x & qubit_mask(n_)) ? (~x & all_ones(n_)) : x;
  }

  bool operator==(const Space& o) const {
    return kind_ == o.kind_ && n_ == o.n_ && k_ == o.k_;
  }

  std::string describe() const {
    switch (kind_) {
      case SpaceKind::full:
        return "full(n=" + std::to_string(n_) + ")";
      case SpaceKind::sector:
        return "sector(n=" + std::to_string(n_) + ",k=" + std::to_string(k_) + ")";
      case SpaceKind::flip_even:
        return "flip_even(n=" + std::to_string(n_) + ")";
    }
    return "?";
  }

 private:
  Space(SpaceKind kind, int n, int k, std::shared_ptr<const SectorBasis> basis)
      : kind_(kind), n_(n), k_(k), basis_(std::move(basis)) {
    switch (kind_) {
      case SpaceKind::full:
        dim_ = std::size_t{1} << n_;
        break;
      case SpaceKind::sector:
        dim_ = basis_->dim();
        break;
      case SpaceKind::flip_even:
        dim_ = std::size_t{1} << (n_ - 1);
        break;
    }
  }

  static void check_full_n(int n, const char* what) {
    if (n < 1 || n > max_full_qubits)
      throw ValidationError(std::string(what) + ": n must lie in [1, " +
                            std::to_string(max_full_qubits) + "], got " + std::to_string(n));
  }

  SpaceKind kind_;
  int n_;
  int k_;
  std::size_t dim_ = 0;
  std::shared_ptr<const SectorBasis> basis_;
};

inline void require_same_space(const Space& a, const Space& b, const char* what) {
  if (!(a == b))
    throw SpaceMismatch(std::string(what) + ": space mismatch between " + a.describe() +
                        " and " + b.describe());
}

}  // namespace aqc
