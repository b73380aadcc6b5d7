#pragma once

// Bit and spin conventions shared by every module.
//
// Qubit alpha (1-based) lives at bit position alpha-1 of a basis index, so
// qubit 1 is the least significant bit. A bit value z in {0,1} corresponds to
// the sigma^z eigenvalue s = 1 - 2z.

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aqc {

using basis_t = std::uint64_t;

inline constexpr int max_full_qubits = 24;
inline constexpr int max_sector_qubits = 62;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

constexpr basis_t qubit_mask(int qubit) { return basis_t{1} << (qubit - 1); }

constexpr basis_t all_ones(int n) {
  return n >= 64 ? ~basis_t{0} : (basis_t{1} << n) - 1;
}

constexpr int bit_value(basis_t x, int qubit) {
  return static_cast<int>((x >> (qubit - 1)) & 1U);
}

constexpr int spin_from_bit(int z) { return 1 - 2 * z; }
constexpr int bit_from_spin(int s) { return (1 - s) / 2; }

/// sigma^z eigenvalue of `qubit` in basis state `x`.
constexpr int spin(basis_t x, int qubit) {
  return spin_from_bit(bit_value(x, qubit));
}

constexpr int hamming_weight(basis_t x) { return std::popcount(x); }

/// Total sigma^z eigenvalue: zeros minus ones.
constexpr int total_z(basis_t x, int n) { return n - 2 * hamming_weight(x); }

/// Assignment string with qubit 1 first, as used by instance files.
inline std::string to_assignment_string(basis_t x, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int q = 1; q <= n; ++q) s[q - 1] = bit_value(x, q) ? '1' : '0';
  return s;
}

inline basis_t from_assignment_string(std::string_view s) {
  if (s.size() > 64) throw ValidationError("assignment string longer than 64 bits");
  basis_t x = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') {
      x |= basis_t{1} << i;
    } else if (s[i] != '0') {
      throw ValidationError("assignment string may only contain '0' and '1'");
    }
  }
  return x;
}

/// Binary numeral with the most significant qubit first ("011" is index 3).
inline basis_t from_ket_label(std::string_view s) {
  basis_t x = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw ValidationError("ket label may only contain '0' and '1'");
    x = (x << 1) | static_cast<basis_t>(c == '1');
  }
  return x;
}

namespace detail {

struct BinomialTable {
  std::array<std::array<std::uint64_t, 65>, 65> value{};

  constexpr BinomialTable() {
    for (int n = 0; n <= 64; ++n) {
      value[n][0] = 1;
      for (int k = 1; k <= n; ++k) {
        // saturate instead of wrapping for the few entries above 2^64
        std::uint64_t a = value[n - 1][k - 1];
        std::uint64_t b = k <= n - 1 ? value[n - 1][k] : 0;
        value[n][k] = a > ~std::uint64_t{0} - b ? ~std::uint64_t{0} : a + b;
      }
    }
  }
};

inline constexpr BinomialTable binomial_table{};

}  // namespace detail

/// C(n, k); zero when k < 0 or k > n.
constexpr std::uint64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n || n > 64) return 0;
  return detail::binomial_table.value[n][k];
}

/// Next larger integer with the same popcount (Gosper's hack). x must be nonzero.
constexpr basis_t next_same_weight(basis_t x) {
  basis_t c = x & (~x + 1);
  basis_t r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

}  // namespace aqc
