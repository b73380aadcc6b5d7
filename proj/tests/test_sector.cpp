#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "aqc/hamiltonians.hpp"
#include "aqc/sector.hpp"
#include "oracles.hpp"

using namespace aqc;

namespace {

StateVector random_state(const Space& sp, Rng& rng) {
  StateVector v(sp);
  for (std::size_t i = 0; i < v.dim(); ++i) v[i] = cplx{standard_normal(rng), standard_normal(rng)};
  return v.normalized();
}

// (1/(2n+1)) sum_{j=0}^{2n} exp(2 pi i j (delta - Sigma^z) / (2n+1)) |s>, normalized
oracle::Vec fourier_projection(int n, int delta) {
  const std::size_t dim = std::size_t{1} << n;
  const double a = std::pow(2.0, -0.5 * n);
  const int terms = 2 * n + 1;
  oracle::Vec out = oracle::Vec::Zero(static_cast<Eigen::Index>(dim));
  for (int j = 0; j < terms; ++j) {
    const double phi = 2.0 * std::numbers::pi * j / terms;
    for (std::size_t x = 0; x < dim; ++x) {
      int sz = 0;
      for (int q = 0; q < n; ++q) sz += ((x >> q) & 1U) ? -1 : 1;
      out(static_cast<Eigen::Index>(x)) += std::polar(a, phi * (delta - sz)) / static_cast<double>(terms);
    }
  }
  return out / out.norm();
}

}  // namespace

TEST(SectorBasis, Examples) {
  SectorBasis b31(3, 1);
  EXPECT_EQ(b31.dim(), 3U);
  EXPECT_EQ(b31.unrank(0), 1U);
  EXPECT_EQ(b31.unrank(1), 2U);
  EXPECT_EQ(b31.unrank(2), 4U);
  EXPECT_EQ(SectorBasis(9, 3).dim(), 84U);
  SectorBasis b40(4, 0);
  EXPECT_EQ(b40.dim(), 1U);
  EXPECT_EQ(b40.unrank(0), 0U);
  EXPECT_THROW(SectorBasis(4, 5), ValidationError);
  EXPECT_THROW(SectorBasis(40, 20, 1000), ValidationError);
}

TEST(SectorBasis, RankUnrankAndOrdering) {
  for (int n = 1; n <= 14; ++n) {
    for (int k = 0; k <= n; ++k) {
      SectorBasis b(n, k);
      ASSERT_EQ(b.dim(), binomial(n, k));
      for (std::size_t i = 0; i < b.dim(); ++i) {
        EXPECT_EQ(b.rank(b.unrank(i)), i);
        EXPECT_EQ(hamming_weight(b.unrank(i)), k);
        EXPECT_EQ(total_z(b.unrank(i), n), n - 2 * k);
        if (i > 0) EXPECT_LT(b.unrank(i - 1), b.unrank(i));
      }
    }
  }
}

TEST(SectorBasis, PartitionOfFullSpace) {
  for (int n = 1; n <= 20; ++n) {
    std::uint64_t total = 0;
    for (int k = 0; k <= n; ++k) total += SectorBasis(n, k).dim();
    EXPECT_EQ(total, std::uint64_t{1} << n);
  }
  // the members themselves cover every index exactly once
  std::vector<int> seen(1024, 0);
  for (int k = 0; k <= 10; ++k) {
    SectorBasis b(10, k);
    for (basis_t x : b.members()) ++seen[x];
  }
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(ProjectUniform, Examples) {
  StateVector s31 = project_uniform(Space::sector(3, 1));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s31[i].real(), 1 / std::sqrt(3.0), 1e-15);
  StateVector s21 = project_uniform(Space::sector(2, 1));
  EXPECT_NEAR(s21.probability(1), 0.5, 1e-15);
  EXPECT_NEAR(s21.probability(2), 0.5, 1e-15);
}

TEST(ProjectUniform, MatchesFourierSum) {
  for (int n = 1; n <= 10; ++n) {
    for (int k = 0; k <= n; ++k) {
      oracle::Vec ref = fourier_projection(n, n - 2 * k);
      oracle::Vec ours = oracle::to_eigen(project_uniform(Space::sector(n, k)).embed());
      EXPECT_NEAR(std::abs(ref.dot(ours)), 1.0, 1e-12) << "n=" << n << " k=" << k;
      EXPECT_LE((ref - ours).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(ProjectUniform, EigenvectorOfTotalZ) {
  for (int k = 0; k <= 7; ++k) {
    Space sec = Space::sector(7, k);
    StateVector s = project_uniform(sec);
    StateVector out = build_total_z(sec).apply(s);
    for (std::size_t i = 0; i < s.dim(); ++i) EXPECT_EQ(out[i], cplx(7.0 - 2 * k) * s[i]);
  }
}

TEST(Restrict, DiagonalGather) {
  Ec3Instance inst = generate(8, 3, false);
  Space sec = Space::sector(8, 3);
  Operator full = build_ec3_out(inst);
  Operator r = restrict(full, sec);
  auto fd = full.diagonal_values();
  auto rd = r.diagonal_values();
  for (std::size_t i = 0; i < sec.dim(); ++i) EXPECT_EQ(rd[i], fd[sec.state(i)]);
}

TEST(Restrict, XyThreeQubitExample) {
  // M_12 = 1 alone cannot come from a clause list; build the term directly
  Operator full = OperatorBuilder(Space::full(3)).add_exchange(1, 2, -1.0).build();
  Space sec = Space::sector(3, 1);
  oracle::Mat m = oracle::dense_from_apply(restrict(full, sec));
  oracle::Mat expect = oracle::Mat::Zero(3, 3);
  expect(0, 1) = expect(1, 0) = -1.0;  // |001> <-> |010>
  EXPECT_LE((m - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Restrict, RejectsSectorViolatingTerms) {
  auto ising = build_ising(6);
  try {
    restrict(ising.h_in, Space::sector(6, 2));
    FAIL() << "expected rejection";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("qubit"), std::string::npos);
  }
  // |s> leaks out of every Hamming-weight sector
  EXPECT_THROW(restrict(build_grover(6, 0).h_in, Space::sector(6, 2)), ValidationError);
  // a field term is not flip-symmetric
  Operator field = OperatorBuilder(Space::full(4)).set_diagonal({1, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0}).build();
  EXPECT_THROW(restrict(field, Space::flip_even(4)), ValidationError);
}

TEST(Restrict, EmbeddingEquivariance) {
  Rng rng(12);
  for (int n : {6, 9, 12}) {
    Ec3Instance inst = generate(n, 5, false);
    std::vector<Operator> ops = {build_ec3_out(inst), build_heisenberg_in(inst), build_xy_in(inst),
                                 build_conventional_out(inst, Space::full(n)), build_total_z(Space::full(n))};
    const int k = n / 3;
    Space sec = Space::sector(n, k);
    for (const Operator& op : ops) {
      Operator r = restrict(op, sec);
      for (int t = 0; t < 20; ++t) {
        StateVector psi = random_state(sec, rng);
        EXPECT_LE(max_abs_difference(r.apply(psi).embed(), op.apply(psi.embed())), 1e-12);
      }
    }
  }
}

TEST(Restrict, FlipEvenEquivariance) {
  Rng rng(13);
  for (auto pair : {build_ising(8), build_hybrid(8)}) {
    Space even = Space::flip_even(8);
    auto r = restrict(pair, even);
    for (double g : {0.0, 0.3, 1.0}) {
      for (int t = 0; t < 20; ++t) {
        StateVector psi = random_state(even, rng);
        EXPECT_LE(max_abs_difference(interpolate(r, g).apply(psi).embed(),
                                     interpolate(pair, g).apply(psi.embed())),
                  1e-12);
      }
    }
  }
}

TEST(ChooseDelta, Examples) {
  Ec3Instance inst;
  inst.n = 9;
  inst.solution = from_assignment_string("100100100");
  SectorChoice c = choose_delta(inst);
  EXPECT_EQ(c.k, 3);
  EXPECT_EQ(c.delta, 3);
  EXPECT_EQ(delta_candidates(9).front().k, 3);
  inst.n = 6;
  inst.solution = from_assignment_string("110000");
  c = choose_delta(inst);
  EXPECT_EQ(c.k, 2);
  EXPECT_EQ(c.delta, 2);
  inst.solution.reset();
  EXPECT_THROW(choose_delta(inst), ValidationError);
}

TEST(ChooseDelta, CandidateOrder) {
  auto c = delta_candidates(10);
  ASSERT_EQ(c.size(), 11U);
  EXPECT_EQ(c[0].k, 3);
  EXPECT_EQ(c[1].k, 4);
  for (std::size_t i = 1; i < c.size(); ++i)
    EXPECT_LE(std::abs(3 * c[i - 1].k - 10), std::abs(3 * c[i].k - 10));
  EXPECT_THROW(SectorChoice::from_delta(9, 2), ValidationError);
}
