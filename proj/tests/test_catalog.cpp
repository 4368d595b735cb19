#include "mbn/bloch.hpp"
#include "mbn/catalog.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mbn;

TEST(HorodeckiQutrit, RegionsAcrossAlpha) {
  const Bipartition bip(3, 3);
  for (double alpha = 2.0; alpha <= 5.0 + 1e-12; alpha += 0.25) {
    const auto st = horodecki_qutrit(alpha);
    EXPECT_EQ(st.bip, bip);
    EXPECT_NEAR(st.rho.matrix().trace().real(), 1.0, 1e-14);
    const double n = negativity(st.rho, bip);
    if (alpha <= 4.0 + 1e-12)
      EXPECT_EQ(n, 0.0) << alpha;
    else
      EXPECT_GT(n, 1e-6) << alpha;
    if (alpha <= 3.0 + 1e-12) {
      EXPECT_EQ(mbn::mbn(st.rho, bip), 0.0) << alpha;
    }
  }
  // PPT but detected
  EXPECT_GT(mbn::mbn(horodecki_qutrit(3.5).rho, bip), 0.01);
  EXPECT_THROW(horodecki_qutrit(1.9), Error);
  EXPECT_THROW(horodecki_qutrit(5.1), Error);
}

TEST(HorodeckiQutrit, NoiseMixing) {
  const auto st = mix_with_identity(horodecki_qutrit(4.5), 0.0);
  EXPECT_LT((st.rho.matrix() - ComplexMatrix::Identity(9, 9) / 9.0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(mix_with_identity(horodecki_qutrit(4.5), 1.1), Error);
}

TEST(Toth, PptAndDetected) {
  const auto st = toth_4qubit();
  EXPECT_EQ(st.bip, Bipartition(4, 4));
  EXPECT_GE(st.rho.min_eigenvalue(), -1e-14);
  EXPECT_NEAR(st.rho.matrix().trace().real(), 1.0, 1e-14);
  EXPECT_EQ(negativity(st.rho, st.bip), 0.0);
  EXPECT_LE(oracle::negativity(st.rho.matrix(), 4, 4), 1e-14);
  EXPECT_GT(mbn::mbn(st.rho, st.bip), 0.02);
}

TEST(BlochDiagonal, CoefficientTable) {
  const auto t = bloch_diagonal_bd_coefficients();
  int neg = 0, small = 0, large = 0;
  for (double x : t) {
    neg += x == -0.0557066;
    small += x == 0.0142664;
    large += x == 0.0971467;
  }
  EXPECT_EQ(neg, 9);
  EXPECT_EQ(small, 3);
  EXPECT_EQ(large, 3);
}

TEST(BlochDiagonal, PptBoundEntangled) {
  const auto st = bloch_diagonal_bd();
  EXPECT_GE(st.rho.min_eigenvalue(), -1e-14);
  EXPECT_EQ(negativity(st.rho, st.bip), 0.0);
  EXPECT_GT(mbn::mbn(st.rho, st.bip), 0.02);
  // rho = I/16 + sum t_i B_i x B_i with B_i = P_i/2, so Tr(rho B_i x B_i) = t_i
  const auto t = bloch_diagonal_bd_coefficients();
  const auto basis = pauli_string_basis(2);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const ComplexMatrix op = oracle::kron(basis[i], basis[i]) * 0.5;
    EXPECT_NEAR((st.rho.matrix() * op).trace().real(), t[i], 2e-7) << i;
  }
}

TEST(BlochDiagonal, CanonicalGellMannOrderIsNotAState) {
  const auto t = bloch_diagonal_bd_coefficients();
  try {
    bloch_diagonal_state(t, gell_mann_basis(4), 2.0, bloch_diagonal_rounding_budget);
    FAIL() << "expected ordering mismatch";
  } catch (const OrderingMismatch& e) {
    EXPECT_EQ(e.code(), ErrorCode::ordering_mismatch);
    EXPECT_NEAR(e.min_eigenvalue(), -0.2037, 1e-3);
  }
}

TEST(BlochDiagonal, StrictBudgetRejectsRounding) {
  const auto t = bloch_diagonal_bd_coefficients();
  EXPECT_THROW(bloch_diagonal_state(t, pauli_string_basis(2), 1.0, 0.0), OrderingMismatch);
  const std::array<double, 3> bad{0.1, 0.2};
  EXPECT_THROW(bloch_diagonal_state(std::span<const double>(bad.data(), 2), gell_mann_basis(2), 2.0), Error);
}

TEST(MeStates, MaximallyEntangledAcrossFirstQubit) {
  for (int k : {2, 3, 4}) {
    const auto st = me_state(k);
    EXPECT_EQ(st.bip, Bipartition(2, 1 << (k - 1)));
    EXPECT_NEAR(st.rho.purity(), 1.0, 1e-14);
    EXPECT_NEAR(mbn::mbn(st.rho, st.bip), 1.0, 1e-12);
    EXPECT_NEAR(negativity(st.rho, st.bip), 0.5, 1e-12);
    const auto reduced = partial_trace(st.rho, Subsystem::A, st.bip);
    EXPECT_LT((reduced.matrix() - ComplexMatrix::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_THROW(me_state(5), Error);
}

TEST(MeStates, FourQubitAmplitudes) {
  const auto st = me_state(4);
  const auto& m = st.rho.matrix();
  // |0000>, |0011>, |1100>, -|1111>, each 1/2
  EXPECT_NEAR(m(0, 0).real(), 0.25, 1e-15);
  EXPECT_NEAR(m(0, 3).real(), 0.25, 1e-15);
  EXPECT_NEAR(m(0, 12).real(), 0.25, 1e-15);
  EXPECT_NEAR(m(0, 15).real(), -0.25, 1e-15);
}

TEST(RandomStates, Deterministic) {
  const Bipartition bip(2, 3);
  EXPECT_EQ(random_pure(bip, 5).rho.matrix(), random_pure(bip, 5).rho.matrix());
  EXPECT_NE(random_pure(bip, 5).rho.matrix(), random_pure(bip, 6).rho.matrix());
  EXPECT_EQ(random_mixed(bip, 5).rho.matrix(), random_mixed(bip, 5).rho.matrix());
  EXPECT_EQ(random_separable(bip, 5).rho.matrix(), random_separable(bip, 5).rho.matrix());
}

TEST(RandomStates, SeparableMixturesScoreZero) {
  for (const auto& bip : {Bipartition(2, 2), Bipartition(2, 3), Bipartition(3, 3)}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto st = random_separable(bip, seed);
      EXPECT_EQ(mbn::mbn(st.rho, bip), 0.0);
      EXPECT_GE(st.rho.min_eigenvalue(), -1e-12);
    }
  }
}

TEST(LuOrbit, PreservesMeasuresAndIsReproducible) {
  const auto st = me_state(3);
  const auto orbit = lu_orbit(st, 5, 11);
  ASSERT_EQ(orbit.size(), 5u);
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    EXPECT_NEAR(mbn::mbn(orbit[i].rho, st.bip), 1.0, 1e-10);
    EXPECT_NEAR(negativity(orbit[i].rho, st.bip), 0.5, 1e-10);
    EXPECT_EQ(orbit[i].rho.matrix(), lu_orbit_member(st, i, 11).rho.matrix());
  }
  EXPECT_NE(orbit[0].rho.matrix(), orbit[1].rho.matrix());
  EXPECT_THROW(lu_orbit_member(horodecki_qutrit(4.0), 0, 1), Error);
  EXPECT_THROW(lu_orbit_member(toth_4qubit(), 0, 1), Error);
}

TEST(Catalog, LabelsBuild) {
  for (const auto& label : catalog_labels()) {
    const auto st = make_catalog_state(label);
    EXPECT_EQ(st.bip.total(), st.rho.dim()) << label;
  }
  CatalogOptions opt;
  opt.dim_a = 3;
  opt.dim_b = 4;
  EXPECT_EQ(make_catalog_state("max_entangled", opt).rho.dim(), 12);
  EXPECT_NO_THROW(make_catalog_state("horodecki"));
  EXPECT_THROW(make_catalog_state("ghz"), Error);
}
