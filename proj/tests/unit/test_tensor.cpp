#include <algorithm>
#include <numeric>

#include "helpers.hpp"

using namespace blab;
using blab::testing::distance;

namespace {

const Lattice lat3{1, 3, 3.0};

}  // namespace

TEST(TensorInner, NormalisedSesquilinearOrthogonalDeltas) {
  const TensorSpace sp(lat3, 3);
  Rng rng(3);
  const TensorState a = rng.tensor(sp);
  const TensorState b = rng.tensor(sp);
  EXPECT_NEAR(inner(a, a).real(), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(inner(a, b) - std::conj(inner(b, a))), 0.0, 1e-15);
  EXPECT_EQ(inner(sp.delta({0, 1, 2}), sp.delta({0, 2, 1})), cplx(0.0));
  EXPECT_NEAR(norm(sp.delta({1, 1, 0})), 1.0, 1e-14);
  EXPECT_THROW(inner(a, TensorSpace(lat3, 2).zero()), ShapeError);
}

TEST(TensorFactor, IdentityAndOrthogonalProjections) {
  const TensorSpace sp(lat3, 3);
  Rng rng(4);
  const TensorState psi = rng.tensor(sp);
  const SiteFunction phi = rng.condensate(lat3);
  EXPECT_LE(distance(sp.apply_factor(OneBodyOperator::identity(3), 1, psi), psi), 1e-15);
  const TensorState pq = sp.apply_factor(OneBodyOperator::complement(lat3, phi), 2,
                                         sp.apply_factor(OneBodyOperator::projector(lat3, phi), 2, psi));
  EXPECT_LE(norm(pq), 1e-14);
  EXPECT_THROW(sp.apply_factor(OneBodyOperator::identity(3), 3, psi), RangeError);
}

TEST(TensorFactor, LaplacianOnFirstSlotOfProduct) {
  const TensorSpace sp(lat3, 3);
  Rng rng(5);
  const SiteFunction phi = rng.condensate(lat3);
  const OneBodyOperator lap = laplacian(lat3);
  SiteFunction lphi(3, cplx{0.0});
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s) lphi[r] += lap(r, s) * phi[s];
  const TensorState expected = sp.product({lphi, phi, phi});
  EXPECT_LE(distance(sp.apply_factor(lap, 0, sp.product(phi)), expected), 1e-13);
}

TEST(TensorOneBodySum, IdentityEigenvectorAndSymmetry) {
  const TensorSpace sp(lat3, 4);
  Rng rng(6);
  const TensorState psi = rng.symmetric_tensor(sp);
  EXPECT_LE(distance(sp.one_body_sum(OneBodyOperator::identity(3), psi), cplx(4.0) * psi), 1e-14);
  const SiteFunction phi = site_normalized(lat3, SiteFunction(3, cplx{1.0}));
  const OneBodyOperator x = OneBodyOperator::identity(3) + cplx(0.7) * OneBodyOperator::projector(lat3, phi);
  const TensorState prod = sp.product(phi);
  EXPECT_LE(distance(sp.one_body_sum(x, prod), cplx(4.0 * 1.7) * prod), 1e-13);
  EXPECT_LE(sp.transposition_residual(sp.one_body_sum(rng.hermitian(3), psi)), 1e-12);
}

TEST(TensorPairDiagonal, ZeroSinglePairAndBruteForce) {
  Rng rng(7);
  const PairTable w(lat3, {0.9, 0.25, 0.25});
  const TensorSpace sp2(lat3, 2);
  EXPECT_LE(norm(sp2.pair_diagonal(PairTable::zero(lat3), rng.tensor(sp2))), 0.0);
  const TensorState d = sp2.delta({0, 2});
  EXPECT_LE(distance(sp2.pair_diagonal(w, d), cplx(w(0, 2)) * d), 1e-15);

  const TensorSpace sp(lat3, 3);
  const TensorState psi = rng.tensor(sp);
  const TensorState out = sp.pair_diagonal(w, psi);
  for (int x0 = 0; x0 < 3; ++x0)
    for (int x1 = 0; x1 < 3; ++x1)
      for (int x2 = 0; x2 < 3; ++x2) {
        const std::size_t idx = (x0 * 3 + x1) * 3 + x2;
        const double pot = w(x0, x1) + w(x0, x2) + w(x1, x2);
        EXPECT_NEAR(std::abs(out[idx] - pot * psi[idx]), 0.0, 1e-14);
      }
}

TEST(TensorPairSum, MatchesDirectTwoSlotLoop) {
  const TensorSpace sp(lat3, 3);
  Rng rng(8);
  const TwoBodyKernel k = rng.kernel(3);
  const TensorState psi = rng.tensor(sp);
  const TensorState out = sp.pair_sum(k, psi);
  TensorState ref = sp.zero();
  for (std::size_t idx = 0; idx < sp.dim(); ++idx) {
    const auto x = sp.tuple(idx);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            auto y = x;
            y[i] = a;
            y[j] = b;
            ref[idx] += k(x[i] * 3 + x[j], a * 3 + b) * psi[sp.index(y)];
          }
  }
  EXPECT_LE(distance(out, ref), 1e-12);
}

TEST(TensorChain, PatternsOnCondensateProduct) {
  const TensorSpace sp(lat3, 3);
  Rng rng(9);
  const SiteFunction phi = rng.condensate(lat3);
  const TensorState prod = sp.product(phi);
  EXPECT_LE(distance(sp.projector_chain("ppp", phi, prod), prod), 1e-14);
  EXPECT_LE(norm(sp.projector_chain("pqi", phi, prod)), 1e-14);
  EXPECT_THROW(sp.projector_chain("pq", phi, prod), ShapeError);
  EXPECT_THROW(sp.projector_chain("ppp", SiteFunction(3, cplx{2.0}), prod), NormalizationError);
}

TEST(TensorChain, TwoQExpectationMatchesFallingFactorialOfWeights) {
  const int n = 4;
  const TensorSpace sp(lat3, n);
  Rng rng(10);
  const SiteFunction phi = rng.condensate(lat3);
  const TensorState psi = rng.symmetric_tensor(sp);
  const double lhs = inner(psi, sp.projector_chain("qqii", phi, psi)).real();
  const SpectralWeights w = spectral_weights(sp, phi, psi);
  double rhs = 0.0;
  for (int k = 0; k <= n; ++k) rhs += k * (k - 1.0) / (n * (n - 1.0)) * w[k];
  EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(TensorSymmetrize, IdempotentPairAndExplicitPermutations) {
  Rng rng(12);
  const TensorSpace sp2(lat3, 2);
  const TensorState s = sp2.symmetrize(sp2.delta({0, 2}));
  const TensorState expect = cplx(0.5) * (sp2.delta({0, 2}) + sp2.delta({2, 0}));
  EXPECT_LE(distance(s, expect), 1e-15);

  const TensorSpace sp(lat3, 3);
  const TensorState psi = rng.tensor(sp);
  const TensorState sym = sp.symmetrize(psi);
  EXPECT_LE(distance(sp.symmetrize(sym), sym), 1e-14);
  TensorState ref = sp.zero();
  std::array<int, 3> perm{0, 1, 2};
  int count = 0;
  do {
    for (std::size_t idx = 0; idx < sp.dim(); ++idx) {
      const auto x = sp.tuple(idx);
      ref[idx] += psi[sp.index({x[perm[0]], x[perm[1]], x[perm[2]]})] / 6.0;
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(count, 6);
  EXPECT_LE(distance(sym, ref), 1e-14);
  EXPECT_LE(sp.transposition_residual(sym), 1e-14);
  EXPECT_GT(sp.transposition_residual(psi), 1e-3);
}

TEST(TensorSymmetry, PairDiagonalCommutesWithSymmetrize) {
  const TensorSpace sp(lat3, 3);
  Rng rng(13);
  const PairTable w(lat3, {0.4, -0.3, -0.3});
  const TensorState psi = rng.tensor(sp);
  EXPECT_LE(distance(sp.pair_diagonal(w, sp.symmetrize(psi)), sp.symmetrize(sp.pair_diagonal(w, psi))), 1e-12);
}

TEST(TensorSymmetry, OperatorsAreHermitian) {
  const TensorSpace sp(lat3, 3);
  Rng rng(14);
  const SiteFunction phi = rng.condensate(lat3);
  const OneBodyOperator h = rng.hermitian(3);
  const PairTable w(lat3, {0.4, -0.3, -0.3});
  for (int trial = 0; trial < 5; ++trial) {
    const TensorState a = rng.tensor(sp), b = rng.tensor(sp);
    auto check = [&](auto&& op) { EXPECT_NEAR(std::abs(inner(a, op(b)) - inner(op(a), b)), 0.0, 1e-12); };
    check([&](const TensorState& x) { return sp.one_body_sum(h, x); });
    check([&](const TensorState& x) { return sp.pair_diagonal(w, x); });
    check([&](const TensorState& x) { return sp.projector_chain("ppi", phi, x); });
    check([&](const TensorState& x) { return sp.projector_chain("qiq", phi, x); });
  }
}

TEST(TensorSpace, RejectsOversizedGrid) { EXPECT_THROW(TensorSpace(Lattice{1, 8, 8.0}, 10), RangeError); }
