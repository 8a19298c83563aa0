#include "helpers.hpp"

using namespace blab;
using blab::testing::small_config;

TEST(DeltaExponent, BranchValues) {
  for (int d : {1, 2}) EXPECT_DOUBLE_EQ(delta_exponent(0.0, 1.0, d), 1.0);
  EXPECT_NEAR(delta_exponent(0.2, 0.9, 1), 0.2, 1e-15);
  EXPECT_NEAR(delta_exponent(0.2, 0.75, 1), 0.05, 1e-15);
}

TEST(DeltaExponent, ContinuousAtBranchPoint) {
  for (int d : {1, 2})
    for (double beta : {0.0, 0.05, 0.1, 0.12}) {
      if (beta >= 1.0 / (4 * d)) continue;
      const double g = 1.0 - d * beta;
      if (!(g > (2.0 + d * beta) / 3.0)) continue;
      const double first = 1.0 - 4.0 * d * beta;
      const double second = 3.0 * g - 2.0 - d * beta;
      EXPECT_LE(std::abs(first - second), 1e-12);
      EXPECT_NEAR(delta_exponent(beta, g, d), first, 1e-12);
      EXPECT_NEAR(delta_exponent(beta, g - 1e-9, d), second, 1e-8);
    }
}

TEST(DeltaExponent, RejectsOutOfRangeParameters) {
  try {
    delta_exponent(0.3, 1.0, 1);
    FAIL();
  } catch (const RangeError& e) {
    EXPECT_NE(std::string(e.what()).find("1/(4d)"), std::string::npos);
  }
  try {
    delta_exponent(0.0, 0.6, 1);
    FAIL();
  } catch (const RangeError& e) {
    EXPECT_NE(std::string(e.what()).find("(2 + d beta)/3"), std::string::npos);
  }
  EXPECT_THROW(delta_exponent(0.0, 1.0, 3), RangeError);
}

TEST(FitSlope, CollinearAndDegenerate) {
  const SlopeFit f = fit_slope({{0.0, 3.0}, {1.0, 2.0}, {2.0, 1.0}, {5.0, -2.0}});
  EXPECT_NEAR(f.slope, -1.0, 1e-15);
  EXPECT_NEAR(f.intercept, 3.0, 1e-15);
  EXPECT_NEAR(f.residual, 0.0, 1e-28);
  EXPECT_THROW(fit_slope({{0.0, 1.0}, {1.0, 2.0}}), RangeError);
  EXPECT_THROW(fit_slope({{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}}), RangeError);
}

TEST(FitSlope, NoisyDataWithinStandardError) {
  Rng rng(91);
  int inside = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 12; ++i) {
      const double x = 0.25 * i;
      pts.emplace_back(x, -1.7 * x + 0.4 + 0.05 * rng.gauss());
    }
    const SlopeFit f = fit_slope(pts);
    if (std::abs(f.slope + 1.7) <= 2.0 * f.slope_stderr) ++inside;
  }
  // about 95% for a two-sigma band
  EXPECT_GT(inside, 0.88 * trials);
  EXPECT_LT(inside, trials);
}

TEST(InitialStates, WeightsOfBuilders) {
  const ModelConfig c = small_config(3, 4);
  const FockSpace sp(c.lattice(), 4);
  const SiteFunction phi = default_condensate(c.lattice());
  const SiteFunction chi = excitation_orbital(c.lattice(), phi);
  EXPECT_NEAR(std::abs(site_inner(c.lattice(), phi, chi)), 0.0, 1e-14);
  EXPECT_NEAR(site_norm(c.lattice(), chi), 1.0, 1e-14);
  const SpectralWeights one = spectral_weights(sp, phi, initial_state(sp, phi, {InitialKind::one_excitation, 0.0}));
  EXPECT_NEAR(one[1], 1.0, 1e-12);
  const FockState mixed = initial_state(sp, phi, {InitialKind::mixed, 0.5});
  EXPECT_NEAR(norm(mixed), 1.0, 1e-14);
  const SpectralWeights wm = spectral_weights(sp, phi, mixed);
  EXPECT_NEAR(wm[0], 1.0 / 1.25, 1e-12);
  EXPECT_NEAR(wm[1], 0.25 / 1.25, 1e-12);
}

TEST(Sweep, FreeGridHasNoErrorAndNoSlopes) {
  ModelConfig c = small_config(3, 3);
  c.interaction.profile = InteractionProfile::zero;
  c.t_final = 0.1;
  c = validate_config(c, RunKind::correction);
  SweepOptions opt;
  opt.particles = {2, 3, 4};
  opt.orders = {1, 2};
  opt.t = 0.1;
  opt.timing = false;
  const SweepResult r = sweep_scaling(c, opt);
  ASSERT_EQ(r.rows.size(), 6u);
  for (const auto& row : r.rows) {
    EXPECT_FALSE(row.failed);
    EXPECT_LE(row.err_sq, 1e-18);
  }
  for (const auto& [a, fit] : r.slopes) EXPECT_FALSE(fit.has_value()) << a;
  EXPECT_NE(r.summary().find("undefined"), std::string::npos);
}

TEST(Sweep, DeterministicCsvWithExactHeader) {
  ModelConfig c = small_config(3, 3);
  c.t_final = 0.1;
  c = validate_config(c, RunKind::correction);
  SweepOptions opt;
  opt.particles = {3, 4, 5};
  opt.orders = {1, 2};
  opt.t = 0.1;
  opt.timing = false;
  const std::string a = sweep_scaling(c, opt).csv();
  opt.jobs = 3;
  const SweepResult rb = sweep_scaling(c, opt);
  EXPECT_EQ(a, rb.csv());
  EXPECT_EQ(a.substr(0, a.find('\n')), "N,M,d,beta,gamma,t,dt,order,err_sq,corr_norm,runtime_s");
  for (int n : {3, 4, 5}) EXPECT_LT(rb.err_sq(n, 2), rb.err_sq(n, 1));
  ASSERT_TRUE(rb.delta.has_value());
  EXPECT_DOUBLE_EQ(*rb.delta, 1.0);
  ASSERT_TRUE(rb.slopes.at(1).has_value());
  EXPECT_EQ(rb.slopes.at(1)->points, 3);
}

TEST(Sweep, InvalidPointIsRecordedAndSweepContinues) {
  ModelConfig c;
  c.sites_per_dim = 8;
  c.torus_length = 4.0;
  c.beta = 0.2;
  c.gamma = 1.0;
  c.interaction.radius = 1.6;
  c.t_final = 0.02;
  c.dt = 1e-3;
  c.particles = 2;
  c = validate_config(c, RunKind::correction);
  SweepOptions opt;
  opt.particles = {2, 200};
  opt.orders = {1};
  opt.t = 0.02;
  opt.timing = false;
  const SweepResult r = sweep_scaling(c, opt);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_FALSE(r.rows[0].failed);
  EXPECT_TRUE(r.rows[1].failed);
  EXPECT_FALSE(r.rows[1].message.empty());
  EXPECT_NE(r.csv().find("nan,nan"), std::string::npos);
}

TEST(MomentGrowth, InitialTimeAndFrozenFreeMoments) {
  ModelConfig c = small_config(3, 4);
  c.t_final = 0.1;
  c = validate_config(c);
  const MomentGrowthResult r = moment_growth(c, {0, 1, 2, 3, 4}, 0.1);
  for (const auto& row : r.rows)
    if (row.t == 0.0 && row.j == 0) EXPECT_LE(row.ratio, 1.0);
  EXPECT_LE(r.max_ratio("aux"), 1.0);

  ModelConfig f = c;
  f.interaction.profile = InteractionProfile::zero;
  f = validate_config(f);
  const MomentGrowthResult rf = moment_growth(f, {1, 2, 3}, 0.1);
  ASSERT_FALSE(rf.rows.empty());
  for (const auto& row : rf.rows) EXPECT_NEAR(row.lhs, std::pow(4.0, -row.j), 1e-10) << row.evolution << row.t;
  EXPECT_EQ(r.csv().substr(0, r.csv().find('\n')), "evolution,t,j,lhs,log_rhs,ratio");
}

TEST(MomentGrowth, ConstantIsExplicit) {
  EXPECT_NEAR(log_moment_constant(0, 0.3), 0.3, 1e-15);
  EXPECT_NEAR(log_moment_constant(2, 0.1), std::log(2.0) + 6 * std::log(3.0) + 8.1, 1e-13);
}

TEST(LemmaSuite, DefaultSmallConfigurationPasses) {
  const SuiteReport r = lemma_suite(small_config(3, 3), 1, 3);
  EXPECT_TRUE(r.pass()) << r.csv();
  EXPECT_GE(r.checks.size(), 15u);
}

TEST(LemmaSuite, FreeModelResidualsAreTiny) {
  const SuiteReport r = lemma_suite(blab::testing::free_config(3, 4), 2, 2);
  EXPECT_TRUE(r.pass());
  for (const auto& c : r.checks)
    if (c.name.rfind("decomposition", 0) == 0) EXPECT_LE(c.value, 1e-13);
}

TEST(LemmaSuite, TwentySeeds) {
  const ModelConfig c = small_config(3, 4);
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) passed += lemma_suite(c, seed, 1, 3).pass();
  EXPECT_EQ(passed, 20);
}
