#include <gtest/gtest.h>

#include "enlarge/checks.hpp"
#include "enlarge/initial.hpp"
#include "enlarge/na1.hpp"
#include "enlarge/testing/random.hpp"
#include "fixtures.hpp"

using namespace enlarge;
using fixtures::path;
using fixtures::q;
using fixtures::qpath;

namespace {

const StoppingMap kNever({kInfinity, kInfinity});

Signal w2_signal() { return make_signal(fixtures::w2_space(), {"a", "b"}, {0, 1}); }

Signal constant_signal(const FinSpace& space) {
  return make_signal(space, {"c"}, std::vector<std::size_t>(space.atom_count(), 0));
}

ProcessPath ones(Time horizon, std::size_t n) {
  return ProcessPath::constant(Measurability::adapted, horizon, n, Rational(1));
}

}  // namespace

TEST(Signal, GammaIsTheLawOfJ) {
  const Signal s = w2_signal();
  EXPECT_EQ(s.gamma, (std::vector<Rational>{q("1/2"), q("1/2")}));
  EXPECT_NO_THROW(make_signal(fixtures::w2_space(), {"a", "b"}, {0, 1}, std::vector<Rational>{q("1/2"), q("1/2")}));
}

TEST(Signal, RejectsInconsistentGamma) {
  EXPECT_THROW(make_signal(fixtures::w2_space(), {"a", "b"}, {0, 1}, std::vector<Rational>{q("1/3"), q("2/3")}),
               InputError);
  EXPECT_THROW(make_signal(fixtures::w2_space(), {"a", "b", "c"}, {0, 1}), InputError);
}

TEST(DensitySystem, W2) {
  const DensitySystem ds = density_system(fixtures::w2_space(), w2_signal());
  ASSERT_EQ(ds.p.size(), 2u);
  EXPECT_EQ(ds.p[0], path({{1, 1}, {2, 0}}));
  EXPECT_EQ(ds.p[1], path({{1, 1}, {0, 2}}));
}

TEST(DensitySystem, ConstantSignal) {
  const FinSpace w1 = fixtures::w1_space();
  const DensitySystem ds = density_system(w1, constant_signal(w1));
  ASSERT_EQ(ds.p.size(), 1u);
  EXPECT_EQ(ds.p[0], ones(2, 2));
}

TEST(DensitySystem, RejectsZeroGammaForTakenLabel) {
  Signal s = w2_signal();
  s.gamma[0] = 0;
  EXPECT_THROW(density_system(fixtures::w2_space(), s), InputError);
}

TEST(EtaFamily, W2) {
  const FinSpace w2 = fixtures::w2_space();
  const Signal s = w2_signal();
  const DensitySystem ds = density_system(w2, s);
  const EtaFamily fam = eta_family(ds, w2, s.label_of);
  EXPECT_EQ(fam.per_label[0].eta, StoppingMap({kInfinity, 1}));
  EXPECT_EQ(fam.per_label[1].eta, StoppingMap({1, kInfinity}));
  EXPECT_EQ(fam.per_label[0].compensator, qpath({{"0", "0"}, {"1/2", "1/2"}}));
  EXPECT_EQ(fam.per_label[1].compensator, qpath({{"0", "0"}, {"1/2", "1/2"}}));
  EXPECT_EQ(fam.per_label[0].asset, path({{1, 1}, {2, 0}}));
  EXPECT_EQ(fam.per_label[1].asset, path({{1, 1}, {0, 2}}));
  EXPECT_EQ(fam.composed, path({{1, 1}, {2, 2}}, Measurability::ambient));
  for (const auto& le : fam.per_label) EXPECT_TRUE(classify(le.asset, w2).is_martingale());
}

TEST(EtaFamily, W2CompensatorIdentity) {
  const FinSpace w2 = fixtures::w2_space();
  const Signal s = w2_signal();
  const DensitySystem ds = density_system(w2, s);
  const EtaFamily fam = eta_family(ds, w2, s.label_of);
  Rational lhs = 0;
  for (std::size_t a = 0; a < 2; ++a) lhs += w2.prob(a) * fam.per_label[s.label_of[a]].compensator.at(1, a);
  EXPECT_EQ(lhs, q("1/2"));
  // rhs: 1/2 (1/2 * p^a_0) + 1/2 (1/2 * p^b_0)
  Rational rhs = 0;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t a = 0; a < 2; ++a)
      if (fam.per_label[x].eta.is_finite(a)) rhs += ds.gamma[x] * w2.prob(a) * ds.p[x].at(0, a);
  EXPECT_EQ(rhs, lhs);
}

TEST(EtaFamily, ConstantSignalNeverJumps) {
  const FinSpace w1 = fixtures::w1_space();
  const Signal s = constant_signal(w1);
  const EtaFamily fam = eta_family(density_system(w1, s), w1, s.label_of);
  EXPECT_EQ(fam.per_label[0].eta, kNever);
  EXPECT_EQ(fam.composed, ones(2, 2).with_tag(Measurability::ambient));
}

TEST(EnlargeInitial, W2RevealsTheSignalAtTimeZero) {
  const GMarket gm = enlarge_initial(fixtures::w2_space(), w2_signal(), {});
  EXPECT_EQ(gm.enlarged.partition(0), Partition::discrete(2));
  EXPECT_EQ(gm.enlarged.partition(1), Partition::discrete(2));
}

TEST(EnlargeInitial, ConstantOrF0MeasurableSignalKeepsF) {
  const FinSpace w1 = fixtures::w1_space();
  const GMarket gm = enlarge_initial(w1, constant_signal(w1), {});
  EXPECT_EQ(gm.enlarged.filtration(), w1.filtration());

  const FinSpace early({"w1", "w2"}, {q("1/2"), q("1/2")}, {Partition::discrete(2), Partition::discrete(2)});
  const GMarket gm2 = enlarge_initial(early, make_signal(early, {"a", "b"}, {0, 1}), {});
  EXPECT_EQ(gm2.enlarged.filtration(), early.filtration());
}

TEST(LiftDeflatorInitial, W2ConstantAsset) {
  const FinSpace w2 = fixtures::w2_space();
  const Signal s = w2_signal();
  const DensitySystem ds = density_system(w2, s);
  const EtaFamily fam = eta_family(ds, w2, s.label_of);
  const GMarket gm = enlarge_initial(w2, s, {{"S", ones(1, 2)}});
  const ProcessPath w = lift_deflator_initial(ones(1, 2), ds, fam, gm, s.labels);
  EXPECT_EQ(w, ones(1, 2).with_tag(Measurability::ambient));
  EXPECT_TRUE(classify(w, gm.enlarged).is_martingale());
  EXPECT_TRUE(verify_deflator(w, gm.traded, gm.enlarged));
}

TEST(LiftDeflatorInitial, ConstantSignalReturnsY) {
  const FinSpace w1 = fixtures::w1_space();
  const Signal s = constant_signal(w1);
  const DensitySystem ds = density_system(w1, s);
  const EtaFamily fam = eta_family(ds, w1, s.label_of);
  const ProcessPath x = path({{1, 1}, {1, 1}, {0, 2}});
  const ProcessPath y = path({{1, 1}, {1, 1}, {1, 1}});
  const GMarket gm = enlarge_initial(w1, s, {{"S", x}});
  EXPECT_EQ(lift_deflator_initial(y, ds, fam, gm, s.labels), y.with_tag(Measurability::ambient));
}

TEST(LiftDeflatorInitial, W2AssetJumpingAtEtaIsRejected) {
  const FinSpace w2 = fixtures::w2_space();
  const Signal s = w2_signal();
  const DensitySystem ds = density_system(w2, s);
  const EtaFamily fam = eta_family(ds, w2, s.label_of);
  const GMarket gm = enlarge_initial(w2, s, {{"S", fam.per_label[0].asset}});
  try {
    lift_deflator_initial(ones(1, 2), ds, fam, gm, s.labels);
    FAIL() << "expected a hypothesis error";
  } catch (const HypothesisError& e) {
    EXPECT_EQ(e.witness().label, std::optional<std::string>("a"));
    EXPECT_EQ(e.witness().time, 1u);
    EXPECT_EQ(e.witness().atoms, std::vector<std::size_t>{1});
  }
}

TEST(ExpInitCheck, Examples) {
  const FinSpace w2 = fixtures::w2_space();
  const Signal s = w2_signal();
  const DensitySystem ds = density_system(w2, s);
  const std::vector<std::vector<Rational>> one(2, std::vector<Rational>(2, Rational(1)));
  EXPECT_EQ(exp_init_check(ds, w2, s.label_of, one, 0), std::make_pair(Rational(1), Rational(1)));
  const EtaFamily fam = eta_family(ds, w2, s.label_of);
  const std::vector<std::vector<Rational>> f{fam.per_label[0].asset.row(1), fam.per_label[1].asset.row(1)};
  EXPECT_EQ(exp_init_check(ds, w2, s.label_of, f, 1), std::make_pair(Rational(2), Rational(2)));
}

TEST(ExpInitCheck, RejectsNonMeasurableF) {
  const FinSpace w2 = fixtures::w2_space();
  const Signal s = w2_signal();
  const std::vector<std::vector<Rational>> f{{Rational(0), Rational(1)}, {Rational(0), Rational(0)}};
  EXPECT_THROW(exp_init_check(density_system(w2, s), w2, s.label_of, f, 0), InputError);
}

TEST(EtaB, W2SingleLabelMatchesFamily) {
  const FinSpace w2 = fixtures::w2_space();
  const Signal s = w2_signal();
  const DensitySystem ds = density_system(w2, s);
  const EtaFamily fam = eta_family(ds, w2, s.label_of);
  const EtaBResult r = eta_B(ds, w2, s.label_of, {true, false});
  EXPECT_EQ(r.eta, fam.per_label[0].eta);
  EXPECT_EQ(r.asset, fam.per_label[0].asset);
  EXPECT_TRUE(classify(r.asset, w2).is_martingale());
  EXPECT_TRUE(is_nondecreasing(r.wealth));
  EXPECT_EQ(r.wealth, path({{0, 0}, {1, 0}}, Measurability::ambient));
  EXPECT_EQ(r.nonconstant_prob, q("1/2"));
}

TEST(EtaB, WholeLabelSetNeverJumps) {
  const FinSpace w2 = fixtures::w2_space();
  const Signal s = w2_signal();
  const EtaBResult r = eta_B(density_system(w2, s), w2, s.label_of, {true, true});
  EXPECT_EQ(r.martingale, ones(1, 2));
  EXPECT_EQ(r.eta, kNever);
}

TEST(EtaB, RejectsEmptySubset) {
  const FinSpace w2 = fixtures::w2_space();
  const Signal s = w2_signal();
  EXPECT_THROW(eta_B(density_system(w2, s), w2, s.label_of, {false, false}), InputError);
}

TEST(EquivalenceInitial, Examples) {
  const InitialEquivalence w2 = equivalence_report_initial(fixtures::w2_space(), w2_signal());
  EXPECT_EQ(w2.gamma_weighted_eta_prob, q("1/2"));
  EXPECT_FALSE(w2.one_over_pj_is_g_martingale);
  EXPECT_FALSE(w2.all_lifts_are_g_martingales);

  const FinSpace w1 = fixtures::w1_space();
  const InitialEquivalence c = equivalence_report_initial(w1, constant_signal(w1));
  EXPECT_EQ(c.gamma_weighted_eta_prob, 0);
  EXPECT_TRUE(c.one_over_pj_is_g_martingale);
  EXPECT_TRUE(c.all_lifts_are_g_martingales);
}

TEST(EtaUnderMeasure, Examples) {
  const FinSpace w2 = fixtures::w2_space();
  const Signal s = w2_signal();
  const std::vector<StoppingMap> base{StoppingMap({kInfinity, 1}), StoppingMap({1, kInfinity})};
  EXPECT_EQ(eta_family_under_measure(w2, s, {Rational(1), Rational(1)}), base);
  EXPECT_EQ(eta_family_under_measure(w2, s, {q("3/2"), q("1/2")}), base);
  EXPECT_THROW(eta_family_under_measure(w2, s, {Rational(2), Rational(0)}), InputError);
}

TEST(InitialIdentities, W2) {
  for (const auto& row : initial_identities(fixtures::w2_space(), w2_signal()))
    EXPECT_TRUE(row.pass) << row.name << ": " << row.lhs << " vs " << row.rhs;
}

// ---------------------------------------------------------------- properties

class RandomSignals : public ::testing::Test {
 protected:
  testkit::Rng rng{4242};

  std::pair<FinSpace, Signal> model(std::size_t max_atoms = 32, Time max_horizon = 6) {
    const FinSpace base = testkit::random_space(rng, max_atoms, max_horizon, 2, 1);
    Signal s = testkit::random_signal(rng, base);
    return {testkit::with_ambient_keys<std::size_t>(base, s.label_of), std::move(s)};
  }
};

TEST_F(RandomSignals, IdentityLedgerPasses) {
  int with_eta = 0;
  for (int i = 0; i < 150; ++i) {
    const auto [space, signal] = model();
    for (const auto& row : initial_identities(space, signal))
      ASSERT_TRUE(row.pass) << row.name << ": " << row.lhs << " vs " << row.rhs;
    with_eta += sgn(equivalence_report_initial(space, signal).gamma_weighted_eta_prob) > 0;
  }
  EXPECT_GT(with_eta, 20);
}

TEST_F(RandomSignals, ExpInitHoldsForRandomF) {
  for (int i = 0; i < 50; ++i) {
    const auto [space, signal] = model();
    const DensitySystem ds = density_system(space, signal);
    for (Time t = 0; t <= space.horizon(); ++t) {
      std::vector<std::vector<Rational>> f;
      for (std::size_t x = 0; x < ds.p.size(); ++x) f.push_back(testkit::random_adapted(rng, space, -5, 5).row(t));
      const auto [lhs, rhs] = exp_init_check(ds, space, signal.label_of, f, t);
      ASSERT_EQ(lhs, rhs);
    }
  }
}

TEST_F(RandomSignals, SupermartingaleFamiliesLift) {
  for (int i = 0; i < 100; ++i) {
    const auto [space, signal] = model();
    const DensitySystem ds = density_system(space, signal);
    const FinSpace g = initial_filtration(space, signal);
    std::vector<ProcessPath> family;
    for (std::size_t x = 0; x < ds.p.size(); ++x) family.push_back(testkit::random_supermartingale(rng, space));
    const ProcessPath lifted = ProcessPath::generate(
        Measurability::ambient, space.horizon(), space.atom_count(), [&](Time t, std::size_t a) {
          const std::size_t x = signal.label_of[a];
          return Rational(family[x].at(t, a) / ds.p[x].at(t, a));
        });
    ASSERT_TRUE(classify(lifted, g).is_supermartingale());
  }
}

TEST_F(RandomSignals, MartingaleFamiliesVanishingAfterEtaLiftToMartingales) {
  for (int i = 0; i < 100; ++i) {
    const auto [space, signal] = model();
    const DensitySystem ds = density_system(space, signal);
    const FinSpace g = initial_filtration(space, signal);
    const Time horizon = space.horizon();
    std::vector<ProcessPath> family;
    for (std::size_t x = 0; x < ds.p.size(); ++x) {
      // X^x_t = E[xi 1{eta^x = oo} | F_t] with xi >= 0; it is 0 from eta^x on.
      const StoppingMap eta = jump_to_zero(ds.p[x]);
      const ProcessPath xi = testkit::random_adapted(rng, space, 0, 4);
      std::vector<Rational> terminal(space.atom_count());
      for (std::size_t a = 0; a < terminal.size(); ++a)
        terminal[a] = eta.is_finite(a) ? Rational(0) : xi.at(horizon, a);
      std::vector<std::vector<Rational>> v(horizon + 1);
      for (Time t = 0; t <= horizon; ++t) v[t] = cond_exp(terminal, t, space);
      family.emplace_back(Measurability::adapted, std::move(v));
    }
    const ProcessPath lifted = ProcessPath::generate(
        Measurability::ambient, horizon, space.atom_count(), [&](Time t, std::size_t a) {
          const std::size_t x = signal.label_of[a];
          return Rational(family[x].at(t, a) / ds.p[x].at(t, a));
        });
    ASSERT_TRUE(classify(lifted, g).is_martingale());
  }
}

TEST_F(RandomSignals, DeflatorLiftOrGuard) {
  int lifted = 0, guarded = 0;
  for (int i = 0; i < 150; ++i) {
    const auto [space, signal] = model(24, 5);
    const DensitySystem ds = density_system(space, signal);
    const EtaFamily fam = eta_family(ds, space, signal.label_of);
    // Freeze S at the earliest eta^x on every atom half of the time.
    std::vector<Time> first(space.atom_count(), kInfinity);
    for (const auto& le : fam.per_label)
      for (std::size_t a = 0; a < first.size(); ++a) first[a] = std::min(first[a], le.eta[a]);
    const bool freeze = i % 2 == 0;
    const ProcessPath s = freeze ? testkit::random_martingale(rng, space, StoppingMap(first))
                                 : testkit::random_martingale(rng, space);
    const GMarket gm = enlarge_initial(space, signal, {{"S", s}});
    const ProcessPath y = ones(space.horizon(), space.atom_count());
    bool jumps = false;
    for (const auto& le : fam.per_label)
      for (std::size_t a = 0; a < space.atom_count(); ++a)
        if (le.eta.is_finite(a) && sgn(s.increment(le.eta[a], a)) != 0) jumps = true;
    if (jumps) {
      ASSERT_THROW(lift_deflator_initial(y, ds, fam, gm, signal.labels), HypothesisError);
      ++guarded;
    } else {
      const ProcessPath w = lift_deflator_initial(y, ds, fam, gm, signal.labels);
      ASSERT_EQ(w.at(0, 0), 1);
      ASSERT_TRUE(verify_deflator(w, gm.traded, gm.enlarged));
      ++lifted;
    }
  }
  EXPECT_GT(lifted, 20);
  EXPECT_GT(guarded, 5);
}

TEST_F(RandomSignals, EtaInvariantUnderEquivalentMeasures) {
  for (int i = 0; i < 10; ++i) {
    const auto [space, signal] = model(24, 5);
    const DensitySystem ds = density_system(space, signal);
    std::vector<StoppingMap> base;
    for (const auto& p : ds.p) base.push_back(jump_to_zero(p));
    for (int j = 0; j < 20; ++j)
      ASSERT_EQ(eta_family_under_measure(space, signal, testkit::random_density(rng, space)), base);
  }
}

TEST_F(RandomSignals, EtaOfWholeLabelSetIsInfinite) {
  for (int i = 0; i < 50; ++i) {
    const auto [space, signal] = model();
    const DensitySystem ds = density_system(space, signal);
    const EtaBResult r = eta_B(ds, space, signal.label_of, std::vector<bool>(ds.p.size(), true));
    ASSERT_EQ(r.eta, StoppingMap(std::vector<Time>(space.atom_count(), kInfinity)));
  }
}
