#include <gtest/gtest.h>

#include <random>

#include "stabaaa/errors.hpp"
#include "stabaaa/loewner.hpp"
#include "support/synthetic.hpp"

using namespace stabaaa;
using namespace stabaaa::testing;

namespace {

SampleSet samples_of(const auto& h, const std::vector<double>& f) {
  SampleSet s;
  s.freqs = f;
  for (double x : f) s.values.push_back(h(cplx(0.0, x)));
  return s;
}

TEST(LoewnerPair, ConstantDataGivesZeroL) {
  const auto one = [](cplx) { return cplx(1.0); };
  const LoewnerPair p = loewner_pair(samples_of(one, {1.0, 3.0}), samples_of(one, {2.0, 4.0}));
  EXPECT_EQ(p.L.norm(), 0.0);
}

TEST(LoewnerPair, IdentityDataGivesOnes) {
  const auto id = [](cplx s) { return s; };
  const LoewnerPair p = loewner_pair(samples_of(id, {1.0, 3.0}), samples_of(id, {2.0, 4.0}));
  EXPECT_NEAR((p.L - Eigen::MatrixXcd::Ones(2, 2)).norm(), 0.0, 1e-15);
}

TEST(LoewnerPair, EntriesMatchDividedDifferences) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  SampleSet left, right;
  for (int i = 0; i < 6; ++i) {
    left.freqs.push_back(0.1 + 0.3 * i);
    left.values.emplace_back(n(rng), n(rng));
    right.freqs.push_back(0.25 + 0.3 * i);
    right.values.emplace_back(n(rng), n(rng));
  }
  const LoewnerPair p = loewner_pair(left, right);
  for (int i = 0; i < 6; ++i) {
    for (int l = 0; l < 6; ++l) {
      const cplx mu(0.0, left.freqs[i]), eta(0.0, right.freqs[l]);
      const cplx L = (left.values[i] - right.values[l]) / (mu - eta);
      const cplx Ls = (mu * left.values[i] - eta * right.values[l]) / (mu - eta);
      EXPECT_LE(std::abs(p.L(i, l) - L), 1e-15 * std::abs(L));
      EXPECT_LE(std::abs(p.Ls(i, l) - Ls), 1e-15 * std::abs(Ls));
    }
  }
}

TEST(LoewnerPair, RejectsSharedPoint) {
  const auto one = [](cplx) { return cplx(1.0); };
  EXPECT_THROW(loewner_pair(samples_of(one, {1.0}), samples_of(one, {1.0})), ValidationError);
}

TEST(LoewnerRom, FirstOrderSystem) {
  const auto h = [](cplx s) { return 1.0 / (s + 1.0); };
  const SampleSet left = samples_of(h, {0.1, 0.5, 1.0, 4.0}), right = samples_of(h, {0.2, 0.7, 2.0, 8.0});
  const LoewnerRom rom = loewner_rom(loewner_pair(left, right), 1e-10);
  EXPECT_EQ(rom.order, 1);
  for (const SampleSet* set : {&left, &right}) {
    for (std::size_t i = 0; i < set->freqs.size(); ++i) {
      EXPECT_NEAR(std::abs(rom.realization.transfer(cplx(0.0, set->freqs[i])) - set->values[i]), 0.0, 1e-8);
    }
  }
}

TEST(LoewnerRom, ConstantDataIsDegenerate) {
  const auto c = [](cplx) { return cplx(2.0); };
  const LoewnerRom rom = loewner_rom(loewner_pair(samples_of(c, {1.0, 3.0}), samples_of(c, {2.0, 4.0})));
  EXPECT_TRUE(rom.degenerate);
}

TEST(LoewnerFit, RecoversOrderSixSystem) {
  std::mt19937_64 rng(12);
  SystemShape sh;
  sh.pairs = 3;
  sh.d_scale = 0.0;
  const PoleResidueSystem sys = random_stable_system(rng, sh);
  const FrequencyDataset ds = sample(sys, logspace(0.02, 2.0, 40));
  LoewnerFitOptions opts;
  opts.rank_tol = 1e-9;
  const LoewnerRom rom = loewner_fit(ds, opts);
  EXPECT_EQ(rom.order, 6);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_NEAR(std::abs(rom.realization.transfer(cplx(0.0, ds.freqs()[i])) - ds.values()[i]), 0.0, 1e-7);
  }
}

TEST(RealQuasiLoewner, Shape) {
  SampleSet sup, test;
  for (int i = 0; i < 3; ++i) {
    sup.freqs.push_back(1.0 + i);
    sup.values.emplace_back(1.0, 0.0);
  }
  for (int i = 0; i < 7; ++i) {
    test.freqs.push_back(0.5 + i);
    test.values.emplace_back(0.5, 0.0);
  }
  const RealQuasiLoewner q = real_quasi_loewner(sup, test);
  EXPECT_EQ(q.matrix.rows(), 14);
  EXPECT_EQ(q.matrix.cols(), 6);
}

TEST(RealQuasiLoewner, RealDataZeroPattern) {
  SampleSet sup{{1.0, 2.0}, {cplx(1.0), cplx(3.0)}}, test{{0.5, 1.5, 2.5}, {cplx(2.0), cplx(-1.0), cplx(0.5)}};
  const RealQuasiLoewner q = real_quasi_loewner(sup, test);
  for (Eigen::Index l = 0; l < 3; ++l) {
    for (Eigen::Index i = 0; i < 2; ++i) {
      EXPECT_EQ(q.matrix(l, 2 * i), 0.0);
      EXPECT_EQ(q.matrix(l + 3, 2 * i + 1), 0.0);
    }
  }
}

TEST(RealQuasiLoewner, MatchesLinearizedError) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 1.0);
  SampleSet sup, test;
  for (int i = 0; i < 4; ++i) {
    sup.freqs.push_back(0.2 + 0.5 * i);
    sup.values.emplace_back(n(rng), n(rng));
  }
  for (int i = 0; i < 9; ++i) {
    test.freqs.push_back(0.1 + 0.23 * i);
    test.values.emplace_back(n(rng), n(rng));
  }
  const RealQuasiLoewner q = real_quasi_loewner(sup, test);
  Eigen::VectorXd x(8);
  for (int i = 0; i < 8; ++i) x(i) = n(rng);
  const Eigen::VectorXd lx = q.matrix * x;
  for (int l = 0; l < 9; ++l) {
    const cplx s(0.0, test.freqs[l]);
    cplx e = 0.0;
    for (int i = 0; i < 4; ++i) {
      const cplx w(x(2 * i), x(2 * i + 1)), jl(0.0, sup.freqs[i]);
      e += (test.values[l] - sup.values[i]) / (s - jl) * w +
           (test.values[l] - std::conj(sup.values[i])) / (s + jl) * std::conj(w);
    }
    EXPECT_NEAR(lx(l), e.real(), 1e-12);
    EXPECT_NEAR(lx(l + 9), e.imag(), 1e-12);
  }
}

}  // namespace
