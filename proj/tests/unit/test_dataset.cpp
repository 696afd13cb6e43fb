#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "stabaaa/dataset.hpp"
#include "stabaaa/errors.hpp"

using namespace stabaaa;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TEST(LoadDataset, ConvertsHertzToRadPerSecond) {
  std::istringstream in("freq,re,im\n1,1.0,0.0\n2,0.5,-0.5\n");
  const FrequencyDataset ds = load_dataset(in, FrequencyUnit::kHertz);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_DOUBLE_EQ(ds.freqs()[0], kTwoPi);
  EXPECT_DOUBLE_EQ(ds.freqs()[1], 2 * kTwoPi);
  EXPECT_EQ(ds.values()[1], cplx(0.5, -0.5));
}

TEST(LoadDataset, KeepsRadPerSecond) {
  std::istringstream in("freq,re,im\n3,1,2\n");
  const FrequencyDataset ds = load_dataset(in, FrequencyUnit::kRadPerSecond);
  EXPECT_DOUBLE_EQ(ds.freqs()[0], 3.0);
  EXPECT_EQ(ds.values()[0], cplx(1.0, 2.0));
}

TEST(LoadDataset, RejectsZeroFrequency) {
  std::istringstream in("freq,re,im\n0,1,0\n1,1,0\n");
  EXPECT_THROW(load_dataset(in, FrequencyUnit::kHertz), ValidationError);
}

TEST(LoadDataset, RejectsMalformedRow) {
  std::istringstream in("1,1,0\n2,abc,0\n");
  EXPECT_THROW(load_dataset(in, FrequencyUnit::kHertz), ValidationError);
}

TEST(LoadDataset, RejectsDuplicateFrequency) {
  std::istringstream in("1,1,0\n1,2,0\n");
  EXPECT_THROW(load_dataset(in, FrequencyUnit::kHertz), ValidationError);
}

TEST(LoadDataset, WriteReadRoundTripIsExact) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  std::vector<double> f;
  std::vector<cplx> h;
  for (int i = 0; i < 50; ++i) {
    f.push_back(u(rng));
    h.emplace_back(u(rng) - 5.0, u(rng) - 5.0);
  }
  const FrequencyDataset ds = FrequencyDataset::from_samples(f, h);
  std::stringstream io;
  write_dataset(io, ds, FrequencyUnit::kRadPerSecond);
  const FrequencyDataset back = load_dataset(io, FrequencyUnit::kRadPerSecond);
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back.freqs()[i], ds.freqs()[i]);
    EXPECT_EQ(back.values()[i], ds.values()[i]);
  }
}

TEST(FromSamples, SortsByFrequency) {
  const FrequencyDataset ds = FrequencyDataset::from_samples({3.0, 1.0, 2.0}, {3.0, 1.0, 2.0});
  EXPECT_EQ(ds.freqs(), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(ds.values()[0], cplx(1.0));
}

TEST(FromSamples, RejectsNonFinite) {
  EXPECT_THROW(FrequencyDataset::from_samples({1.0}, {cplx(std::nan(""), 0.0)}), ValidationError);
  EXPECT_THROW(FrequencyDataset::from_samples({}, {}), ValidationError);
  EXPECT_THROW(FrequencyDataset::from_samples({1.0, 2.0}, {1.0}), ValidationError);
}

TEST(Normalize, SinglePoint) {
  const FrequencyDataset ds = FrequencyDataset::from_samples({kTwoPi * 1e9}, {cplx(3.0, 4.0)});
  const NormalizedDataset n = normalize(ds);
  EXPECT_NEAR(n.data.freqs()[0], kTwoPi, 1e-12);
  EXPECT_NEAR(std::abs(n.data.values()[0] - cplx(0.6, 0.8)), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(n.record.f_max, 1e9);
  EXPECT_DOUBLE_EQ(n.record.h_max, 5.0);
}

TEST(Normalize, RandomDataMaxima) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> f;
  std::vector<cplx> h;
  for (int i = 0; i < 100; ++i) {
    f.push_back(1.0 + 1000.0 * u(rng));
    h.emplace_back(10 * u(rng) - 5, 10 * u(rng) - 5);
  }
  const FrequencyDataset ds = FrequencyDataset::from_samples(f, h);
  const NormalizedDataset n = normalize(ds);
  double hmax = 0.0;
  for (const cplx& v : n.data.values()) hmax = std::max(hmax, std::abs(v));
  EXPECT_NEAR(hmax, 1.0, 1e-15);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_NEAR(n.data.freqs()[i] * n.record.f_max, ds.freqs()[i], 4e-16 * ds.freqs()[i]);
  }
  const FrequencyDataset back = denormalize(n.data, n.record);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_NEAR(std::abs(back.values()[i] - ds.values()[i]), 0.0, 1e-14);
  }
}

TEST(Normalize, AllZeroIsDegenerate) {
  const FrequencyDataset ds = FrequencyDataset::from_samples({1.0, 2.0}, {0.0, 0.0});
  EXPECT_THROW(normalize(ds), DegenerateDataError);
}

TEST(ErrorMetrics, ExactModelGivesZero) {
  const FrequencyDataset ds = FrequencyDataset::from_samples({1.0, 2.0}, {cplx(1, 1), cplx(2, 0)});
  const ErrorReport e = error_metrics(ds.values(), ds);
  EXPECT_EQ(e.e_inf, 0.0);
  EXPECT_EQ(e.e_2, 0.0);
  EXPECT_EQ(e.e_rms, 0.0);
}

TEST(ErrorMetrics, ZeroModelOnOnes) {
  const FrequencyDataset ds = FrequencyDataset::from_samples({1.0, 2.0, 3.0, 4.0}, {1.0, 1.0, 1.0, 1.0});
  const ErrorReport e = error_metrics([](cplx) { return cplx(0.0); }, ds);
  EXPECT_DOUBLE_EQ(e.e_inf, 1.0);
  EXPECT_DOUBLE_EQ(e.e_2, 2.0);
  EXPECT_DOUBLE_EQ(e.e_rms, 1.0);
}

}  // namespace
