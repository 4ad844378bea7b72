#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <fairdyn/error.hpp>
#include <fairdyn/population.hpp>

#include "oracles.hpp"

using namespace fairdyn;

namespace {

// Bin k of n holds the Beta mass on [k/n, (k+1)/n], placed at the bin midpoint.
std::vector<HistogramBin> discretize(double mu, double c, int n) {
  std::vector<HistogramBin> bins;
  const double a = c * mu;
  const double b = c * (1.0 - mu);
  double prev = 0.0;
  for (int k = 0; k < n; ++k) {
    const double hi = (k + 1.0) / n;
    const double cdf = k + 1 == n ? 1.0 : boost::math::ibeta(a, b, hi);
    bins.push_back({(k + 0.5) / n, cdf - prev});
    prev = cdf;
  }
  return bins;
}

}  // namespace

TEST(PopulationState, Validation) {
  EXPECT_NO_THROW((PopulationState{0.3, 2.0}.validate()));
  EXPECT_THROW((PopulationState{0.0, 2.0}.validate()), DomainError);
  EXPECT_THROW((PopulationState{1.0, 2.0}.validate()), DomainError);
  EXPECT_THROW((PopulationState{0.5, 0.0}.validate()), DomainError);
  EXPECT_THROW((PopulationState{0.5, std::nan("")}.validate()), DomainError);
  const PopulationState s{0.25, 4.0};
  EXPECT_DOUBLE_EQ(s.a(), 1.0);
  EXPECT_DOUBLE_EQ(s.b(), 3.0);
}

TEST(ClampMean, StaysInsideUnitInterval) {
  EXPECT_EQ(clamp_mean(0.0), kMeanFloor);
  EXPECT_EQ(clamp_mean(-2.0), kMeanFloor);
  EXPECT_EQ(clamp_mean(1.0), 1.0 - kMeanFloor);
  EXPECT_EQ(clamp_mean(0.4), 0.4);
}

TEST(FitBeta, DiscretizedBeta) {
  const auto fit = fit_beta_from_histogram(discretize(0.7, 3.0, 200));
  EXPECT_NEAR(fit.mu, 0.7, 0.005);
  EXPECT_NEAR(fit.c, 3.0, 0.1);
}

TEST(FitBeta, ConcentratedPairGivesLargeShape) {
  for (double d : {0.1, 0.01, 0.001}) {
    const std::vector<HistogramBin> bins = {{0.5 - d, 1.0}, {0.5, 0.0}, {0.5 + d, 1.0}};
    const auto fit = fit_beta_from_histogram(bins);
    EXPECT_NEAR(fit.mu, 0.5, 1e-15);
    // var = d², so c = 0.25/d² − 1.
    EXPECT_NEAR(fit.c, 0.25 / (d * d) - 1.0, 1e-6 / (d * d));
  }
}

TEST(FitBeta, UniformWeights) {
  std::vector<HistogramBin> bins;
  for (int k = 0; k < 1000; ++k) bins.push_back({(k + 0.5) / 1000.0, 1.0});
  const auto fit = fit_beta_from_histogram(bins);
  EXPECT_NEAR(fit.mu, 0.5, 1e-12);
  EXPECT_NEAR(fit.c, 2.0, 1e-4);
}

TEST(FitBeta, MeanEqualsHistogramMean) {
  const auto bins = discretize(0.37, 6.0, 73);
  double w = 0.0, m = 0.0;
  for (const auto& b : bins) {
    w += b.weight;
    m += b.weight * b.center;
  }
  EXPECT_NEAR(fit_beta_from_histogram(bins).mu, m / w, 1e-15);
}

TEST(FitBeta, ScaleInvariantInWeights) {
  const auto bins = discretize(0.62, 4.5, 120);
  const auto ref = fit_beta_from_histogram(bins);
  for (double k : {0.001, 2.0, 1024.0, 3.7e6}) {
    auto scaled = bins;
    for (auto& b : scaled) b.weight *= k;
    const auto fit = fit_beta_from_histogram(scaled);
    EXPECT_NEAR(fit.mu, ref.mu, 1e-14);
    EXPECT_NEAR(fit.c, ref.c, 1e-11 * ref.c);
  }
}

TEST(FitBeta, RecoversGridWithinTwoPercent) {
  for (double mu : {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}) {
    for (double c : {1.0, 2.0, 5.0, 10.0}) {
      const auto fit = fit_beta_from_histogram(discretize(mu, c, 500));
      EXPECT_LE(std::fabs(fit.mu - mu) / mu, 0.02) << "mu=" << mu << " c=" << c;
      EXPECT_LE(std::fabs(fit.c - c) / c, 0.02) << "mu=" << mu << " c=" << c;
    }
  }
}

TEST(FitBeta, RejectsDegenerateHistograms) {
  const std::vector<HistogramBin> two = {{0.2, 1.0}, {0.8, 1.0}};
  EXPECT_THROW(fit_beta_from_histogram(two), DomainError);
  const std::vector<HistogramBin> spike = {{0.2, 0.0}, {0.5, 3.0}, {0.8, 0.0}};
  EXPECT_THROW(fit_beta_from_histogram(spike), DegenerateError);
  // All mass at the extremes: var = μ(1 − μ).
  const std::vector<HistogramBin> ends = {{0.0, 1.0}, {0.5, 0.0}, {1.0, 1.0}};
  EXPECT_THROW(fit_beta_from_histogram(ends), DegenerateError);
  const std::vector<HistogramBin> empty = {{0.2, 0.0}, {0.5, 0.0}, {0.8, 0.0}};
  EXPECT_THROW(fit_beta_from_histogram(empty), DegenerateError);
  const std::vector<HistogramBin> negative = {{0.2, 1.0}, {0.5, -1.0}, {0.8, 1.0}};
  EXPECT_THROW(fit_beta_from_histogram(negative), DomainError);
  const std::vector<HistogramBin> outside = {{-0.2, 1.0}, {0.5, 1.0}, {0.8, 1.0}};
  EXPECT_THROW(fit_beta_from_histogram(outside), DomainError);
}

TEST(EqualizeShapes, AveragesShapes) {
  const std::vector<PopulationState> in = {{0.6, 2.0}, {0.8, 4.0}};
  const auto out = equalize_shapes(in);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].mu, 0.6);
  EXPECT_EQ(out[1].mu, 0.8);
  EXPECT_EQ(out[0].c, 3.0);
  EXPECT_EQ(out[1].c, 3.0);
  EXPECT_TRUE(shared_shape(out));
  EXPECT_FALSE(shared_shape(in));
}

TEST(EqualizeShapes, IdentityCases) {
  const std::vector<PopulationState> one = {{0.4, 7.0}};
  EXPECT_EQ(equalize_shapes(one), one);
  const std::vector<PopulationState> same = {{0.5, 3.0}, {0.5, 3.0}};
  EXPECT_EQ(equalize_shapes(same), same);
  EXPECT_THROW(equalize_shapes(std::vector<PopulationState>{}), DomainError);
}
