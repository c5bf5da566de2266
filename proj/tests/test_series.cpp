#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tsdict/series.hpp"

using namespace tsdict;

TEST_CASE("z_normalize of [1, 2, 3] uses the population std") {
  const std::vector<double> v{1, 2, 3};
  const auto z = z_normalize(v);
  // (x - 2) / sqrt(2/3)
  const double expected = 1.0 / std::sqrt(2.0 / 3.0);
  CHECK(z[0] == doctest::Approx(-expected).epsilon(1e-15));
  CHECK(z[1] == doctest::Approx(0.0));
  CHECK(z[2] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(expected == doctest::Approx(1.224744871391589));
}

TEST_CASE("z_normalize of a flat input is all zeros") {
  const std::vector<double> v{5, 5, 5, 5};
  CHECK(z_normalize(v) == std::vector<double>{0, 0, 0, 0});
  CHECK_THROWS_AS(z_normalize(std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(z_normalize(v, 0.0), DomainError);
}

TEST_CASE("z_normalize is idempotent and affine invariant") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto x = oracle::gaussian(64, seed);
    const auto z = z_normalize(x);
    const auto zz = z_normalize(z);
    std::vector<double> affine(x.size());
    const double a = 0.1 + static_cast<double>(seed);
    const double b = -3.0 * static_cast<double>(seed);
    for (std::size_t i = 0; i < x.size(); ++i) affine[i] = a * x[i] + b;
    const auto za = z_normalize(affine);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(std::abs(zz[i] - z[i]) <= 1e-12);
      CHECK(std::abs(za[i] - z[i]) <= 1e-9);
    }
  }
}

TEST_CASE("sliding_mean_std small example") {
  const std::vector<double> t{1, 2, 3, 4};
  const auto s = sliding_mean_std(t, 2);
  CHECK(s.means == std::vector<double>{1.5, 2.5, 3.5});
  for (double sd : s.stds) CHECK(sd == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sliding_mean_std of a constant series has zero stds") {
  const std::vector<double> t(300, 0.1);
  for (std::size_t m : {1, 4, 17, 300}) {
    const auto s = sliding_mean_std(t, m);
    for (double sd : s.stds) CHECK(sd == 0.0);
  }
}

TEST_CASE("sliding_mean_std detects exactly flat stretches inside a noisy series") {
  auto t = oracle::gaussian(5000, 3);
  for (std::size_t i = 2000; i < 2400; ++i) t[i] = 0.75;
  const auto s = sliding_mean_std(t, 100);
  for (std::size_t i = 2000; i + 100 <= 2400; ++i) CHECK(s.stds[i] == 0.0);
  CHECK(s.stds[1999] > 0.0);
  CHECK(s.stds[2301] > 0.0);
}

TEST_CASE("sliding_mean_std matches per-window brute force") {
  const auto t = oracle::gaussian(1000, 7);
  const auto s = sliding_mean_std(t, 50);
  REQUIRE(s.means.size() == 951);
  for (std::size_t i = 0; i < s.means.size(); ++i) {
    const auto ref = oracle::window_moments(t, i, 50);
    CHECK(std::abs(s.means[i] - ref.mean) <= 1e-9);
    CHECK(std::abs(s.stds[i] - ref.sd) <= 1e-9);
  }
  CHECK_THROWS_AS(sliding_mean_std(t, 1001), DomainError);
  CHECK_THROWS_AS(sliding_mean_std(t, 0), DomainError);
}

TEST_CASE("sliding_mean_std stays accurate over 1e6 points with an offset") {
  auto t = oracle::random_walk(1'000'000, 11);
  for (auto& x : t) x = x * 0.01 + 1.0;
  const std::size_t m = 128;
  const auto s = sliding_mean_std(t, m);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.means.size(); i += 997) {
    const auto ref = oracle::window_moments(t, i, m);
    worst = std::max({worst, std::abs(s.means[i] - ref.mean), std::abs(s.stds[i] - ref.sd)});
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("TimeSeries and MultiAxisSeries invariants") {
  CHECK_THROWS_AS(TimeSeries(std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(TimeSeries(std::vector<double>{1.0, NAN}), DomainError);
  CHECK_THROWS_AS(TimeSeries(std::vector<double>{1.0, INFINITY}), DomainError);
  CHECK_THROWS_AS(TimeSeries(std::vector<double>{1.0}, 0.0), DomainError);

  std::map<Axis, TimeSeries> axes;
  axes.emplace(Axis::X, TimeSeries({1, 2, 3}));
  axes.emplace(Axis::Z, TimeSeries({1, 2}));
  CHECK_THROWS_AS(MultiAxisSeries{axes}, DomainError);
  CHECK_THROWS_AS(MultiAxisSeries(std::map<Axis, TimeSeries>{}), DomainError);

  std::map<Axis, TimeSeries> ok;
  ok.emplace(Axis::Z, TimeSeries({4, 5, 6}));
  ok.emplace(Axis::X, TimeSeries({1, 2, 3}));
  const MultiAxisSeries s(ok);
  CHECK(s.size() == 3);
  CHECK(s.axis_ids() == std::vector<Axis>{Axis::X, Axis::Z});
  CHECK_THROWS_AS(s.axis(Axis::Y), DomainError);
}

TEST_CASE("labels normalize and reject same-class overlap") {
  std::vector<LabelInterval> labels{{10, 20, "a"}, {0, 5, "b"}, {15, 30, "b"}};
  const auto n = normalize_labels(labels);
  CHECK(n.front().start_index == 0);
  labels.push_back({20, 25, "a"});
  CHECK_THROWS_AS(normalize_labels(labels), DomainError);
  CHECK_THROWS_AS(normalize_labels({{5, 4, "a"}}), DomainError);

  const auto mask = class_mask(n, "b", 32);
  CHECK(mask[0] == 1);
  CHECK(mask[6] == 0);
  CHECK(mask[15] == 1);
  CHECK(mask[31] == 0);
}

TEST_CASE("axis parsing") {
  CHECK(parse_axis_list("Z,x") == std::vector<Axis>{Axis::X, Axis::Z});
  CHECK_THROWS_AS(parse_axis_list("X,X"), DomainError);
  CHECK_THROWS_AS(parse_axis("W"), DomainError);
  CHECK(exclusion_half_width(100) == 50);
  CHECK(exclusion_half_width(101) == 51);
}
