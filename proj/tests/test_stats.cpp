#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "fixtures.hpp"
#include "oracles/oracles.hpp"
#include "vscreen/error.hpp"
#include "vscreen/stats.hpp"

using namespace vscreen;
using namespace vscreen::stats;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected vscreen::Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("tail probabilities match high-precision oracles") {
  for (const auto& c : oracles::kStudentT)
    CHECK(student_t_two_tailed_p(c.stat, c.df1) == doctest::Approx(c.p).epsilon(1e-8));
  for (const auto& c : oracles::kFUpper)
    CHECK(f_upper_tail_p(c.stat, c.df1, c.df2) == doctest::Approx(c.p).epsilon(1e-8));
  for (const auto& c : oracles::kIncompleteBeta)
    CHECK(regularized_incomplete_beta(c.a, c.b, c.x) == doctest::Approx(c.value).epsilon(1e-10));
}

TEST_CASE("incomplete beta edges and symmetry") {
  CHECK(regularized_incomplete_beta(2, 3, 0) == 0.0);
  CHECK(regularized_incomplete_beta(2, 3, 1) == 1.0);
  for (double x : {0.1, 0.37, 0.5, 0.91})
    CHECK(regularized_incomplete_beta(3.5, 1.5, x) ==
          doctest::Approx(1.0 - regularized_incomplete_beta(1.5, 3.5, 1.0 - x)).epsilon(1e-12));
}

TEST_CASE("pearson fixture n = 8") {
  const std::span<const double> x(oracles::kPearsonX), y(oracles::kPearsonY);
  const auto r = pearson(x, y);
  CHECK(r.r == doctest::Approx(oracles::kPearsonR).epsilon(1e-12));
  CHECK(r.t_stat == doctest::Approx(oracles::kPearsonT).epsilon(1e-10));
  CHECK(r.p_two_tailed == doctest::Approx(oracles::kPearsonP).epsilon(1e-8));
  CHECK(r.df == 6);
  CHECK(r.n == 8);
}

TEST_CASE("pearson errors") {
  const std::vector<double> a{1, 2, 3}, b{1, 2}, flat{2, 2, 2}, two{1, 2};
  CHECK(code_of([&] { pearson(a, b); }) == ErrorCode::ShapeError);
  CHECK(code_of([&] { pearson(two, two); }) == ErrorCode::InsufficientSample);
  CHECK(code_of([&] { pearson(a, flat); }) == ErrorCode::ZeroVariance);
}

TEST_CASE("perfect correlation has p = 0 and finite reporting") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10};
  const auto r = pearson(a, b);
  CHECK(r.r == doctest::Approx(1.0));
  CHECK(r.p_two_tailed == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("point-biserial equals pearson on 0/1 coding") {
  CounterRng rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> g;
    std::vector<double> gd, y;
    for (int i = 0; i < 30; ++i) {
      const int v = rng.bernoulli(0.4) ? 1 : 0;
      g.push_back(v);
      gd.push_back(v);
      y.push_back(rng.normal() + 0.5 * v);
    }
    if (std::count(g.begin(), g.end(), 1) == 0 || std::count(g.begin(), g.end(), 0) == 0) continue;
    const auto pb = point_biserial(g, y);
    const auto pr = pearson(gd, y);
    CHECK(pb.r == doctest::Approx(pr.r).epsilon(1e-12));
    CHECK(pb.p_two_tailed == doctest::Approx(pr.p_two_tailed).epsilon(1e-10));
  }
}

TEST_CASE("point-biserial rejects non-binary codes") {
  const std::vector<int> g{0, 1, 2, 1};
  const std::vector<double> y{1, 2, 3, 4};
  CHECK(code_of([&] { point_biserial(g, y); }) == ErrorCode::ShapeError);
}

TEST_CASE("group fixture rebuilt from summary moments") {
  const auto valid = fixtures::valid_sensitivities();
  const auto& invalid = fixtures::kInvalidSensitivities;
  const auto sv = sample_stats(valid), si = sample_stats(invalid);
  CHECK(sv.mean == doctest::Approx(0.180).epsilon(1e-12));
  CHECK(*sv.sd == doctest::Approx(0.058).epsilon(1e-12));
  CHECK(si.mean == doctest::Approx(-0.19575));
  CHECK(*si.sd == doctest::Approx(0.403).epsilon(0.002));

  // Oracle: pooled SD from the moments.
  const double sp = std::sqrt((15 * 0.058 * 0.058 + 3 * *si.sd * *si.sd) / 18.0);
  const double d_oracle = (0.180 - si.mean) / sp;
  const double t_oracle = d_oracle * std::sqrt(16.0 * 4.0 / 20.0);
  CHECK(cohens_d(valid, invalid) == doctest::Approx(d_oracle).epsilon(1e-12));
  const auto t = pooled_t_test(valid, invalid);
  CHECK(t.t == doctest::Approx(t_oracle).epsilon(1e-12));
  CHECK(t.df == 18);
  CHECK(std::abs(cohens_d(valid, invalid) - 2.17) <= 0.01);
  CHECK(std::abs(t.t - 3.89) <= 0.01);
}

TEST_CASE("Welch t degrees of freedom") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10, 12};
  const auto w = pooled_t_test(a, b, TTestKind::Welch);
  // Welch-Satterthwaite by hand: va = 2.5/5, vb = 14/6.
  const double va = 2.5 / 5, vb = 14.0 / 6;
  const double df = (va + vb) * (va + vb) / (va * va / 4 + vb * vb / 5);
  CHECK(w.df == doctest::Approx(df));
  CHECK(w.t == doctest::Approx((3.0 - 7.0) / std::sqrt(va + vb)));
}

TEST_CASE("t-test needs two values per group") {
  const std::vector<double> a{1}, b{2, 3, 4};
  CHECK(code_of([&] { pooled_t_test(a, b); }) == ErrorCode::InsufficientSample);
}

TEST_CASE("Spearman-Brown") {
  CHECK(spearman_brown(0.914) == doctest::Approx(2 * 0.914 / 1.914));
  CHECK(std::abs(spearman_brown(0.914) - 0.955) <= 0.001);
  CHECK(std::abs(spearman_brown(0.979) - 0.989) <= 0.001);
  CHECK(spearman_brown(0.0) == 0.0);
  CHECK(spearman_brown(1.0) == 1.0);
  CHECK(code_of([] { spearman_brown(-1.0); }) == ErrorCode::DivisionByZero);
}

TEST_CASE("Cronbach alpha fixture and missing data") {
  Matrix m(6, 4);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 4; ++c) m(r, c) = oracles::kAlphaRows[r][c];
  CHECK(cronbach_alpha(m) == doctest::Approx(oracles::kAlpha).epsilon(1e-12));
  m(2, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([&] { cronbach_alpha(m); }) == ErrorCode::MissingData);
}

TEST_CASE("OLS fixture and nested F test") {
  const std::size_t n = std::size(oracles::kOlsY);
  const std::span<const double> y(oracles::kOlsY);
  Matrix x1(n, 1), x12(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    x1(i, 0) = x12(i, 0) = oracles::kOlsX1[i];
    x12(i, 1) = oracles::kOlsX2[i];
  }
  const auto reduced = ols(y, x1);
  const auto full = ols(y, x12);
  CHECK(reduced.r_squared == doctest::Approx(oracles::kOlsR2Reduced).epsilon(1e-12));
  CHECK(full.r_squared == doctest::Approx(oracles::kOlsR2Full).epsilon(1e-12));
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(full.coefficients[j] == doctest::Approx(oracles::kOlsBetaFull[j]).epsilon(1e-10));
  const auto f = delta_r2_f_test(reduced.r_squared, full.r_squared, n, 1, 2);
  CHECK(f.f == doctest::Approx(oracles::kOlsDeltaF).epsilon(1e-9));
  CHECK(f.p == doctest::Approx(oracles::kOlsDeltaP).epsilon(1e-8));
}

TEST_CASE("incremental R2 fixture from summary values") {
  const auto fx = fixtures::nested_r2_fixture(20, 0.032, 0.357);
  Matrix a(20, 1), al(20, 2);
  for (std::size_t i = 0; i < 20; ++i) {
    a(i, 0) = al(i, 0) = fx.accuracy[i];
    al(i, 1) = fx.l[i];
  }
  const auto reduced = ols(fx.y, a);
  const auto full = ols(fx.y, al);
  CHECK(reduced.r_squared == doctest::Approx(0.032).epsilon(1e-10));
  CHECK(full.r_squared == doctest::Approx(0.357).epsilon(1e-10));
  const auto f = delta_r2_f_test(reduced.r_squared, full.r_squared, 20, 1, 2);
  // Oracle: (0.325 / 1) / (0.643 / 17).
  CHECK(f.f == doctest::Approx(0.325 / (0.643 / 17)).epsilon(1e-9));
  CHECK(std::abs(f.f - 8.59) <= 0.02);
  CHECK(std::abs(f.p - 0.009) <= 0.001);
}

TEST_CASE("OLS rank deficiency and degenerate fits") {
  Matrix x(5, 2);
  const std::vector<double> y{1, 2, 3, 4, 6};
  for (std::size_t i = 0; i < 5; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = 2.0 * i;
  }
  CHECK(code_of([&] { ols(y, x); }) == ErrorCode::SingularDesign);
  CHECK(code_of([] { delta_r2_f_test(0.5, 1.0, 10, 1, 2); }) == ErrorCode::DegenerateFit);
}

TEST_CASE("type-7 quantile") {
  const std::vector<double> xs{4, 1, 3, 2, 5};
  CHECK(quantile(xs, 0.0) == 1.0);
  CHECK(quantile(xs, 1.0) == 5.0);
  CHECK(quantile(xs, 0.5) == 3.0);
  CHECK(quantile(xs, 0.1) == doctest::Approx(1.4));
  CHECK(quantile(xs, 0.975) == doctest::Approx(4.9));
}

TEST_CASE("empty samples are errors") {
  const std::vector<double> none;
  CHECK(code_of([&] { mean(none); }) == ErrorCode::EmptySample);
  CHECK(code_of([&] { sample_stats(none); }) == ErrorCode::EmptySample);
}
