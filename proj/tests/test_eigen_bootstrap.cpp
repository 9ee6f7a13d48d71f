#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "vscreen/bootstrap.hpp"
#include "vscreen/error.hpp"
#include "vscreen/parallel.hpp"
#include "vscreen/rng.hpp"
#include "vscreen/symmetric_eigen.hpp"

using namespace vscreen;
using namespace vscreen::stats;

namespace {

Matrix random_symmetric(std::size_t n, CounterRng& rng) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = rng.normal();
  return m;
}

double reconstruction_error(const Matrix& a, const EigenDecomposition& e) {
  const std::size_t n = a.rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < n; ++k) v += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
      worst = std::max(worst, std::abs(v - a(i, j)));
    }
  return worst;
}

}  // namespace

TEST_CASE("Jacobi reconstructs random symmetric matrices") {
  CounterRng rng(42, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_symmetric(6, rng);
    const auto e = symmetric_eigen(a);
    CHECK(reconstruction_error(a, e) < 1e-8);
    double trace = 0.0;
    for (std::size_t i = 0; i < 6; ++i) trace += a(i, i);
    CHECK(std::accumulate(e.values.begin(), e.values.end(), 0.0) == doctest::Approx(trace).epsilon(1e-9));
    CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
    // Orthonormal eigenvectors.
    for (std::size_t p = 0; p < 6; ++p)
      for (std::size_t q = 0; q < 6; ++q) {
        double dot = 0.0;
        for (std::size_t i = 0; i < 6; ++i) dot += e.vectors(i, p) * e.vectors(i, q);
        CHECK(dot == doctest::Approx(p == q ? 1.0 : 0.0).epsilon(1e-9));
      }
  }
}

TEST_CASE("known spectra") {
  const auto id = symmetric_eigen(Matrix::identity(4));
  for (double v : id.values) CHECK(v == doctest::Approx(1.0));

  // [[2,1],[1,2]] has eigenvalues 3 and 1.
  const auto e = symmetric_eigen(Matrix::from_rows({{2, 1}, {1, 2}}));
  CHECK(e.values[0] == doctest::Approx(3.0));
  CHECK(e.values[1] == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(std::sqrt(0.5)));

  // Rank-one correlation matrix of perfectly correlated variables.
  const auto ones = symmetric_eigen(Matrix(3, 3, 1.0));
  CHECK(ones.values[0] == doctest::Approx(3.0));
  CHECK(ones.values[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("eigensolver input validation") {
  auto code = [](const Matrix& m) {
    try {
      symmetric_eigen(m);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  CHECK(code(Matrix(2, 3)) == ErrorCode::ShapeError);
  CHECK(code(Matrix::from_rows({{1, 2}, {2.5, 1}})) == ErrorCode::NotSymmetric);
  CHECK(code(Matrix::identity(33)) == ErrorCode::ShapeError);
}

TEST_CASE("bootstrap replicates depend only on seed and index") {
  const std::vector<double> xs{0.1, 0.4, 0.35, 0.8, 0.9, 0.05, 0.6, 0.7};
  auto stat = [&](CounterRng& rng) -> std::optional<double> {
    const auto s = resample(xs, rng);
    return std::accumulate(s.begin(), s.end(), 0.0) / s.size();
  };
  BootstrapOptions serial{500, 77, 0.95, 1};
  BootstrapOptions threaded{500, 77, 0.95, 8};
  const auto a = bootstrap(stat, 0.4875, serial);
  const auto b = bootstrap(stat, 0.4875, threaded);
  CHECK(a.replicates == b.replicates);
  CHECK(a.ci_low == b.ci_low);
  CHECK(a.ci_high == b.ci_high);
  CHECK(a.ci_low < 0.4875);
  CHECK(a.ci_high > 0.4875);
  CHECK(a.iterations == 500);

  BootstrapOptions other = serial;
  other.seed = 78;
  CHECK(bootstrap(stat, 0.4875, other).replicates != a.replicates);

  // Replicate i draws from CounterRng(seed, i).
  CounterRng r3(77, 3);
  CHECK(a.replicates[3] == *stat(r3));
}

TEST_CASE("bootstrap percentile CI of a degenerate statistic") {
  const auto r = bootstrap([](CounterRng&) -> std::optional<double> { return 2.5; }, 2.5, {200, 1, 0.9, 2});
  CHECK(r.ci_low == 2.5);
  CHECK(r.ci_high == 2.5);
}

TEST_CASE("bootstrap guards") {
  auto always = [](CounterRng&) -> std::optional<double> { return 1.0; };
  auto code = [&](const ReplicateFn& f, BootstrapOptions o) {
    try {
      bootstrap(f, 0.0, o);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  CHECK(code(always, {99, 1, 0.95, 1}) == ErrorCode::InsufficientSample);
  CHECK(code(always, {100, 1, 1.0, 1}) == ErrorCode::ConfigError);
  // 20% undefined replicates.
  auto flaky = [](CounterRng& rng) -> std::optional<double> {
    if (rng.uniform() < 0.2) return std::nullopt;
    return 1.0;
  };
  CHECK(code(flaky, {1000, 3, 0.95, 1}) == ErrorCode::UnstableStatistic);
  // 2% undefined replicates are tolerated and counted.
  auto rare = [](CounterRng& rng) -> std::optional<double> {
    if (rng.uniform() < 0.02) return std::nullopt;
    return rng.uniform();
  };
  const auto r = bootstrap(rare, 0.5, {1000, 3, 0.95, 1});
  CHECK(r.skipped > 0);
  CHECK(r.skipped + r.replicates.size() == 1000);
}

TEST_CASE("counter RNG distributions") {
  CounterRng rng(9, 0);
  double sum = 0, sum2 = 0, g = 0, b = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
    g += rng.gamma(2.5);
    b += rng.beta(7, 2);
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.01));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(g / n == doctest::Approx(2.5).epsilon(0.02));
  CHECK(b / n == doctest::Approx(7.0 / 9.0).epsilon(0.01));
  CounterRng x(1, 2), y(1, 2), z(1, 3);
  CHECK(x() == y());
  CHECK(x() != z());
  for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);
}

TEST_CASE("parallel_for fills every slot and rethrows") {
  std::vector<int> out(1000, 0);
  parallel_for(out.size(), 8, [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);
  CHECK_THROWS_AS(parallel_for(100, 4,
                               [](std::size_t i) {
                                 if (i == 50) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
