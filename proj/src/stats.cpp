#include "vscreen/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vscreen/error.hpp"

namespace vscreen::stats {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw Error(ErrorCode::ShapeError, "ragged matrix rows");
    std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(r * m.cols()));
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw Error(ErrorCode::ShapeError, "matrix product dimension mismatch");
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::EmptySample, "mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw Error(ErrorCode::InsufficientSample, "variance needs n >= 2");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

SampleStats sample_stats(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::EmptySample, "sample_stats of empty sample");
  SampleStats s;
  s.n = xs.size();
  s.mean = mean(xs);
  if (xs.size() >= 2) s.sd = std::sqrt(variance(xs));
  return s;
}

namespace {

CorrelationResult correlation_with_significance(double r, std::size_t n) {
  CorrelationResult out;
  out.r = std::clamp(r, -1.0, 1.0);
  out.n = n;
  out.df = n - 2;
  const double df = static_cast<double>(out.df);
  const double denom = 1.0 - out.r * out.r;
  if (denom <= 0.0) {
    out.t_stat = out.r > 0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
    out.p_two_tailed = 0.0;
  } else {
    out.t_stat = out.r * std::sqrt(df / denom);
    out.p_two_tailed = student_t_two_tailed_p(out.t_stat, df);
  }
  return out;
}

}  // namespace

CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw Error(ErrorCode::ShapeError, "pearson: lengths " + std::to_string(xs.size()) + " and " +
                                           std::to_string(ys.size()) + " differ");
  if (xs.size() < 3) throw Error(ErrorCode::InsufficientSample, "pearson needs n >= 3");
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ZeroVariance, "pearson: constant input");
  return correlation_with_significance(sxy / std::sqrt(sxx * syy), xs.size());
}

CorrelationResult point_biserial(std::span<const int> binary, std::span<const double> continuous) {
  std::vector<double> coded;
  coded.reserve(binary.size());
  for (int b : binary) {
    if (b != 0 && b != 1) throw Error(ErrorCode::ShapeError, "point_biserial: binary vector must be 0/1");
    coded.push_back(static_cast<double>(b));
  }
  return pearson(coded, continuous);
}

TTestResult pooled_t_test(std::span<const double> group_a, std::span<const double> group_b,
                          TTestKind kind) {
  if (group_a.size() < 2 || group_b.size() < 2)
    throw Error(ErrorCode::InsufficientSample, "t-test needs n >= 2 per group");
  const double na = static_cast<double>(group_a.size());
  const double nb = static_cast<double>(group_b.size());
  const double va = variance(group_a);
  const double vb = variance(group_b);
  const double diff = mean(group_a) - mean(group_b);

  TTestResult out;
  double se = 0.0;
  if (kind == TTestKind::Pooled) {
    out.df = na + nb - 2.0;
    const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / out.df;
    se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  } else {
    const double qa = va / na;
    const double qb = vb / nb;
    se = std::sqrt(qa + qb);
    out.df = (qa + qb) * (qa + qb) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
  }
  if (se == 0.0) {
    if (diff == 0.0) return {0.0, out.df, 1.0};
    throw Error(ErrorCode::ZeroVariance, "t-test: both groups constant with different means");
  }
  out.t = diff / se;
  out.p = student_t_two_tailed_p(out.t, out.df);
  return out;
}

double cohens_d(std::span<const double> group_a, std::span<const double> group_b) {
  if (group_a.size() < 2 || group_b.size() < 2)
    throw Error(ErrorCode::InsufficientSample, "cohens_d needs n >= 2 per group");
  const double na = static_cast<double>(group_a.size());
  const double nb = static_cast<double>(group_b.size());
  const double pooled =
      ((na - 1.0) * variance(group_a) + (nb - 1.0) * variance(group_b)) / (na + nb - 2.0);
  const double diff = mean(group_a) - mean(group_b);
  if (pooled == 0.0) {
    if (diff == 0.0) return 0.0;
    throw Error(ErrorCode::ZeroVariance, "cohens_d: zero pooled SD");
  }
  return diff / std::sqrt(pooled);
}

double spearman_brown(double r_half) {
  if (r_half <= -1.0) {
    if (r_half == -1.0) throw Error(ErrorCode::DivisionByZero, "spearman_brown at r = -1");
    throw Error(ErrorCode::ShapeError, "spearman_brown: r outside [-1, 1]");
  }
  if (r_half > 1.0) throw Error(ErrorCode::ShapeError, "spearman_brown: r outside [-1, 1]");
  return 2.0 * r_half / (1.0 + r_half);
}

double cronbach_alpha(const Matrix& scores) {
  const std::size_t n = scores.rows();
  const std::size_t k = scores.cols();
  if (k < 2) throw Error(ErrorCode::InsufficientSample, "cronbach_alpha needs >= 2 parts");
  if (n < 2) throw Error(ErrorCode::InsufficientSample, "cronbach_alpha needs >= 2 cases");
  std::vector<double> totals(n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < k; ++c) {
      const double v = scores(r, c);
      if (std::isnan(v))
        throw Error(ErrorCode::MissingData, "cronbach_alpha: missing cell at case " +
                                                std::to_string(r) + ", part " + std::to_string(c));
      totals[r] += v;
    }
  double part_var = 0.0;
  for (std::size_t c = 0; c < k; ++c) part_var += variance(scores.column(c));
  const double total_var = variance(totals);
  if (total_var == 0.0) throw Error(ErrorCode::ZeroVariance, "cronbach_alpha: zero total variance");
  const double kd = static_cast<double>(k);
  return (kd / (kd - 1.0)) * (1.0 - part_var / total_var);
}

RegressionResult ols(std::span<const double> y, const Matrix& predictors) {
  const std::size_t n = y.size();
  const std::size_t k = predictors.cols();
  if (predictors.rows() != n) throw Error(ErrorCode::ShapeError, "ols: X rows differ from y length");
  if (n <= k + 1) throw Error(ErrorCode::InsufficientSample, "ols needs n > k + 1");
  const std::size_t p = k + 1;

  // Householder QR on [1 | X], applied to y in place.
  Matrix a(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    for (std::size_t j = 0; j < k; ++j) a(i, j + 1) = predictors(i, j);
  }
  std::vector<double> qty(y.begin(), y.end());
  std::vector<double> col_norms(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a(i, j) * a(i, j);
    col_norms[j] = std::sqrt(s);
  }

  for (std::size_t j = 0; j < p; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) norm += a(i, j) * a(i, j);
    norm = std::sqrt(norm);
    if (norm <= 1e-10 * std::max(col_norms[j], 1.0))
      throw Error(ErrorCode::SingularDesign, "ols: design column " + std::to_string(j) +
                                                 " is linearly dependent on earlier columns");
    const double alpha = a(j, j) > 0 ? -norm : norm;
    std::vector<double> v(n - j);
    v[0] = a(j, j) - alpha;
    for (std::size_t i = j + 1; i < n; ++i) v[i - j] = a(i, j);
    double vnorm2 = 0.0;
    for (double vi : v) vnorm2 += vi * vi;
    if (vnorm2 == 0.0) continue;
    auto reflect = [&](auto&& get) {
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += v[i - j] * get(i);
      const double scale = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < n; ++i) get(i) -= scale * v[i - j];
    };
    for (std::size_t c = j; c < p; ++c) reflect([&](std::size_t i) -> double& { return a(i, c); });
    reflect([&](std::size_t i) -> double& { return qty[i]; });
  }

  RegressionResult out;
  out.n = n;
  out.k = k;
  out.coefficients.assign(p, 0.0);
  for (std::size_t jj = p; jj-- > 0;) {
    double s = qty[jj];
    for (std::size_t c = jj + 1; c < p; ++c) s -= a(jj, c) * out.coefficients[c];
    out.coefficients[jj] = s / a(jj, jj);
  }

  double sse = 0.0;
  for (std::size_t i = p; i < n; ++i) sse += qty[i] * qty[i];
  const double my = mean(y);
  double sst = 0.0;
  for (double v : y) sst += (v - my) * (v - my);
  if (sst == 0.0) throw Error(ErrorCode::ZeroVariance, "ols: constant response");
  out.r_squared = std::clamp(1.0 - sse / sst, 0.0, 1.0);
  return out;
}

FTestResult delta_r2_f_test(double r2_reduced, double r2_full, std::size_t n, std::size_t added,
                            std::size_t k_full) {
  if (added == 0) throw Error(ErrorCode::ShapeError, "delta_r2_f_test: no predictors added");
  if (n <= k_full + 1) throw Error(ErrorCode::InsufficientSample, "delta_r2_f_test needs n > k_full + 1");
  if (r2_full >= 1.0) throw Error(ErrorCode::DegenerateFit, "delta_r2_f_test: full model R^2 = 1");
  // Tiny negative differences come from rounding in nested fits.
  const double delta = std::max(0.0, r2_full - r2_reduced);
  if (r2_full - r2_reduced < -1e-12)
    throw Error(ErrorCode::ShapeError, "delta_r2_f_test: full R^2 below reduced R^2");
  const double df1 = static_cast<double>(added);
  const double df2 = static_cast<double>(n - k_full - 1);
  FTestResult out;
  out.f = (delta / df1) / ((1.0 - r2_full) / df2);
  out.p = f_upper_tail_p(out.f, df1, df2);
  return out;
}

namespace {

// Continued fraction for I_x(a, b), modified Lentz evaluation.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 5000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double md = static_cast<double>(m);
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw Error(ErrorCode::ShapeError, "incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::ShapeError, "t tail needs df > 0");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double x = df / (df + t * t);
  return std::clamp(regularized_incomplete_beta(df / 2.0, 0.5, x), 0.0, 1.0);
}

double f_upper_tail_p(double f, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) throw Error(ErrorCode::ShapeError, "F tail needs positive df");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double x = df2 / (df2 + df1 * f);
  return std::clamp(regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, x), 0.0, 1.0);
}

double quantile(std::span<const double> xs, double q) {
  if (xs.empty()) throw Error(ErrorCode::EmptySample, "quantile of empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace vscreen::stats
