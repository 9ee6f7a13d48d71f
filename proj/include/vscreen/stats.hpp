#pragma once

// Statistical primitives used by the screening pipeline. Everything here is a
// pure function of its arguments.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace vscreen::stats {

// Dense row-major matrix; only what the analyses need.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> column(std::size_t c) const;

  Matrix transpose() const;
  Matrix operator*(const Matrix& rhs) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct SampleStats {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;  // n - 1 denominator; absent when n == 1
};

struct CorrelationResult {
  double r = 0.0;
  std::size_t n = 0;
  double t_stat = 0.0;
  std::size_t df = 0;
  double p_two_tailed = 1.0;
};

enum class TTestKind { Pooled, Welch };

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

struct RegressionResult {
  std::vector<double> coefficients;  // intercept first
  double r_squared = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
};

struct FTestResult {
  double f = 0.0;
  double p = 1.0;
};

double mean(std::span<const double> xs);
// Sample variance (n - 1). Requires n >= 2.
double variance(std::span<const double> xs);

SampleStats sample_stats(std::span<const double> xs);

CorrelationResult pearson(std::span<const double> xs, std::span<const double> ys);
CorrelationResult point_biserial(std::span<const int> binary, std::span<const double> continuous);

TTestResult pooled_t_test(std::span<const double> group_a, std::span<const double> group_b,
                          TTestKind kind = TTestKind::Pooled);
double cohens_d(std::span<const double> group_a, std::span<const double> group_b);

double spearman_brown(double r_half);

// Rows are cases (models), columns are parts (tracks). NaN marks a missing cell.
double cronbach_alpha(const Matrix& scores);

// `predictors` is n x k without the intercept column.
RegressionResult ols(std::span<const double> y, const Matrix& predictors);

FTestResult delta_r2_f_test(double r2_reduced, double r2_full, std::size_t n, std::size_t added,
                            std::size_t k_full);

// Tail probabilities, via the regularized incomplete beta function.
double regularized_incomplete_beta(double a, double b, double x);
double student_t_two_tailed_p(double t, double df);
double f_upper_tail_p(double f, double df1, double df2);

// Linear-interpolation quantile (Hyndman-Fan type 7) of unsorted data.
double quantile(std::span<const double> xs, double q);

}  // namespace vscreen::stats
