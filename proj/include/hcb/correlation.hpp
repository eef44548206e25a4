#pragma once

// Correlations Cor(phi, psi o f^n): exact reduced-operator routes, Monte Carlo
// orbits, decay-rate fits and the lower-bound and invariance experiments.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcb/baker_map.hpp"
#include "hcb/expr.hpp"
#include "hcb/pcfun.hpp"
#include "hcb/transfer.hpp"

namespace hcb {

enum class CorrMethod { ExactHaar, ExactSquareWave, MonteCarlo };

std::string_view method_name(CorrMethod m);

struct CorrelationRecord {
  long n;
  double value;
  std::optional<Rational> exact;
  CorrMethod method;
  double err;  // truncation bound for exact methods, standard error for Monte Carlo
};

struct CorrelationSeries {
  std::vector<CorrelationRecord> records;
};

/// Hölder exponent and seminorm |f|_theta.
struct HolderData {
  double theta;
  Rational seminorm;
};

/// A function of x_c alone, either affine or piecewise constant.
class Observable1D {
 public:
  static Observable1D affine(const Rational& slope, const Rational& intercept);
  static Observable1D piecewise(PCFun1D f);

  bool is_affine() const { return !function_; }
  const Rational& slope() const { return slope_; }
  const Rational& intercept() const { return intercept_; }
  const std::optional<PCFun1D>& function() const { return function_; }

  double operator()(double x) const;
  Rational mean() const;

  /// Cell averages of the zero-mean part on the uniform 2^level grid.
  PCFun1D projection(unsigned level) const;

  /// Bound on sup |g - projection(level)| with g the zero-mean part; infinite
  /// when no bound is known.
  double projection_error(unsigned level) const;

  /// sup |g| of the zero-mean part.
  Rational zero_mean_sup() const;

  std::optional<HolderData> holder() const;

  /// +1 strictly increasing, -1 strictly decreasing, 0 otherwise.
  int monotone_direction() const;

 private:
  Rational slope_{0};
  Rational intercept_{0};
  std::optional<PCFun1D> function_;
};

/// The cell averages of x -> slope * x + intercept restricted to quarters,
/// values -3/4, -1/4, 1/4, 3/4 for the default staircase.
Observable1D staircase(unsigned steps = 4);

struct ExactOptions {
  ReducedOp op;
  bool rational = false;        // square-wave route in exact rationals
  unsigned level = 8;           // projection depth for the Haar route on affine inputs
  std::optional<double> error_budget;
};

/// <P0^n phi, psi> for n = 0..n_max on the zero-mean parts.
/// ExactSquareWave throws NotInSquareWaveSpan for inputs outside the square
/// waves; ExactHaar throws TruncationBudgetExceeded when the projection
/// bound exceeds the budget.
CorrelationSeries exact_reduced_correlation(const Observable1D& phi, const Observable1D& psi, long n_max,
                                            CorrMethod mode, const ExactOptions& options = {});

struct Observable3D {
  std::function<double(double, double, double)> eval;
  std::optional<AffineForm> affine;
  std::string name;

  static Observable3D from_expr(const Expr& e);
  static Observable3D from_affine(const AffineForm& a, std::string name = "affine");
};

struct McOptions {
  std::uint64_t seed = 1;
  std::size_t samples = 1000000;
  std::size_t batches = 100;
  unsigned threads = 1;
  bool dither = true;
};

/// Space-average estimator over i.i.d. uniform starting points, one orbit per
/// point for all requested n, with batch-means standard errors. Sample i uses
/// stream i of the counter generator, so results do not depend on threads.
/// Throws NotMeasurePreserving.
CorrelationSeries mc_correlation(const BakerParams& params, const Observable3D& phi, const Observable3D& psi,
                                 const std::vector<long>& n_values, const McOptions& options);

/// Fills x_u, x_c, x_s with f^n of the uniform starting points of samples
/// [first, first + count), using the same streams as mc_correlation.
void mc_orbit_points(const BakerParams& params, long n, std::uint64_t seed, std::size_t first, std::size_t count,
                     bool dither, std::vector<double>& xu, std::vector<double>& xc, std::vector<double>& xs);

struct ChiSquareResult {
  double statistic;
  long dof;
  double p_value;  // Wilson-Hilferty normal approximation
  bool uniform;    // p_value >= alpha
};

/// Pearson test of f^n(uniform samples) against Lebesgue measure on a
/// grid^3 box partition.
ChiSquareResult chi_square_uniformity(const BakerParams& params, long n, std::size_t samples, std::uint64_t seed,
                                      int grid = 8, double alpha = 1e-3, unsigned threads = 1);

struct SlopeFit {
  double slope;
  double intercept;
  double residual;  // sum of squared residuals of log value
  std::vector<std::pair<long, double>> plateau;  // (n, n^{3/2} value)
};

/// Least squares of log value against log n for n in [n_lo, n_hi].
/// Throws NonPositiveValue.
SlopeFit decay_slope_fit(const CorrelationSeries& series, long n_lo, long n_hi);

struct ExpFit {
  double lambda;
  double slope;
  double intercept;
  double residual;  // sum of squared residuals of log value
};

/// Least squares of log value against n; lambda = exp(slope).
ExpFit exp_rate_fit(const CorrelationSeries& series, long n_lo, long n_hi);

struct LowerBoundReport {
  int sign;              // expected sign of <P0^n phi, psi>
  bool constant_sign;    // every value has that sign
  double inf_scaled;     // inf over 1 <= n <= n_max of n^{3/2} |value|
  long inf_at;
  std::vector<double> scaled;  // n^{3/2} value for n = 0..n_max
};

/// Throws NotMonotone unless phi and psi are strictly monotone with Haar
/// coefficient signs matching their direction.
LowerBoundReport lower_bound_check(const Observable1D& phi, const Observable1D& psi, long n_max,
                                   const ReducedOp& op = {});

}  // namespace hcb
