#include "hcb/correlation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <exception>
#include <thread>

#include "hcb/error.hpp"
#include "hcb/haar.hpp"
#include "hcb/rng.hpp"
#include "hcb/simd/kernels.hpp"

namespace hcb {

std::string_view method_name(CorrMethod m) {
  switch (m) {
    case CorrMethod::ExactHaar:
      return "exact-haar";
    case CorrMethod::ExactSquareWave:
      return "exact-squarewave";
    case CorrMethod::MonteCarlo:
      return "monte-carlo";
  }
  return "unknown";
}

Observable1D Observable1D::affine(const Rational& slope, const Rational& intercept) {
  Observable1D o;
  o.slope_ = slope;
  o.intercept_ = intercept;
  return o;
}

Observable1D Observable1D::piecewise(PCFun1D f) {
  Observable1D o;
  o.function_ = f.simplify();
  return o;
}

double Observable1D::operator()(double x) const {
  if (function_) return function_->value_at(std::array<double, 1>{x});
  return slope_.get_d() * x + intercept_.get_d();
}

Rational Observable1D::mean() const {
  if (function_) return function_->integral();
  return slope_ / 2 + intercept_;
}

PCFun1D Observable1D::projection(unsigned level) const {
  if (!function_) return from_affine(slope_, -slope_ / 2, level);
  const std::size_t cells = std::size_t{1} << level;
  const auto grid = uniform_breaks(cells);
  const PCFun1D fine = function_->refine(grid);
  std::vector<Rational> sums(cells, Rational(0));
  const auto& br = fine.breaks();
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const Rational left = br[i] * Rational(static_cast<unsigned long>(cells));
    const std::size_t j = std::min<std::size_t>(mpz_class(left.get_num() / left.get_den()).get_ui(), cells - 1);
    sums[j] += fine.values()[i] * (br[i + 1] - br[i]);
  }
  const Rational m = mean();
  for (auto& s : sums) s = s * Rational(static_cast<unsigned long>(cells)) - m;
  return PCFun1D(grid, std::move(sums)).simplify();
}

double Observable1D::projection_error(unsigned level) const {
  if (!function_) return std::abs(slope_.get_d()) * std::ldexp(1.0, -static_cast<int>(level) - 1);
  const auto native = dyadic_level(*function_);
  if (native && *native <= level) return 0.0;
  // Cell averages stay within the range of f.
  const auto [lo, hi] = std::minmax_element(function_->values().begin(), function_->values().end());
  return Rational(*hi - *lo).get_d();
}

Rational Observable1D::zero_mean_sup() const {
  if (!function_) return abs(slope_) / 2;
  const Rational m = mean();
  Rational s(0);
  for (const auto& v : function_->values()) s = std::max<Rational>(s, abs(Rational(v - m)));
  return s;
}

std::optional<HolderData> Observable1D::holder() const {
  if (function_) return std::nullopt;
  return HolderData{1.0, abs(slope_)};
}

int Observable1D::monotone_direction() const {
  if (!function_) return sgn(slope_);
  const auto& v = function_->values();
  if (v.size() < 2) return 0;
  bool up = true, down = true;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (!(v[i] < v[i + 1])) up = false;
    if (!(v[i] > v[i + 1])) down = false;
  }
  return up ? 1 : (down ? -1 : 0);
}

Observable1D staircase(unsigned steps) {
  if (steps < 2) throw Error(ErrorCode::InvalidArgument, "staircase needs at least two steps");
  std::vector<Rational> values(steps);
  for (unsigned i = 0; i < steps; ++i) {
    Rational mid(2 * i + 1, 2 * steps);
    mid.canonicalize();
    values[i] = 2 * mid - 1;
  }
  return Observable1D::piecewise(PCFun1D(uniform_breaks(steps), std::move(values)));
}

namespace {

SquareWaveState<Rational> square_wave_state(const Observable1D& o) {
  if (o.is_affine()) return SquareWaveState<Rational>::affine(o.slope());
  return to_square_wave(analyze(project_zero_mean(*o.function())));
}

template <class T>
SquareWaveState<T> convert(const SquareWaveState<Rational>& s) {
  if constexpr (is_exact_v<T>) {
    return s;
  } else {
    SquareWaveState<T> out;
    for (const auto& v : s.head) out.head.push_back(v.get_d());
    out.tail = s.tail.get_d();
    out.ratio = s.ratio.get_d();
    return out;
  }
}

template <class T>
CorrelationSeries squarewave_series(const Observable1D& phi, const Observable1D& psi, long n_max,
                                    const ReducedOp& op) {
  SquareWaveState<T> a = convert<T>(square_wave_state(phi));
  const SquareWaveState<T> b = convert<T>(square_wave_state(psi));
  CorrelationSeries out;
  out.records.reserve(static_cast<std::size_t>(n_max + 1));
  for (long n = 0; n <= n_max; ++n) {
    if (n > 0) a = squarewave_step(a, op);
    const T v = squarewave_pairing(a, b);
    CorrelationRecord r{n, 0.0, std::nullopt, CorrMethod::ExactSquareWave, 0.0};
    if constexpr (is_exact_v<T>) {
      r.value = v.get_d();
      r.exact = v;
    } else {
      r.value = v;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

// <h, x -> slope x + c> with c chosen to make the affine part mean zero.
Rational pair_with_affine(const HaarExpansion& h, const Rational& slope) {
  Rational s(0);
  for (const auto& [idx, c] : h) {
    // coefficient of the affine function on chi_{l,k} is -slope/4 * 2^{-(l-1)}
    s += c * (-slope / 4) * pow2(-2L * (idx.level - 1));
  }
  return s;
}

Rational pair_with_affine(const PCFun1D& h, const Rational& slope) {
  Rational s(0);
  const auto& br = h.breaks();
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const Rational& x0 = br[i];
    const Rational& x1 = br[i + 1];
    const Rational integral = slope * (x1 * x1 - x0 * x0) / 2 - slope / 2 * (x1 - x0);
    s += h.values()[i] * integral;
  }
  return s;
}

unsigned haar_level(const Observable1D& o, unsigned fallback) {
  if (o.is_affine()) return fallback;
  const auto L = dyadic_level(*o.function());
  if (!L) throw Error(ErrorCode::NonDyadicBreakpoints, "observable has non-dyadic breakpoints");
  return *L;
}

CorrelationSeries haar_series(const Observable1D& phi, const Observable1D& psi, long n_max,
                              const ExactOptions& options) {
  const unsigned Lphi = haar_level(phi, options.level);
  const double e_phi = phi.projection_error(Lphi);
  // psi is paired exactly, so only phi carries a projection error.
  const double err = e_phi * psi.zero_mean_sup().get_d();
  if (options.error_budget && err > *options.error_budget) {
    throw Error(ErrorCode::TruncationBudgetExceeded,
                "projection bound " + std::to_string(err) + " exceeds budget " + std::to_string(*options.error_budget));
  }
  const PCFun1D phi_L = phi.projection(Lphi);
  CorrelationSeries out;
  auto record = [&](long n, const Rational& v) {
    out.records.push_back({n, v.get_d(), v, CorrMethod::ExactHaar, err});
  };

  if (options.op.M == 2) {
    HaarExpansion h = analyze(phi_L);
    const std::optional<HaarExpansion> psi_e =
        psi.is_affine() ? std::nullopt : std::optional<HaarExpansion>(analyze(project_zero_mean(*psi.function())));
    for (long n = 0; n <= n_max; ++n) {
      if (n > 0) h = p0_haar_step(h, options.op);
      record(n, psi_e ? pairing(h, *psi_e) : pair_with_affine(h, psi.slope()));
    }
    return out;
  }
  PCFun1D h = phi_L;
  const std::optional<PCFun1D> psi_f =
      psi.is_affine() ? std::nullopt : std::optional<PCFun1D>(project_zero_mean(*psi.function()));
  for (long n = 0; n <= n_max; ++n) {
    if (n > 0) h = p0_apply(options.op, h);
    record(n, psi_f ? inner_product(h, *psi_f) : pair_with_affine(h, psi.slope()));
  }
  return out;
}

}  // namespace

CorrelationSeries exact_reduced_correlation(const Observable1D& phi, const Observable1D& psi, long n_max,
                                            CorrMethod mode, const ExactOptions& options) {
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be non-negative");
  switch (mode) {
    case CorrMethod::ExactSquareWave:
      if (options.op.M != 2) throw Error(ErrorCode::InvalidArgument, "square waves need M = 2");
      return options.rational ? squarewave_series<Rational>(phi, psi, n_max, options.op)
                              : squarewave_series<double>(phi, psi, n_max, options.op);
    case CorrMethod::ExactHaar:
      return haar_series(phi, psi, n_max, options);
    case CorrMethod::MonteCarlo:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "not an exact method");
}

Observable3D Observable3D::from_expr(const Expr& e) {
  Observable3D o;
  o.eval = [e](double u, double c, double s) { return e(u, c, s); };
  o.affine = e.affine();
  o.name = e.text();
  return o;
}

Observable3D Observable3D::from_affine(const AffineForm& a, std::string name) {
  Observable3D o;
  o.eval = [a](double u, double c, double s) { return a(u, c, s); };
  o.affine = a;
  o.name = std::move(name);
  return o;
}

namespace {

constexpr std::uint64_t kFirstStepCounter = 3;
// Counters for the center-coordinate dither start here, clear of the step counters.
constexpr std::uint64_t kCenterDitherCounter = std::uint64_t{1} << 40;

struct Evaluator {
  bool fast = false;
  double c0 = 0, cu = 0, cc = 0, cs = 0;
  const Observable3D* obs = nullptr;

  explicit Evaluator(const Observable3D& o) : obs(&o) {
    if (o.affine) {
      fast = true;
      c0 = o.affine->c0.get_d();
      cu = o.affine->cu.get_d();
      cc = o.affine->cc.get_d();
      cs = o.affine->cs.get_d();
    }
  }

  double operator()(double u, double c, double s) const {
    if (fast) return c0 + cu * u + cc * c + cs * s;
    return obs->eval(u, c, s);
  }
};

struct OrbitBatch {
  std::vector<double> xu, xc, xs, du, dc;
};

void init_points(const CounterRng& rng, std::size_t first, std::size_t count, OrbitBatch& b) {
  b.xu.resize(count);
  b.xc.resize(count);
  b.xs.resize(count);
  b.du.resize(count);
  b.dc.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t stream = first + i;
    b.xu[i] = rng.uniform(stream, 0);
    b.xc[i] = rng.uniform(stream, 1);
    b.xs[i] = rng.uniform(stream, 2);
  }
}

void advance(const simd::BakerConstants& c, const CounterRng& rng, std::size_t first, long t, bool dither,
             OrbitBatch& b) {
  const std::size_t count = b.xu.size();
  const double* du = nullptr;
  const double* dc = nullptr;
  if (dither) {
    const auto step = static_cast<std::uint64_t>(t);
    for (std::size_t i = 0; i < count; ++i) {
      b.du[i] = kDitherScale * rng.uniform(first + i, kFirstStepCounter + step);
      b.dc[i] = kDitherScale * rng.uniform(first + i, kCenterDitherCounter + step);
    }
    du = b.du.data();
    dc = b.dc.data();
  }
  simd::kernels().baker_step(c, b.xu.data(), b.xc.data(), b.xs.data(), count, du, dc);
}

// Runs job(batch) for batch = 0..batches-1 over the given number of workers.
template <class Job>
void parallel_batches(std::size_t batches, unsigned threads, Job&& job) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(batches)));
  if (workers == 1) {
    for (std::size_t i = 0; i < batches; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < batches; i = next++) job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double affine_mean(const AffineForm& a) { return Rational(a.c0 + (a.cu + a.cc + a.cs) / 2).get_d(); }

std::pair<std::size_t, std::size_t> batch_range(std::size_t samples, std::size_t batches, std::size_t i) {
  const std::size_t first = samples * i / batches;
  const std::size_t last = samples * (i + 1) / batches;
  return {first, last - first};
}

}  // namespace

void mc_orbit_points(const BakerParams& params, long n, std::uint64_t seed, std::size_t first, std::size_t count,
                     bool dither, std::vector<double>& xu, std::vector<double>& xc, std::vector<double>& xs) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be non-negative");
  const simd::BakerConstants c(params);
  const CounterRng rng(seed);
  OrbitBatch b;
  init_points(rng, first, count, b);
  for (long t = 0; t < n; ++t) advance(c, rng, first, t, dither, b);
  xu = std::move(b.xu);
  xc = std::move(b.xc);
  xs = std::move(b.xs);
}

CorrelationSeries mc_correlation(const BakerParams& params, const Observable3D& phi, const Observable3D& psi,
                                 const std::vector<long>& n_values, const McOptions& options) {
  if (!params.is_measure_preserving()) {
    throw Error(ErrorCode::NotMeasurePreserving, "space averages need a + b = 1/M");
  }
  if (n_values.empty()) throw Error(ErrorCode::InvalidArgument, "no n values");
  if (options.batches < 2 || options.samples < 2 * options.batches) {
    throw Error(ErrorCode::InvalidArgument, "need at least two batches of two samples");
  }
  std::vector<long> ns = n_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.front() < 0) throw Error(ErrorCode::InvalidArgument, "n must be non-negative");

  const std::size_t B = options.batches;
  const std::size_t K = ns.size();
  std::vector<double> s_phi(B), s_psi(B * K), s_prod(B * K);
  const simd::BakerConstants c(params);
  const CounterRng rng(options.seed);
  const Evaluator ephi(phi), epsi(psi);

  parallel_batches(B, options.threads, [&](std::size_t bi) {
    const auto [first, count] = batch_range(options.samples, B, bi);
    OrbitBatch b;
    init_points(rng, first, count, b);
    std::vector<double> phi0(count);
    double sp = 0;
    for (std::size_t i = 0; i < count; ++i) {
      phi0[i] = ephi(b.xu[i], b.xc[i], b.xs[i]);
      sp += phi0[i];
    }
    s_phi[bi] = sp;
    long t = 0;
    for (std::size_t k = 0; k < K; ++k) {
      for (; t < ns[k]; ++t) advance(c, rng, first, t, options.dither, b);
      double sq = 0, spq = 0;
      for (std::size_t i = 0; i < count; ++i) {
        const double q = epsi(b.xu[i], b.xc[i], b.xs[i]);
        sq += q;
        spq += phi0[i] * q;
      }
      s_psi[bi * K + k] = sq;
      s_prod[bi * K + k] = spq;
    }
  });

  const double N = static_cast<double>(options.samples);
  double total_phi = 0;
  for (double v : s_phi) total_phi += v;
  const double m_phi = phi.affine ? affine_mean(*phi.affine)
                                  : total_phi / N;

  CorrelationSeries out;
  for (std::size_t k = 0; k < K; ++k) {
    double total_psi = 0;
    for (std::size_t bi = 0; bi < B; ++bi) total_psi += s_psi[bi * K + k];
    const double m_psi =
        psi.affine ? affine_mean(*psi.affine)
                   : total_psi / N;
    std::vector<double> cov(B);
    double value = 0;
    for (std::size_t bi = 0; bi < B; ++bi) {
      const double nb = static_cast<double>(batch_range(options.samples, B, bi).second);
      cov[bi] = (s_prod[bi * K + k] - m_phi * s_psi[bi * K + k] - m_psi * s_phi[bi]) / nb + m_phi * m_psi;
      value += cov[bi] * nb;
    }
    value /= N;
    double ss = 0;
    for (double v : cov) ss += (v - value) * (v - value);
    const double se = std::sqrt(ss / (static_cast<double>(B) * static_cast<double>(B - 1)));
    out.records.push_back({ns[k], value, std::nullopt, CorrMethod::MonteCarlo, se});
  }
  return out;
}

ChiSquareResult chi_square_uniformity(const BakerParams& params, long n, std::size_t samples, std::uint64_t seed,
                                      int grid, double alpha, unsigned threads) {
  if (grid < 2) throw Error(ErrorCode::InvalidArgument, "grid must be at least 2");
  const std::size_t boxes = static_cast<std::size_t>(grid) * grid * grid;
  if (samples < 5 * boxes) throw Error(ErrorCode::InvalidArgument, "need at least five samples per box");
  const std::size_t B = std::max<std::size_t>(1, std::min<std::size_t>(64, samples / 1024));
  std::vector<std::vector<long>> counts(B, std::vector<long>(boxes, 0));
  parallel_batches(B, threads, [&](std::size_t bi) {
    const auto [first, count] = batch_range(samples, B, bi);
    std::vector<double> xu, xc, xs;
    mc_orbit_points(params, n, seed, first, count, true, xu, xc, xs);
    auto cell = [grid](double x) { return std::min(grid - 1, std::max(0, static_cast<int>(x * grid))); };
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t idx = (static_cast<std::size_t>(cell(xu[i])) * grid + cell(xc[i])) * grid + cell(xs[i]);
      ++counts[bi][idx];
    }
  });
  const double expected = static_cast<double>(samples) / static_cast<double>(boxes);
  double stat = 0;
  for (std::size_t j = 0; j < boxes; ++j) {
    long o = 0;
    for (std::size_t bi = 0; bi < B; ++bi) o += counts[bi][j];
    const double d = static_cast<double>(o) - expected;
    stat += d * d / expected;
  }
  const long dof = static_cast<long>(boxes) - 1;
  const double k = static_cast<double>(dof);
  const double z = (std::cbrt(stat / k) - (1.0 - 2.0 / (9.0 * k))) / std::sqrt(2.0 / (9.0 * k));
  const double p = 0.5 * std::erfc(z / std::sqrt(2.0));
  return {stat, dof, p, p >= alpha};
}

namespace {

struct LineFit {
  double slope, intercept, rss;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    rss += r * r;
  }
  return {slope, intercept, rss};
}

std::vector<const CorrelationRecord*> window(const CorrelationSeries& s, long n_lo, long n_hi) {
  if (n_lo < 1 || n_hi < n_lo) throw Error(ErrorCode::InvalidArgument, "fit window must satisfy 1 <= n_lo <= n_hi");
  std::vector<const CorrelationRecord*> out;
  for (const auto& r : s.records) {
    if (r.n < n_lo || r.n > n_hi) continue;
    if (!(r.value > 0)) {
      throw Error(ErrorCode::NonPositiveValue, "value at n = " + std::to_string(r.n) + " is not positive");
    }
    out.push_back(&r);
  }
  if (out.size() < 2) throw Error(ErrorCode::InvalidArgument, "fit window holds fewer than two points");
  return out;
}

}  // namespace

SlopeFit decay_slope_fit(const CorrelationSeries& series, long n_lo, long n_hi) {
  const auto pts = window(series, n_lo, n_hi);
  std::vector<double> x, y;
  SlopeFit fit{};
  for (const auto* r : pts) {
    const double n = static_cast<double>(r->n);
    x.push_back(std::log(n));
    y.push_back(std::log(r->value));
    fit.plateau.emplace_back(r->n, std::pow(n, 1.5) * r->value);
  }
  const LineFit lf = least_squares(x, y);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.residual = lf.rss;
  return fit;
}

ExpFit exp_rate_fit(const CorrelationSeries& series, long n_lo, long n_hi) {
  const auto pts = window(series, n_lo, n_hi);
  std::vector<double> x, y;
  for (const auto* r : pts) {
    x.push_back(static_cast<double>(r->n));
    y.push_back(std::log(r->value));
  }
  const LineFit lf = least_squares(x, y);
  return {std::exp(lf.slope), lf.slope, lf.intercept, lf.rss};
}

LowerBoundReport lower_bound_check(const Observable1D& phi, const Observable1D& psi, long n_max,
                                   const ReducedOp& op) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be positive");
  auto direction = [](const Observable1D& o, const char* name) {
    const int dir = o.monotone_direction();
    if (dir == 0) throw Error(ErrorCode::NotMonotone, std::string(name) + " is not strictly monotone");
    if (!o.is_affine()) {
      const auto sign = uniform_sign(analyze(project_zero_mean(*o.function())));
      if (!sign || *sign != -dir) {
        throw Error(ErrorCode::NotMonotone, std::string(name) + " has Haar coefficients of mixed sign");
      }
    }
    return dir;
  };
  const int sign = direction(phi, "phi") * direction(psi, "psi");

  bool span = true;
  try {
    (void)square_wave_state(phi);
    (void)square_wave_state(psi);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotInSquareWaveSpan) throw;
    span = false;
  }
  ExactOptions opts;
  opts.op = op;
  const CorrelationSeries s = span && op.M == 2
                                  ? exact_reduced_correlation(phi, psi, n_max, CorrMethod::ExactSquareWave, opts)
                                  : exact_reduced_correlation(phi, psi, n_max, CorrMethod::ExactHaar, opts);

  LowerBoundReport report;
  report.sign = sign;
  report.constant_sign = true;
  report.inf_scaled = std::numeric_limits<double>::infinity();
  report.inf_at = 0;
  for (const auto& r : s.records) {
    const double scaled = std::pow(static_cast<double>(r.n), 1.5) * r.value;
    report.scaled.push_back(scaled);
    const int got = r.value > 0 ? 1 : (r.value < 0 ? -1 : 0);
    if (got != sign) report.constant_sign = false;
    if (r.n >= 1 && std::abs(scaled) < report.inf_scaled) {
      report.inf_scaled = std::abs(scaled);
      report.inf_at = r.n;
    }
  }
  return report;
}

}  // namespace hcb
