#include "hcb/baker_map.hpp"

#include <algorithm>

#include "hcb/error.hpp"
#include "hcb/rng.hpp"

namespace hcb {

std::string center_type_name(CenterType t) {
  switch (t) {
    case CenterType::MostlyExpanding: return "mostly-expanding";
    case CenterType::MostlyNeutral: return "mostly-neutral";
    case CenterType::MostlyContracting: return "mostly-contracting";
  }
  return "unknown";
}

std::string symbol_name(const Symbol& s) {
  return std::string(s.kind == SymbolKind::Alpha ? "alpha" : "beta") + std::to_string(s.k);
}

BakerParams::BakerParams(int M, Rational a, Rational b) : M_(M), a_(std::move(a)), b_(std::move(b)) {
  if (M_ < 2) throw Error(ErrorCode::InvalidArgument, "M must be at least 2");
  const Rational upper(1, M_);
  if (a_ <= 0 || a_ >= upper) throw Error(ErrorCode::InvalidArgument, "a must lie in (0, 1/M)");
  if (b_ <= 0 || b_ >= upper) throw Error(ErrorCode::InvalidArgument, "b must lie in (0, 1/M)");
}

BakerParams BakerParams::neutral(int M) {
  Rational half_inv(1, 2 * M);
  return BakerParams(M, half_inv, half_inv);
}

bool BakerParams::is_measure_preserving() const { return a_ + b_ == Rational(1, M_); }

CenterType BakerParams::center_type() const {
  const Rational pivot(1, 2 * M_);
  if (a_ < pivot) return CenterType::MostlyExpanding;
  if (a_ > pivot) return CenterType::MostlyContracting;
  return CenterType::MostlyNeutral;
}

Rational Box3::volume() const {
  Rational v(1);
  for (int d = 0; d < 3; ++d) v *= hi[d] - lo[d];
  return v;
}

Box3 Branch::image() const {
  Box3 out;
  for (int d = 0; d < 3; ++d) {
    out.lo[d] = scale[d] * domain.lo[d] + shift[d];
    out.hi[d] = scale[d] * domain.hi[d] + shift[d];
  }
  return out;
}

std::vector<Branch> branches(const BakerParams& params) {
  const int M = params.M();
  const Rational& a = params.a();
  const Rational& b = params.b();
  const Rational Ma = Rational(M) * a;
  std::vector<Branch> out;
  out.reserve(2 * M);
  for (int k = 1; k <= M; ++k) {
    Branch br;
    br.symbol = {SymbolKind::Alpha, k};
    br.domain.lo = {Rational(k - 1) * a, Rational(0), Rational(0)};
    br.domain.hi = {Rational(k) * a, Rational(1), Rational(1)};
    br.scale = {Rational(1) / a, Rational(1, M), Rational(1) - Rational(M) * b};
    br.shift = {Rational(-(k - 1)), (Rational(k - 1) / M), Rational(0)};
    for (auto& q : br.shift) q.canonicalize();
    for (auto& q : br.scale) q.canonicalize();
    out.push_back(std::move(br));
  }
  for (int k = 1; k <= M; ++k) {
    Branch br;
    br.symbol = {SymbolKind::Beta, k};
    br.domain.lo = {Ma, (Rational(k - 1) / M), Rational(0)};
    br.domain.hi = {Rational(1), (Rational(k) / M), Rational(1)};
    for (auto& q : br.domain.lo) q.canonicalize();
    for (auto& q : br.domain.hi) q.canonicalize();
    const Rational slope = Rational(1) / (Rational(1) - Ma);
    br.scale = {slope, Rational(M), b};
    br.shift = {-Ma * slope, Rational(-(k - 1)), Rational(1) + b * Rational(k - M - 1)};
    out.push_back(std::move(br));
  }
  return out;
}

std::array<Rational, 3> linear_part(const BakerParams& params, const Symbol& s) {
  const int M = params.M();
  if (s.kind == SymbolKind::Alpha) {
    return {Rational(1) / params.a(), Rational(1, M), Rational(1) - Rational(M) * params.b()};
  }
  return {Rational(1) / (Rational(1) - Rational(M) * params.a()), Rational(M), params.b()};
}

namespace {

template <class T>
int alpha_strip(const BakerParams& params, const T& xu) {
  for (int k = 1; k <= params.M(); ++k) {
    if (xu < scalar_from<T>(Rational(k) * params.a())) return k;
  }
  return 0;
}

template <class T>
int beta_strip(const BakerParams& params, const T& xc) {
  const int M = params.M();
  for (int k = 1; k < M; ++k) {
    Rational edge(k, M);
    edge.canonicalize();
    if (xc < scalar_from<T>(edge)) return k;
  }
  return M;
}

template <class T>
T clamp_unit(T x) {
  if constexpr (!is_exact_v<T>) {
    return std::clamp(x, T(0), T(1));
  } else {
    return x;
  }
}

}  // namespace

template <class T>
Symbol classify(const BakerParams& params, const Point3<T>& p) {
  return classify2(params, Point2<T>{p.xu, p.xc});
}

template <class T>
Symbol classify2(const BakerParams& params, const Point2<T>& p) {
  if (int k = alpha_strip(params, p.xu); k != 0) return {SymbolKind::Alpha, k};
  return {SymbolKind::Beta, beta_strip(params, p.xc)};
}

template <class T>
T apply_tau(const BakerParams& params, const T& xu) {
  const int M = params.M();
  if (int k = alpha_strip(params, xu); k != 0) {
    return clamp_unit<T>((xu - scalar_from<T>(Rational(k - 1) * params.a())) / scalar_from<T>(params.a()));
  }
  const Rational Ma = Rational(M) * params.a();
  return clamp_unit<T>((xu - scalar_from<T>(Ma)) / scalar_from<T>(Rational(1) - Ma));
}

template <class T>
Point2<T> apply_f2(const BakerParams& params, const Point2<T>& p) {
  const Point3<T> q = apply_f3(params, Point3<T>{p.xu, p.xc, T(0)});
  return {q.xu, q.xc};
}

template <class T>
Point3<T> apply_f3(const BakerParams& params, const Point3<T>& p) {
  const int M = params.M();
  const Symbol s = classify(params, p);
  Point3<T> out;
  out.xu = apply_tau(params, p.xu);
  if (s.kind == SymbolKind::Alpha) {
    Rational off(s.k - 1, M);
    off.canonicalize();
    out.xc = p.xc * scalar_from<T>(Rational(1, M)) + scalar_from<T>(off);
    out.xs = p.xs * scalar_from<T>(Rational(1) - Rational(M) * params.b());
  } else {
    out.xc = p.xc * T(M) + T(-(s.k - 1));
    out.xs = p.xs * scalar_from<T>(params.b()) + scalar_from<T>(Rational(1) + params.b() * Rational(s.k - M - 1));
  }
  out.xc = clamp_unit<T>(out.xc);
  out.xs = clamp_unit<T>(out.xs);
  return out;
}

template <class T>
Point3<T> apply_f3_inverse(const BakerParams& params, const Point3<T>& p) {
  const int M = params.M();
  const Rational& a = params.a();
  const Rational& b = params.b();
  const Rational Mb = Rational(M) * b;
  const T seam = scalar_from<T>(Rational(1) - Mb);
  if (p.xs == seam) throw Error(ErrorCode::BoundaryPoint, "x_s on the alpha/beta image seam");
  Point3<T> out;
  if (p.xs < seam) {
    int k = M;
    for (int j = 1; j < M; ++j) {
      Rational edge(j, M);
      edge.canonicalize();
      const T e = scalar_from<T>(edge);
      if (p.xc == e) throw Error(ErrorCode::BoundaryPoint, "x_c on an alpha image seam");
      if (p.xc < e) {
        k = j;
        break;
      }
    }
    out.xu = scalar_from<T>(a) * p.xu + scalar_from<T>(Rational(k - 1) * a);
    out.xc = T(M) * p.xc - T(k - 1);
    out.xs = p.xs / seam;
  } else {
    int k = M;
    for (int j = 1; j < M; ++j) {
      const T e = scalar_from<T>(Rational(1) - b * Rational(M - j));
      if (p.xs == e) throw Error(ErrorCode::BoundaryPoint, "x_s on a beta image seam");
      if (p.xs < e) {
        k = j;
        break;
      }
    }
    const Rational Ma = Rational(M) * a;
    out.xu = scalar_from<T>(Ma) + scalar_from<T>(Rational(1) - Ma) * p.xu;
    Rational shift(k - 1, M);
    shift.canonicalize();
    out.xc = p.xc * scalar_from<T>(Rational(1, M)) + scalar_from<T>(shift);
    out.xs = (p.xs - scalar_from<T>(Rational(1) + b * Rational(k - M - 1))) / scalar_from<T>(b);
  }
  out.xu = clamp_unit<T>(out.xu);
  out.xc = clamp_unit<T>(out.xc);
  out.xs = clamp_unit<T>(out.xs);
  return out;
}

template <class T>
std::vector<Point3<T>> orbit(const BakerParams& params, const Point3<T>& p, long n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "orbit length must be non-negative");
  std::vector<Point3<T>> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.push_back(p);
  for (long i = 0; i < n; ++i) out.push_back(apply_f3(params, out.back()));
  return out;
}

double itinerary_stats(const BakerParams& params, const Point3<double>& p, long n,
                       std::optional<std::uint64_t> dither_seed) {
  if (n <= 0) throw Error(ErrorCode::InvalidArgument, "itinerary length must be positive");
  const CounterRng rng(dither_seed.value_or(0));
  Point3<double> x = p;
  long alpha_visits = 0;
  for (long i = 0; i < n; ++i) {
    if (classify(params, x).kind == SymbolKind::Alpha) ++alpha_visits;
    x = apply_f3(params, x);
    if (dither_seed) {
      x.xu += kDitherScale * rng.uniform(0, static_cast<std::uint64_t>(i));
      if (x.xu >= 1.0) x.xu -= 1.0;
    }
  }
  return static_cast<double>(alpha_visits) / static_cast<double>(n);
}

TilingReport tiling_report(const BakerParams& params) {
  TilingReport report;
  const auto brs = branches(params);
  report.disjoint_interiors = true;
  report.unit_jacobians = true;
  report.total_image_volume = 0;
  std::vector<Box3> images;
  for (const auto& br : brs) {
    Box3 img = br.image();
    for (int d = 0; d < 3; ++d) {
      if (img.lo[d] < 0 || img.hi[d] > 1) report.disjoint_interiors = false;
    }
    report.total_image_volume += img.volume();
    if (img.volume() != br.domain.volume()) report.unit_jacobians = false;
    images.push_back(std::move(img));
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      bool overlap = true;
      for (int d = 0; d < 3; ++d) {
        if (images[i].hi[d] <= images[j].lo[d] || images[j].hi[d] <= images[i].lo[d]) overlap = false;
      }
      if (overlap) report.disjoint_interiors = false;
    }
  }
  report.covers_cube = report.disjoint_interiors && report.total_image_volume == 1;
  return report;
}

template Symbol classify<Rational>(const BakerParams&, const Point3<Rational>&);
template Symbol classify<double>(const BakerParams&, const Point3<double>&);
template Symbol classify2<Rational>(const BakerParams&, const Point2<Rational>&);
template Symbol classify2<double>(const BakerParams&, const Point2<double>&);
template Rational apply_tau<Rational>(const BakerParams&, const Rational&);
template double apply_tau<double>(const BakerParams&, const double&);
template Point2<Rational> apply_f2<Rational>(const BakerParams&, const Point2<Rational>&);
template Point2<double> apply_f2<double>(const BakerParams&, const Point2<double>&);
template Point3<Rational> apply_f3<Rational>(const BakerParams&, const Point3<Rational>&);
template Point3<double> apply_f3<double>(const BakerParams&, const Point3<double>&);
template Point3<Rational> apply_f3_inverse<Rational>(const BakerParams&, const Point3<Rational>&);
template Point3<double> apply_f3_inverse<double>(const BakerParams&, const Point3<double>&);
template std::vector<Point3<Rational>> orbit<Rational>(const BakerParams&, const Point3<Rational>&, long);
template std::vector<Point3<double>> orbit<double>(const BakerParams&, const Point3<double>&, long);

}  // namespace hcb
