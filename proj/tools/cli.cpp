#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "hcb/correlation.hpp"
#include "hcb/error.hpp"
#include "hcb/io.hpp"
#include "hcb/ruin_walk.hpp"
#include "hcb/transfer.hpp"
#include "verify.hpp"

namespace hcb::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) out.push_back(item);
  return out;
}

std::vector<long> parse_longs(const std::string& text) {
  std::vector<long> out;
  for (const auto& item : split(text, ',')) {
    const Rational q = parse_rational(item);
    if (q.get_den() != 1) throw UsageError("not an integer: " + item);
    out.push_back(q.get_num().get_si());
  }
  return out;
}

struct MapOptions {
  int M = 2;
  std::string a, b;

  void add(CLI::App* app) {
    app->add_option("--M", M, "number of branches")->capture_default_str();
    app->add_option("--a", a, "alpha strip width as p/q (default 1/(2M))");
    app->add_option("--b", b, "contraction width as p/q (default 1/(2M))");
  }

  BakerParams params() const {
    if (M < 2) throw UsageError("--M must be at least 2");
    const Rational half(1, 2 * M);
    return BakerParams(M, a.empty() ? half : parse_rational(a), b.empty() ? half : parse_rational(b));
  }
};

/// Collects the output of one subcommand and the canonical form of its
/// configuration.
struct Output {
  std::string path;
  std::ostringstream body;
  std::string config;

  void csv_footer() {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(config)));
    body << "# config=" << hash << " version=" << kVersion << '\n';
  }

  void flush(std::ostream& out) const {
    if (path.empty()) {
      out << body.str();
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path);
    f << body.str();
  }
};

std::string canonical_config(const CLI::App* sub) {
  std::string out = sub->get_name() + '\n';
  for (const auto& line : split(sub->config_to_str(true, false), '\n')) {
    if (line.rfind("out=", 0) == 0 || line.rfind("threads=", 0) == 0) continue;
    out += line + '\n';
  }
  return out;
}

struct ObservableSpec {
  Observable3D obs;
  std::optional<Observable1D> center;
};

ObservableSpec parse_observable(const std::string& text) {
  ObservableSpec out;
  if (text == "staircase-4") {
    const Observable1D st = staircase(4);
    out.center = st;
    out.obs.eval = [st](double, double c, double) { return st(c); };
    out.obs.name = text;
    return out;
  }
  const Expr e = Expr::parse(text == "affine-center" ? "xc-1/2" : text);
  out.obs = Observable3D::from_expr(e);
  if (const auto a = e.affine(); a && a->cu == 0 && a->cs == 0) out.center = Observable1D::affine(a->cc, a->c0);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// orbit ------------------------------------------------------------------

struct OrbitCmd {
  MapOptions map;
  std::string x;
  long n = 10;
  std::string mode = "exact";

  void add(CLI::App* app) {
    map.add(app);
    app->add_option("--x", x, "starting point xu,xc,xs")->required();
    app->add_option("--n", n, "number of steps")->capture_default_str();
    app->add_option("--mode", mode, "exact or double")
        ->check(CLI::IsMember({"exact", "double"}))
        ->capture_default_str();
  }

  int run(Output& o) const {
    const BakerParams params = map.params();
    const auto parts = split(x, ',');
    if (parts.size() != 3) throw UsageError("--x needs three coordinates");
    const Point3<Rational> p{parse_rational(parts[0]), parse_rational(parts[1]), parse_rational(parts[2])};
    o.body << "n,xu,xc,xs,symbol\n";
    if (mode == "exact") {
      const auto pts = orbit(params, p, n);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        o.body << i << ',' << to_string(pts[i].xu) << ',' << to_string(pts[i].xc) << ',' << to_string(pts[i].xs)
               << ',' << symbol_name(classify(params, pts[i])) << '\n';
      }
    } else {
      const Point3<double> pd{p.xu.get_d(), p.xc.get_d(), p.xs.get_d()};
      const auto pts = orbit(params, pd, n);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        o.body << i << ',' << fmt(pts[i].xu) << ',' << fmt(pts[i].xc) << ',' << fmt(pts[i].xs) << ','
               << symbol_name(classify(params, pts[i])) << '\n';
      }
    }
    o.csv_footer();
    return 0;
  }
};

// apply-op ---------------------------------------------------------------

struct ApplyOpCmd {
  MapOptions map;
  std::string in;
  std::string op = "p0";
  unsigned n = 1;

  void add(CLI::App* app) {
    map.add(app);
    app->add_option("--in", in, "PC function JSON file")->required();
    app->add_option("--op", op,
                    "1D: p0, p-alpha, p-beta; 3D: p, pi0, p-star, p-01, p-10, p-00, p-hat-alpha, p-hat-beta")
        ->capture_default_str();
    app->add_option("--n", n, "number of applications")->capture_default_str();
  }

  int run(Output& o) const {
    const BakerParams params = map.params();
    const auto j = nlohmann::json::parse(read_file(in));
    const std::size_t dim = pcfun_json_dimension(j);
    if (dim == 1) {
      const ReducedOp rop = ReducedOp::from_params(params);
      std::function<PCFun1D(const PCFun1D&)> step;
      if (op == "p0") {
        step = [&](const PCFun1D& f) { return p0_apply(rop, f); };
      } else if (op == "p-alpha") {
        step = [&](const PCFun1D& f) { return p_alpha(rop, f).simplify(); };
      } else if (op == "p-beta") {
        step = [&](const PCFun1D& f) { return p_beta(rop, f).simplify(); };
      } else {
        throw UsageError("operator " + op + " does not act on 1D functions");
      }
      PCFun1D f = pcfun_from_json<1>(j);
      for (unsigned i = 0; i < n; ++i) f = step(f);
      o.body << pcfun_to_json(f).dump(2) << '\n';
      return 0;
    }
    if (dim != 3) throw UsageError("operators act on 1D or 3D functions");
    const bool tensor_op = op == "p-hat-alpha" || op == "p-hat-beta";
    if (tensor_op && !(params.M() == 2 && params.a() == Rational(1, 4) && params.b() == Rational(1, 4))) {
      throw UsageError(op + " is defined for M = 2, a = b = 1/4");
    }
    std::function<PCFun3D(const PCFun3D&)> step;
    if (op == "p") {
      step = [&](const PCFun3D& F) { return p_full_3d(params, F); };
    } else if (op == "pi0") {
      step = [](const PCFun3D& F) { return pi0(F); };
    } else if (op == "p-star" || op == "p-01" || op == "p-10" || op == "p-00") {
      const std::map<std::string, SplitPart> parts{{"p-star", SplitPart::Star},
                                                   {"p-01", SplitPart::ZeroOne},
                                                   {"p-10", SplitPart::OneZero},
                                                   {"p-00", SplitPart::ZeroZero}};
      const SplitPart which = parts.at(op);
      step = [&params, which](const PCFun3D& F) { return component_split_apply(params, which, F); };
    } else if (tensor_op) {
      const bool alpha = op == "p-hat-alpha";
      step = [alpha](const PCFun3D& F) {
        const TensorComponents T = tensor_analyze(F);
        return tensor_synthesize(alpha ? p_hat_alpha(T) : p_hat_beta(T)).simplify();
      };
    } else {
      throw UsageError("operator " + op + " does not act on 3D functions");
    }
    PCFun3D F = pcfun_from_json<3>(j);
    for (unsigned i = 0; i < n; ++i) F = step(F);
    o.body << pcfun_to_json(F).dump(2) << '\n';
    return 0;
  }
};

// ruin -------------------------------------------------------------------

struct RuinCmd {
  long l = 1;
  long n_max = 16;
  std::string mode = "exact";

  void add(CLI::App* app) {
    app->add_option("--l", l, "starting level")->capture_default_str();
    app->add_option("--n-max", n_max, "last step")->capture_default_str();
    app->add_option("--mode", mode, "exact or double")
        ->check(CLI::IsMember({"exact", "double"}))
        ->capture_default_str();
  }

  template <class T>
  void emit(Output& o, const std::function<std::string(const T&)>& show) const {
    RuinState<T> s = RuinState<T>::delta(l);
    for (long n = 0; n <= n_max; ++n) {
      if (n > 0) s = step(s);
      for (std::size_t i = 0; i < s.q.size(); ++i) o.body << n << ',' << i + 1 << ',' << show(s.q[i]) << '\n';
    }
  }

  int run(Output& o) const {
    if (n_max < 0) throw UsageError("--n-max must be non-negative");
    o.body << "n,l,q\n";
    if (mode == "exact") {
      emit<Rational>(o, [](const Rational& q) { return to_string(q); });
    } else {
      emit<double>(o, [](const double& q) { return fmt(q); });
    }
    o.csv_footer();
    return 0;
  }
};

struct RuinTransitionCmd {
  long l = 1;
  long lp = 1;
  std::string n = "4";
  bool grid = false;
  long l_max = 0;

  void add(CLI::App* app) {
    app->add_option("--l", l, "starting level")->capture_default_str();
    app->add_option("--lp", lp, "final level")->capture_default_str();
    app->add_option("--n", n, "step counts, comma separated")->capture_default_str();
    app->add_flag("--grid", grid, "all level pairs up to --l-max with matching parity");
    app->add_option("--l-max", l_max, "grid bound; 0 means floor(n^(1/4))")->capture_default_str();
  }

  int run(Output& o) const {
    const auto ns = parse_longs(n);
    o.body << "n,l,lp,p,ratio\n";
    if (grid) {
      const RatioReport r = asymptotic_ratio_report(ns, l_max);
      for (const auto& row : r.rows) {
        o.body << row.n << ',' << row.l << ',' << row.lp << ',' << fmt(row.p) << ',' << fmt(row.ratio) << '\n';
      }
    } else {
      for (long m : ns) {
        const double p = transition_prob_double(l, lp, m);
        const double ratio = m > 0 ? p * std::pow(static_cast<double>(m), 1.5) / static_cast<double>(l * lp) : 0.0;
        o.body << m << ',' << l << ',' << lp << ',' << fmt(p) << ',' << fmt(ratio) << '\n';
      }
    }
    o.csv_footer();
    return 0;
  }
};

// corr -------------------------------------------------------------------

struct CorrCmd {
  MapOptions map;
  std::string phi = "affine-center";
  std::string psi = "affine-center";
  std::string method = "squarewave";
  long n_max = 64;
  std::string n_list;
  std::size_t samples = 1000000;
  std::optional<std::uint64_t> seed;
  std::size_t batches = 100;
  unsigned level = 6;
  std::optional<double> budget;
  std::string mode = "double";
  bool no_dither = false;
  unsigned threads = 1;

  void add(CLI::App* app) {
    map.add(app);
    app->add_option("--phi", phi, "observable expression or preset")->capture_default_str();
    app->add_option("--psi", psi, "observable expression or preset")->capture_default_str();
    app->add_option("--method", method, "squarewave, haar or mc")
        ->check(CLI::IsMember({"squarewave", "haar", "mc"}))
        ->capture_default_str();
    app->add_option("--n-max", n_max, "report n = 0..n-max")->capture_default_str();
    app->add_option("--n-list", n_list, "report only these n, comma separated");
    app->add_option("--samples", samples, "Monte Carlo sample count")->capture_default_str();
    app->add_option("--seed", seed, "Monte Carlo seed");
    app->add_option("--batches", batches, "batches for standard errors")->capture_default_str();
    app->add_option("--level", level, "Haar projection depth for affine observables")->capture_default_str();
    app->add_option("--budget", budget, "largest admissible Haar truncation bound");
    app->add_option("--mode", mode, "exact or double (square-wave route)")
        ->check(CLI::IsMember({"exact", "double"}))
        ->capture_default_str();
    app->add_flag("--no-dither", no_dither, "plain floating orbits");
    app->add_option("--threads", threads, "worker count")->capture_default_str();
  }

  int run(Output& o) const {
    const BakerParams params = map.params();
    const ObservableSpec f = parse_observable(phi);
    const ObservableSpec g = parse_observable(psi);
    std::vector<long> wanted;
    if (!n_list.empty()) {
      wanted = parse_longs(n_list);
      for (long n : wanted) {
        if (n < 0) throw UsageError("n values must be non-negative");
      }
      std::sort(wanted.begin(), wanted.end());
      wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    } else {
      if (n_max < 0) throw UsageError("--n-max must be non-negative");
      for (long n = 0; n <= n_max; ++n) wanted.push_back(n);
    }

    CorrelationSeries series;
    const bool exact = mode == "exact";
    if (method == "mc") {
      if (exact) throw UsageError("Monte Carlo runs in floating point; drop --mode exact");
      if (!seed) throw UsageError("--seed is required for Monte Carlo");
      McOptions opts;
      opts.seed = *seed;
      opts.samples = samples;
      opts.batches = batches;
      opts.threads = threads;
      opts.dither = !no_dither;
      series = mc_correlation(params, f.obs, g.obs, wanted, opts);
    } else {
      if (!f.center || !g.center) {
        throw UsageError("exact methods need affine functions of xc or the staircase-4 preset");
      }
      ExactOptions opts;
      opts.op = ReducedOp::from_params(params);
      opts.rational = exact;
      opts.level = level;
      opts.error_budget = budget;
      const CorrMethod m = method == "haar" ? CorrMethod::ExactHaar : CorrMethod::ExactSquareWave;
      const CorrelationSeries full = exact_reduced_correlation(*f.center, *g.center, wanted.back(), m, opts);
      for (long n : wanted) series.records.push_back(full.records[static_cast<std::size_t>(n)]);
    }
    const bool with_exact = !series.records.empty() && series.records.front().exact.has_value();
    o.body << "n,value,method,err" << (with_exact ? ",exact" : "") << '\n';
    for (const auto& r : series.records) {
      o.body << r.n << ',' << fmt(r.value) << ',' << method_name(r.method) << ',' << fmt(r.err);
      if (with_exact) o.body << ',' << to_string(*r.exact);
      o.body << '\n';
    }
    o.csv_footer();
    return 0;
  }
};

// slope ------------------------------------------------------------------

CorrelationSeries read_series_csv(const std::string& text) {
  CorrelationSeries s;
  std::istringstream is(text);
  std::string line;
  int col_n = -1, col_v = -1;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (col_n < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "n") col_n = static_cast<int>(i);
        if (cells[i] == "value") col_v = static_cast<int>(i);
      }
      if (col_n < 0 || col_v < 0) throw UsageError("CSV needs n and value columns");
      continue;
    }
    if (static_cast<int>(cells.size()) <= std::max(col_n, col_v)) throw UsageError("short CSV row: " + line);
    CorrelationRecord r{};
    r.n = std::stol(cells[static_cast<std::size_t>(col_n)]);
    r.value = std::stod(cells[static_cast<std::size_t>(col_v)]);
    s.records.push_back(r);
  }
  if (s.records.empty()) throw UsageError("CSV holds no rows");
  return s;
}

struct SlopeCmd {
  std::string in;
  long n_lo = 0;
  long n_hi = 0;
  std::string fit = "power";
  std::size_t tail = 5;

  void add(CLI::App* app) {
    app->add_option("--in", in, "CSV written by corr")->required();
    app->add_option("--n-lo", n_lo, "first n of the window (default: smallest n >= 1)");
    app->add_option("--n-hi", n_hi, "last n of the window (default: largest n)");
    app->add_option("--fit", fit, "power or exp")->check(CLI::IsMember({"power", "exp"}))->capture_default_str();
    app->add_option("--tail", tail, "plateau entries to report")->capture_default_str();
  }

  int run(Output& o) const {
    const CorrelationSeries s = read_series_csv(read_file(in));
    long lo = n_lo, hi = n_hi;
    if (lo == 0) {
      lo = std::numeric_limits<long>::max();
      for (const auto& r : s.records) {
        if (r.n >= 1) lo = std::min(lo, r.n);
      }
    }
    if (hi == 0) {
      for (const auto& r : s.records) hi = std::max(hi, r.n);
    }
    nlohmann::json j;
    if (fit == "power") {
      const SlopeFit f = decay_slope_fit(s, lo, hi);
      j["slope"] = f.slope;
      j["intercept"] = f.intercept;
      j["residual"] = f.residual;
      j["plateau_tail"] = nlohmann::json::array();
      const std::size_t start = f.plateau.size() > tail ? f.plateau.size() - tail : 0;
      for (std::size_t i = start; i < f.plateau.size(); ++i) {
        j["plateau_tail"].push_back({{"n", f.plateau[i].first}, {"scaled", f.plateau[i].second}});
      }
    } else {
      const ExpFit f = exp_rate_fit(s, lo, hi);
      j["slope"] = f.slope;
      j["intercept"] = f.intercept;
      j["residual"] = f.residual;
      j["lambda"] = f.lambda;
    }
    j["n_lo"] = lo;
    j["n_hi"] = hi;
    o.body << j.dump(2) << '\n';
    return 0;
  }
};

// verify -----------------------------------------------------------------

struct VerifyIdentitiesCmd {
  MapOptions map;
  unsigned n = 4;
  unsigned count = 5;
  std::uint64_t seed = 1;

  void add(CLI::App* app) {
    map.add(app);
    app->add_option("--n", n, "largest power")->capture_default_str();
    app->add_option("--count", count, "random inputs")->capture_default_str();
    app->add_option("--seed", seed, "input seed")->capture_default_str();
  }

  int run(Output& o) const {
    const auto checks = verify_identities(map.params(), n, count, seed);
    o.body << report_json(checks).dump(2) << '\n';
    return all_pass(checks) ? 0 : 1;
  }
};

struct VerifyAllCmd {
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "input seed")->capture_default_str();
    app->add_option("--threads", threads, "worker count")->capture_default_str();
  }

  int run(Output& o) const {
    const auto checks = verify_all(seed, threads);
    o.body << report_json(checks).dump(2) << '\n';
    return all_pass(checks) ? 0 : 1;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Correlation decay experiments for heterochaos baker maps", "hcb"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::string out_path;

  OrbitCmd orbit_cmd;
  ApplyOpCmd apply_cmd;
  RuinCmd ruin_cmd;
  RuinTransitionCmd transition_cmd;
  CorrCmd corr_cmd;
  SlopeCmd slope_cmd;
  VerifyIdentitiesCmd identities_cmd;
  VerifyAllCmd all_cmd;

  std::vector<std::pair<CLI::App*, std::function<int(Output&)>>> subs;
  auto add = [&](auto& cmd, const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    cmd.add(sub);
    sub->add_option("--out", out_path, "output file (default stdout)");
    subs.emplace_back(sub, [&cmd](Output& o) { return cmd.run(o); });
  };
  add(orbit_cmd, "orbit", "orbit of a point under f");
  add(apply_cmd, "apply-op", "apply a transfer operator to a PC function");
  add(ruin_cmd, "ruin", "absorbed walk distribution q_l^(n)");
  add(transition_cmd, "ruin-transition", "closed-form transition probabilities");
  add(corr_cmd, "corr", "correlation series");
  add(slope_cmd, "slope", "decay fit of a corr CSV");
  add(identities_cmd, "verify-identities", "operator identity checks");
  add(all_cmd, "verify-all", "full invariant suite");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    const int code = app.exit(e, out, msg);
    if (code == 0) return 0;
    err << "usage error: " << msg.str();
    return 2;
  }

  for (const auto& [sub, fn] : subs) {
    if (!sub->parsed()) continue;
    try {
      Output o;
      o.path = out_path;
      o.config = canonical_config(sub);
      const int code = fn(o);
      o.flush(out);
      return code;
    } catch (const UsageError& e) {
      err << "usage error: " << e.what() << '\n';
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
    } catch (const nlohmann::json::exception& e) {
      err << "error: bad JSON: " << e.what() << '\n';
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
    }
    return 2;
  }
  return 2;
}

}  // namespace hcb::cli
