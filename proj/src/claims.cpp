#include "curvkit/claims.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>

#include "curvkit/catalog.hpp"
#include "curvkit/classifier.hpp"
#include "curvkit/operators.hpp"

namespace curvkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Sampled catalog metrics, built once per process.

struct Fixture {
  CatalogEntry entry;
  std::unique_ptr<Geometry> geometry;
  std::unique_ptr<SampledGeometry> sg;
  SymbolTable symbols;
  std::map<std::pair<double, double>, std::vector<FitResult>> fits;

  double closed(const std::string& source, std::size_t p) const {
    Evaluator ev(sg->grid().points[p], sg->grid().params);
    return ev(parse(source, &symbols));
  }

  const std::vector<FitResult>& all_fits(const Tolerance& tol) {
    auto key = std::make_pair(tol.rel, tol.abs_floor);
    auto it = fits.find(key);
    if (it == fits.end()) it = fits.emplace(key, classify(*sg, tol)).first;
    return it->second;
  }

  const FitResult& fit(const std::string& name, const Tolerance& tol) {
    for (const auto& f : all_fits(tol))
      if (f.name == name) return f;
    throw std::logic_error("no detector named " + name);
  }

  std::size_t point_at(int coordinate, double value) const {
    const auto& pts = sg->grid().points;
    for (std::size_t p = 0; p < pts.size(); ++p)
      if (pts[p][coordinate] == value) return p;
    throw std::logic_error("grid has no point with coordinate value " + std::to_string(value));
  }

  std::size_t size() const { return sg->size(); }
};

std::unique_ptr<Fixture> build_fixture(CatalogEntry entry) {
  auto fx = std::make_unique<Fixture>();
  fx->entry = std::move(entry);
  fx->geometry = make_geometry(fx->entry);
  SampleGrid grid = default_grid(fx->entry.metric, fx->entry.metric.parameters);
  validate_grid(fx->entry.metric, grid);
  fx->sg = std::make_unique<SampledGeometry>(*fx->geometry, std::move(grid));
  fx->symbols = fx->entry.metric.symbols();
  fx->symbols.definitions = fx->entry.definitions;
  return fx;
}

std::mutex g_fixture_mutex;

Fixture& fixture(const std::string& name) {
  static std::map<std::string, std::unique_ptr<Fixture>> cache;
  std::lock_guard lock(g_fixture_mutex);
  auto& slot = cache[name];
  if (!slot) slot = build_fixture(lookup(name));
  return *slot;
}

// ---------------------------------------------------------------------------
// Bookkeeping

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

struct Tally {
  bool failed = false;
  bool disputed = false;
  std::vector<std::string> details;

  bool check(bool ok, const std::string& what) {
    details.push_back(std::string(ok ? "[ok] " : "[FAIL] ") + what);
    if (!ok) failed = true;
    return ok;
  }
  void dispute(const std::string& what) {
    details.push_back("[disputed] " + what);
    disputed = true;
  }
  void note(const std::string& what) { details.push_back("[note] " + what); }

  ClaimResult result(int id, std::string title) const {
    ClaimResult r;
    r.id = id;
    r.title = std::move(title);
    r.status = failed ? ClaimStatus::fail : disputed ? ClaimStatus::disputed : ClaimStatus::pass;
    r.details = details;
    return r;
  }
};

bool verdict_is(Tally& t, const FitResult& f, Verdict want) {
  return t.check(f.verdict == want,
                 f.name + " " + to_string(f.verdict) + " (max residual " + sci(f.max_residual()) + ")");
}

// Largest |fitted - closed| / max(|closed|, floor) over the grid.
double worst_relative(Fixture& fx, const FitResult& fit, const std::string& coef, const std::string& expr,
                      double floor = 1e-12) {
  double worst = 0.0;
  for (std::size_t p = 0; p < fx.size(); ++p) {
    const double v = fit.coefficient(p, coef);
    const double c = fx.closed(expr, p);
    if (!std::isfinite(v) || !std::isfinite(c)) return kInf;
    worst = std::max(worst, std::fabs(v - c) / std::max(std::fabs(c), floor));
  }
  return worst;
}

bool matches_everywhere(Tally& t, Fixture& fx, const FitResult& fit, const std::string& coef, const std::string& label,
                        const std::string& expr, double rel, double floor = 1e-12) {
  const double err = worst_relative(fx, fit, coef, expr, floor);
  return t.check(err <= rel, label + " matches its closed form at every grid point (max rel err " + sci(err) +
                                 ", bound " + sci(rel) + ")");
}

bool value_at(Tally& t, const FitResult& fit, std::size_t p, const std::string& coef, const std::string& label,
              double expected, double bound, bool relative) {
  const double v = fit.coefficient(p, coef);
  const double err = relative ? std::fabs(v - expected) / std::fabs(expected) : std::fabs(v - expected);
  return t.check(std::isfinite(v) && err <= bound, label + " = " + fmt(v) + " (expected " + fmt(expected) + ", " +
                                                       (relative ? "rel" : "abs") + " err " + sci(err) + ")");
}

// Melvin closed forms in B0 and r.
namespace melvin_forms {
const std::string P = "(4 + B0^2*r^2)";
const std::string M = "(4 - B0^2*r^2)";
const std::string omega = "(-16 - 24*B0^2*r^2 + 3*B0^4*r^4)";
const std::string L1 = "32*B0^2*" + M + "/" + P + "^4";
const std::string L2 = "-32*B0^2*(16 + 24*B0^2*r^2 - 3*B0^4*r^4)/(3*" + M + "*" + P + "^4)";
const std::string L3 = "-2048*B0^2*" + M + "/(" + omega + "*" + P + "^4)";
const std::string L4 = "1 + 64/" + omega;
const std::string Pi_r = "-16*B0^2*r/(" + M + "*" + P + ")";
const std::string N1 = "-3*" + M + "*" + P + "^4/(8192*B0^2)";
const std::string N3 = "-8*B0^2*" + M + "/" + P + "^4";
const std::string alpha = "256*B0^2/" + P + "^4";
const std::string lambda = "-65536*B0^2/" + P + "^8";
const std::string norm_delta = "512*B0^2/" + P + "^4";
const std::string chaki_alpha_printed = "-256*B0^2/" + P;
const std::string chaki_alpha_corrected = "-256*B0^2/" + P + "^4";
const std::string Pi_1 = "-4*sqrt(2)*B0/" + P;
const std::string Pi_3 = "4*sqrt(2)*B0/sqrt(16 + 8*B0^2*r^2 + B0^4*r^4)";
const std::string delta_3 = "4*sqrt(2)*B0/" + P;
}  // namespace melvin_forms

constexpr int kR = 1;  // chart slot of r in every catalog metric

// ---------------------------------------------------------------------------
// 1. Golden tables

ClaimResult criterion_1(const ClaimOptions& opt) {
  Tally t;
  for (const char* name : {"melvin_type_generic", "melvin_type_trig", "base_3metric", "base_3metric_trig"}) {
    Fixture& fx = fixture(name);
    CatalogEntry entry = fx.entry;
    if (opt.tamper_golden && entry.metric.dim() == 3) {
      for (auto& g : entry.golden)
        if (g.tensor == "R" && g.index == std::vector<int>{1, 2, 1, 2}) g.printed = "2*(" + g.printed + ")";
    }
    const GoldenReport rep = golden_check(entry, *fx.sg, 1e-10, opt.tol.abs_floor);
    t.note(std::string(name) + ": " + std::to_string(rep.outcomes.size()) + " printed entries, " +
           std::to_string(rep.count(GoldenStatus::match)) + " match, " +
           std::to_string(rep.count(GoldenStatus::disputed)) + " disputed, " +
           std::to_string(rep.count(GoldenStatus::mismatch)) + " mismatch");
    for (const auto& o : rep.outcomes) {
      if (o.status == GoldenStatus::match) continue;
      std::string idx;
      for (int i : o.index) idx += std::to_string(i);
      const std::string what = std::string(name) + " " + o.tensor + "_" + idx;
      const bool sanctioned = o.tensor == "S" && o.index == std::vector<int>{4, 4} &&
                              o.status == GoldenStatus::disputed && o.sign_only;
      if (sanctioned) {
        t.dispute(what + ": magnitude matches, sign differs");
      } else if (o.status == GoldenStatus::disputed) {
        t.check(false, what + " does not match as printed; " + o.note);
      } else {
        t.check(false, what + " mismatch (max rel err " + sci(o.max_error) + ")");
      }
    }
    for (const auto& [tensor, idx] : rep.unlisted) {
      std::string s;
      for (int i : idx) s += std::to_string(i);
      t.note(std::string(name) + " " + tensor + "_" + s + " is nonzero but not printed");
    }
  }
  return t.result(1, "printed component tables match the engine");
}

// ---------------------------------------------------------------------------
// 2-10. Melvin

ClaimResult criterion_2(const ClaimOptions&) {
  Tally t;
  Fixture& fx = fixture("melvin");
  double worst_k = 0.0, worst_ck = 0.0, worst_rw = 0.0;
  for (const auto& p : fx.sg->points()) {
    worst_k = std::max(worst_k, std::fabs(p.kappa) / max_abs(p.field("J")));
    worst_ck = std::max(worst_ck, max_abs(p.field("C") - p.field("K")) / max_abs(p.field("C")));
    worst_rw = std::max(worst_rw, max_abs(p.field("R") - p.field("W")) / max_abs(p.field("R")));
  }
  t.check(worst_k <= 1e-10, "|kappa| / max|J| <= " + sci(worst_k));
  t.check(worst_ck <= 1e-10, "max|C - K| / max|C| <= " + sci(worst_ck));
  t.check(worst_rw <= 1e-10, "max|R - W| / max|R| <= " + sci(worst_rw));
  return t.result(2, "Melvin: kappa = 0, C = K, R = W");
}

ClaimResult criterion_3(const ClaimOptions& opt) {
  using namespace melvin_forms;
  Tally t;
  Fixture& fx = fixture("melvin");
  const std::size_t p1 = fx.point_at(kR, 1.0);
  for (const char* name : {"pseudosymmetric[R.R]", "pseudosymmetric[C.R]"}) {
    const FitResult& f = fx.fit(name, opt.tol);
    if (!verdict_is(t, f, Verdict::holds)) continue;
    matches_everywhere(t, fx, f, "L", std::string(name) + " L1", L1, 1e-8);
    value_at(t, f, p1, "L", std::string(name) + " L1(r=1)", 0.1536, 1e-8, true);
  }
  return t.result(3, "Melvin: R.R = L1 Q(g,R) and C.R = L1 Q(g,R)");
}

ClaimResult criterion_4(const ClaimOptions& opt) {
  using namespace melvin_forms;
  Tally t;
  Fixture& fx = fixture("melvin");
  const std::size_t p1 = fx.point_at(kR, 1.0);
  const FitResult& a = fx.fit("sps[R.R-Q(S,R)~Q(g,C)]", opt.tol);
  if (verdict_is(t, a, Verdict::holds)) {
    value_at(t, a, p1, "L", "L2(r=1)", -1184.0 / 5625.0, 1e-6, false);
    matches_everywhere(t, fx, a, "L", "L2", L2, 1e-6);
  }
  const FitResult& b = fx.fit("identity[Q(S,C)=C.R-R.C]", opt.tol);
  verdict_is(t, b, Verdict::holds);
  t.check(b.max_residual() <= 1e-8, "Q(S,C) - (C.R - R.C) relative residual " + sci(b.max_residual()));
  const FitResult& c = fx.fit("combination[C.R-R.C~Q(g,R),Q(S,R)]", opt.tol);
  if (verdict_is(t, c, Verdict::holds)) {
    matches_everywhere(t, fx, c, "L3", "L3", L3, 1e-6);
    matches_everywhere(t, fx, c, "L4", "L4", L4, 1e-6);
  }
  return t.result(4, "Melvin: (a) R.R - Q(S,R) = L2 Q(g,C), (b) Q(S,C) = C.R - R.C, (c) L3/L4 fit");
}

ClaimResult criterion_5(const ClaimOptions& opt) {
  using namespace melvin_forms;
  Tally t;
  Fixture& fx = fixture("melvin");
  const std::size_t p1 = fx.point_at(kR, 1.0);
  for (const char* name : {"two_form_recurrent[C]", "two_form_recurrent[K]"}) {
    const FitResult& f = fx.fit(name, opt.tol);
    if (!verdict_is(t, f, Verdict::holds)) continue;
    matches_everywhere(t, fx, f, "Pi_2", std::string(name) + " Pi_r", Pi_r, 1e-8);
    double others = 0.0;
    for (std::size_t p = 0; p < fx.size(); ++p)
      for (const char* k : {"Pi_1", "Pi_3", "Pi_4"}) others = std::max(others, std::fabs(f.coefficient(p, k)));
    t.check(others <= 1e-10, std::string(name) + " Pi_t, Pi_z, Pi_phi vanish (max " + sci(others) + ")");
    value_at(t, f, p1, "Pi_2", std::string(name) + " Pi_r(r=1)", -16.0 / 15.0, 1e-8, false);
  }
  return t.result(5, "Melvin: conformal curvature 2-forms are recurrent");
}

ClaimResult criterion_6(const ClaimOptions& opt) {
  using namespace melvin_forms;
  Tally t;
  Fixture& fx = fixture("melvin");
  const std::size_t p1 = fx.point_at(kR, 1.0);
  const FitResult& f = fx.fit("roter", opt.tol);
  if (verdict_is(t, f, Verdict::holds)) {
    double n2 = 0.0;
    for (std::size_t p = 0; p < fx.size(); ++p) n2 = std::max(n2, std::fabs(f.coefficient(p, "N2") - 0.5));
    t.check(n2 <= 1e-8, "N2 = 1/2 at every grid point (max abs err " + sci(n2) + ")");
    value_at(t, f, p1, "N1", "N1(r=1)", -5625.0 / 8192.0, 1e-6, true);
    value_at(t, f, p1, "N3", "N3(r=1)", -0.0384, 1e-6, true);
    matches_everywhere(t, fx, f, "N1", "N1", N1, 1e-8);
    matches_everywhere(t, fx, f, "N3", "N3", N3, 1e-8);
  }
  return t.result(6, "Melvin: Roter type");
}

ClaimResult criterion_7(const ClaimOptions& opt) {
  using namespace melvin_forms;
  Tally t;
  Fixture& fx = fixture("melvin");
  const std::size_t p1 = fx.point_at(kR, 1.0);
  const FitResult& q = fx.fit("quasi_einstein", opt.tol);
  verdict_is(t, q, Verdict::holds);
  t.check(q.order == 2, "rank(S - alpha g) = " + std::to_string(q.order));
  value_at(t, q, p1, "alpha", "alpha(r=1)", 0.4096, 1e-8, false);
  matches_everywhere(t, fx, q, "alpha", "alpha", alpha, 1e-8);
  const FitResult& e = fx.fit("ein_level", opt.tol);
  verdict_is(t, e, Verdict::holds);
  t.check(e.order == 2, "Ein level " + std::to_string(e.order));
  if (e.order == 2) {
    double n1 = 0.0;
    for (std::size_t p = 0; p < fx.size(); ++p) n1 = std::max(n1, std::fabs(e.coefficient(p, "n1")));
    t.check(n1 <= 1e-8, "S^2 + lambda g = 0 has no S term (max |n1| " + sci(n1) + ")");
    value_at(t, e, p1, "n0", "lambda(r=1)", -0.16777216, 1e-8, false);
    matches_everywhere(t, fx, e, "n0", "lambda", lambda, 1e-8);
  }
  return t.result(7, "Melvin: 2-quasi-Einstein and Ein(2)");
}

ClaimResult criterion_8(const ClaimOptions& opt) {
  using namespace melvin_forms;
  Tally t;
  Fixture& fx = fixture("melvin");
  const std::size_t p1 = fx.point_at(kR, 1.0);
  const FitResult& f = fx.fit("chaki_generalized_quasi_einstein", opt.tol);
  if (!verdict_is(t, f, Verdict::holds)) return t.result(8, "Melvin: generalized quasi-Einstein (Chaki)");
  double np = 0.0;
  for (std::size_t p = 0; p < fx.size(); ++p) np = std::max(np, std::fabs(f.coefficient(p, "norm_Pi")));
  t.check(np <= 1e-10, "Pi is null: max |g(Pi,Pi)| = " + sci(np));
  value_at(t, f, p1, "norm_delta", "g(delta,delta)(r=1)", 0.8192, 1e-6, false);
  matches_everywhere(t, fx, f, "norm_delta", "g(delta,delta)", norm_delta, 1e-8);
  matches_everywhere(t, fx, f, "beta", "beta = -1", "-1", 1e-8);
  matches_everywhere(t, fx, f, "gamma", "gamma = 1", "1", 1e-8);
  matches_everywhere(t, fx, f, "Pi_1", "Pi_t", Pi_1, 1e-8);
  matches_everywhere(t, fx, f, "Pi_3", "Pi_z", Pi_3, 1e-8);
  matches_everywhere(t, fx, f, "delta_3", "delta_z", delta_3, 1e-8);
  const double printed = worst_relative(fx, f, "alpha", chaki_alpha_printed);
  const double corrected = worst_relative(fx, f, "alpha", chaki_alpha_corrected);
  if (printed <= 1e-8) {
    t.check(true, "alpha matches -256 B0^2/(4+B0^2 r^2)");
  } else if (corrected <= 1e-8) {
    t.dispute("alpha(r=1) = " + fmt(f.coefficient(p1, "alpha")) + " equals -256 B0^2/(4+B0^2 r^2)^4 (max rel err " +
              sci(corrected) + "), not the printed -256 B0^2/(4+B0^2 r^2)");
  } else {
    t.check(false, "alpha matches neither the printed nor the corrected closed form");
  }
  return t.result(8, "Melvin: generalized quasi-Einstein (Chaki)");
}

ClaimResult criterion_9(const ClaimOptions& opt) {
  Tally t;
  Fixture& fx = fixture("melvin");
  verdict_is(t, fx.fit("compatible[R,S]", opt.tol), Verdict::holds);
  bool any_fail = false;
  for (const char* h : {"C", "W", "K", "P"}) {
    const FitResult& f = fx.fit(std::string("compatible[") + h + ",S]", opt.tol);
    t.note(f.name + " " + to_string(f.verdict));
    any_fail = any_fail || f.verdict == Verdict::fails;
  }
  t.check(any_fail, "S fails to be compatible with at least one of C, W, K, P");
  return t.result(9, "Melvin: Ricci tensor is Riemann compatible only");
}

ClaimResult criterion_10(const ClaimOptions& opt) {
  using namespace melvin_forms;
  Tally t;
  Fixture& fx = fixture("melvin");
  const FitResult& f = fx.fit("pseudosymmetric[R.F]", opt.tol);
  if (verdict_is(t, f, Verdict::holds)) {
    const FitResult& r = fx.fit("pseudosymmetric[R.R]", opt.tol);
    double worst = 0.0;
    for (std::size_t p = 0; p < fx.size(); ++p)
      worst = std::max(worst, std::fabs(f.coefficient(p, "L") - r.coefficient(p, "L")) / std::fabs(r.coefficient(p, "L")));
    t.check(worst <= 1e-8, "L_F = L1 pointwise (max rel err " + sci(worst) + ")");
    matches_everywhere(t, fx, f, "L", "L_F", L1, 1e-8);
  }
  // The printed (R.F)_1412 carries no exponent on its denominator; recover it.
  double lo = kInf, hi = -kInf;
  for (std::size_t p = 0; p < fx.size(); ++p) {
    const NumericTensor rf = named_tensor((*fx.sg)[p], "RF");
    const double r = fx.sg->grid().points[p][kR];
    const double B0 = fx.sg->grid().params.at("B0");
    const double num = 16 * B0 * B0 * B0 * r * (4 - B0 * B0 * r * r);
    const double e = std::log(std::fabs(num / rf(0, 3, 0, 1))) / std::log(4 + B0 * B0 * r * r);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  t.note("(R.F)_1412 = -16 B0^3 r (4 - B0^2 r^2)/(4 + B0^2 r^2)^p with p in [" + fmt(lo) + ", " + fmt(hi) + "]");
  return t.result(10, "Melvin: R.F = L_F Q(g,F) with L_F = L1");
}

// ---------------------------------------------------------------------------
// 11-12. Base metric and Melvin-type examples

ClaimResult criterion_11(const ClaimOptions& opt) {
  Tally t;
  Fixture& fx = fixture("base_3metric");
  const FitResult& ps = fx.fit("pseudosymmetric[R.R]", opt.tol);
  if (verdict_is(t, ps, Verdict::holds)) matches_everywhere(t, fx, ps, "L", "(1) L", "exp(-2*f)*fpp", 1e-8);

  const FitResult& qe = fx.fit("quasi_einstein", opt.tol);
  verdict_is(t, qe, Verdict::holds);
  t.check(qe.order == 1, "(2) rank(S - alpha g) = " + std::to_string(qe.order));
  // f = ln(1+r) has f'^2 + f'' = 0, so alpha vanishes identically: compare absolutely.
  matches_everywhere(t, fx, qe, "alpha", "(2) alpha", "exp(-2*f)*(fp^2 + fpp)", 1e-8, 1.0);

  const FitResult& ein = fx.fit("ein_level", opt.tol);
  verdict_is(t, ein, Verdict::holds);
  if (t.check(ein.order == 2, "(3) Ein level " + std::to_string(ein.order))) {
    matches_everywhere(t, fx, ein, "n0", "(3) mu2", "2*exp(-4*f)*fpp*(fp^2 + fpp)", 1e-8, 1.0);
    const double printed = worst_relative(fx, ein, "n1", "-exp(-2*f)*(fp^2 + 3*f*fpp)");
    if (matches_everywhere(t, fx, ein, "n1", "(3) mu1 = -e^{-2f}(f'^2 + 3f'')", "-exp(-2*f)*(fp^2 + 3*fpp)", 1e-8) &&
        printed > 1e-8)
      t.dispute("(3) printed mu1 = -e^{-2f}(f'^2 + 3 f f'') is off by " + sci(printed) + " relative");
  }

  const FitResult& kr = fx.fit("recurrent[K]", opt.tol);
  if (verdict_is(t, kr, Verdict::holds))
    matches_everywhere(t, fx, kr, "Pi_2", "(4) K recurrency Pi_r", "2*(fppp - fp*fpp - fp^3)/(fp^2 + 2*fpp)", 1e-8);

  // (5): the printed covector has f'^2 + f'' in its denominator, which is
  // identically zero for f = ln(1+r).
  double denom = 0.0;
  for (std::size_t p = 0; p < fx.size(); ++p) denom = std::max(denom, std::fabs(fx.closed("fp^2 + fpp", p)));
  const FitResult& rr = fx.fit("ricci_1form_recurrency", opt.tol);
  t.check(false, "(5) " + rr.name + " " + to_string(rr.verdict) + " for f = ln(1+r): f'^2 + f'' vanishes (max " +
                     sci(denom) + "), so the printed covector is undefined");
  Fixture& sq = fixture("base_3metric_square");
  const FitResult& rs = sq.fit("ricci_1form_recurrency", opt.tol);
  if (rs.verdict == Verdict::holds) {
    const std::string printed = "-(fppp - fp*fpp - fp^3)/(fp^2 + fpp)";
    const double as_printed = worst_relative(sq, rs, "Pi_2", printed);
    const double flipped = worst_relative(sq, rs, "Pi_2", "-(" + printed + ")");
    t.note("(5) with f = ln(1+r^2) the 1-form recurrency holds; printed Pi_r max rel err " + sci(as_printed) +
           ", with opposite sign " + sci(flipped));
  } else {
    t.note("(5) with f = ln(1+r^2): " + rs.name + " " + to_string(rs.verdict));
  }
  return t.result(11, "base metric f = ln(1+r): five structures");
}

ClaimResult criterion_12(const ClaimOptions& opt) {
  Tally t;
  {
    Fixture& fx = fixture("melvin_type_conformally_flat");
    double worst = 0.0;
    for (const auto& p : fx.sg->points()) worst = std::max(worst, max_abs(p.field("C")) / max_abs(p.field("R")));
    t.check(worst <= 1e-10, "f = ln(r/(r+2))/2: max|C| / max|R| = " + sci(worst));
  }
  {
    Fixture& fx = fixture("melvin_type_pseudosymmetric");
    const FitResult& f = fx.fit("pseudosymmetric[R.R]", opt.tol);
    if (verdict_is(t, f, Verdict::holds))
      matches_everywhere(t, fx, f, "L", "f = ln(1+r^2): L_R", "exp(-2*f)*(fp - r*fp^2)/r", 1e-8);
  }

  Fixture& fx = fixture("melvin_type_generic");
  const std::string LC = "(exp(-2*f)/(3*r)*(2*fp - 2*r*fp^2 + r*fpp))";
  const std::string LR = "(exp(-2*f)/r*(fp - r*fp^2))";
  const std::string Lr = "(fp + r*fpp)";
  const FitResult& wps = fx.fit("pseudosymmetric[C.C]", opt.tol);
  if (verdict_is(t, wps, Verdict::holds)) matches_everywhere(t, fx, wps, "L", "(WPS) L_C", LC, 1e-8);

  const FitResult& sps = fx.fit("sps[R.R-Q(S,R)~Q(g,C)]", opt.tol);
  if (verdict_is(t, sps, Verdict::holds)) {
    matches_everywhere(t, fx, sps, "L", "(SPS) L", "-exp(-4*f)*fp/(3*r*" + LC + ")*(3*fp^2 - 2*r*fp^3 + fpp)", 1e-8);
    matches_everywhere(t, fx, sps, "L", "(SPS) L, closed form",
                       "-exp(-2*f)*fp*(3*fp^2 - 2*r*fp^3 + fpp)/(2*fp - 2*r*fp^2 + r*fpp)", 1e-8);
  }

  // (GRT) with exactly the four printed terms, so the coefficients are unique.
  std::vector<NumericTensor> lhs;
  std::vector<std::vector<NumericTensor>> basis;
  for (const auto& p : fx.sg->points()) {
    const auto &g = p.g(), &S = p.field("S"), &S2 = p.field("S2");
    lhs.push_back(p.field("R"));
    basis.push_back({kulkarni_nomizu(g, S), kulkarni_nomizu(g, S2), kulkarni_nomizu(S, S), kulkarni_nomizu(S, S2)});
  }
  const FitResult grt = fit_combination("grt", lhs, basis, {"L12", "L13", "L22", "L23"}, opt.tol);
  if (verdict_is(t, grt, Verdict::holds)) {
    t.check(grt.nullspace_dim == 0, "(GRT) coefficients are unique (nullspace " + std::to_string(grt.nullspace_dim) + ")");
    const std::string D = "(r*exp(2*f)*" + LR + " + fp)";
    const std::string L13 = "(-exp(4*f)*r^2*fpp/(4*" + D + "*" + Lr + "^2))";
    matches_everywhere(t, fx, grt, "L12", "(GRT) L12",
                       "r*(exp(2*f)*" + LR + " + fpp)/(2*" + D + ") + fp/(2*" + Lr + ")", 1e-8);
    matches_everywhere(t, fx, grt, "L22", "(GRT) L22",
                       L13 + "*" + Lr + "*exp(-2*f) - r^2*exp(4*f)/(2*" + Lr + "^2)*" + LR, 1e-8);
    const double e13 = worst_relative(fx, grt, "L13", L13);
    const double e23 = worst_relative(fx, grt, "L23", "2*r*exp(2*f)*" + L13 + "*" + LR);
    if (e13 > 1e-8 &&
        worst_relative(fx, grt, "L13", "exp(-4*f)*" + L13) <= 1e-8)
      t.dispute("(GRT) fitted L13 is e^{-4f} times the printed L13");
    else
      t.check(e13 <= 1e-8, "(GRT) L13 (max rel err " + sci(e13) + ")");
    if (e23 > 1e-8 &&
        worst_relative(fx, grt, "L23", "-2*r*exp(2*f)*" + L13 + "*" + LR + "*exp(2*f)") <= 1e-8)
      t.dispute("(GRT) fitted L23 is -e^{2f} times the printed L23");
    else
      t.check(e23 <= 1e-8, "(GRT) L23 (max rel err " + sci(e23) + ")");
  }

  const FitResult& ein = fx.fit("ein_level", opt.tol);
  verdict_is(t, ein, Verdict::holds);
  if (t.check(ein.order == 3, "(Ein3) Ein level " + std::to_string(ein.order))) {
    const std::string a22 = "(-r*exp(2*f)*" + LR + "/(r*exp(2*f)*" + LR + " + fp))";
    const std::string a11 = "(-(2*" + LR + " + exp(-2*f)/r*" + Lr + "*" + a22 + "))";
    const std::string a33 = "(-r*exp(2*f)/" + Lr + "*(" + a22 + " + 2*r*exp(2*f)/" + Lr + "*" + LR + "))";
    const std::string a44 = "(-r^2/" + Lr + "^2*exp(4*f)*" + a22 + ")";
    matches_everywhere(t, fx, ein, "n0", "(Ein3) a11/a44", a11 + "/" + a44, 1e-8);
    matches_everywhere(t, fx, ein, "n1", "(Ein3) a22/a44", a22 + "/" + a44, 1e-8);
    const double e33 = worst_relative(fx, ein, "n2", a33 + "/" + a44);
    if (e33 > 1e-8 && worst_relative(fx, ein, "n2", "-" + a33 + "/" + a44) <= 1e-8)
      t.dispute("(Ein3) fitted a33/a44 has the opposite sign of the printed a33");
    else
      t.check(e33 <= 1e-8, "(Ein3) a33/a44 (max rel err " + sci(e33) + ")");
  }

  const FitResult& c2 = fx.fit("two_form_recurrent[C]", opt.tol);
  if (verdict_is(t, c2, Verdict::holds)) {
    const std::string bracket = "(2*fp - 2*r*fp^2 + 2*r^2*fp^3 - 2*r*fpp + 3*r^2*fp*fpp - r^2*fppp)";
    const double printed = worst_relative(fx, c2, "Pi_2", "-3*r*exp(2*f)/" + LC + "*" + bracket);
    const double corrected = worst_relative(fx, c2, "Pi_2", "-exp(-2*f)/(3*r^2*" + LC + ")*" + bracket);
    if (printed <= 1e-8)
      t.check(true, "(c2f) Pi_r matches");
    else if (corrected <= 1e-8)
      t.dispute("(c2f) Pi_r = -e^{-2f}/(3 r^2 L_C) (...), not -3 r e^{2f}/L_C (...) (max rel err " + sci(corrected) + ")");
    else
      t.check(false, "(c2f) Pi_r matches neither form");
  }
  return t.result(12, "Melvin-type examples and (WPS), (SPS), (GRT), (Ein3), conformal 2-forms");
}

// ---------------------------------------------------------------------------
// 13. Properties

const std::vector<std::string>& property_metrics() {
  static const std::vector<std::string> names{"melvin",
                                              "minkowski",
                                              "melvin_type_generic",
                                              "melvin_type_trig",
                                              "melvin_type_conformally_flat",
                                              "melvin_type_pseudosymmetric",
                                              "base_3metric",
                                              "base_3metric_trig",
                                              "base_3metric_square"};
  return names;
}

double scale_of(const NumericTensor& t, double floor) { return std::max(max_abs(t), floor); }

std::vector<PropertyOutcome> curvature_properties(const Tolerance& tol) {
  std::vector<PropertyOutcome> out;
  for (const auto& name : property_metrics()) {
    Fixture& fx = fixture(name);
    const int n = fx.geometry->dim();
    double sym = 0.0, bianchi2 = 0.0, trace = 0.0;
    for (const auto& p : fx.sg->points()) {
      const NumericTensor& R = p.field("R");
      const double s = scale_of(R, tol.abs_floor);
      for_each_index(n, 4, [&](const MultiIndex& i, std::size_t) {
        const int a = i[0], b = i[1], c = i[2], d = i[3];
        const double v = R(a, b, c, d);
        sym = std::max({sym, std::fabs(v + R(b, a, c, d)) / s, std::fabs(v + R(a, b, d, c)) / s,
                        std::fabs(v - R(c, d, a, b)) / s, std::fabs(v + R(a, c, d, b) + R(a, d, b, c)) / s});
      });
      const NumericTensor& dR = p.field("nablaR");
      const double ds = scale_of(dR, tol.abs_floor);
      for_each_index(n, 5, [&](const MultiIndex& i, std::size_t) {
        const int a = i[0], b = i[1], c = i[2], d = i[3], e = i[4];
        bianchi2 = std::max(bianchi2, std::fabs(dR(a, b, c, d, e) + dR(a, b, d, e, c) + dR(a, b, e, c, d)) / ds);
      });
      const NumericTensor& C = p.field("C");
      const NumericTensor& gi = p.ginv();
      const double cs = scale_of(R, tol.abs_floor) * max_abs(gi) * n;
      for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) {
          double tr = 0.0;
          for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) tr += gi(a, c) * C(a, b, c, d);
          trace = std::max(trace, std::fabs(tr) / cs);
        }
      if (n == 3) trace = std::max(trace, max_abs(C) / s);
    }
    out.push_back({name + ": Riemann symmetries and first Bianchi identity", sym <= 1e-10, sci(sym)});
    out.push_back({name + ": second Bianchi identity", bianchi2 <= 1e-9, sci(bianchi2)});
    out.push_back({name + (n == 3 ? ": C vanishes" : ": C is trace-free"), trace <= 1e-10, sci(trace)});
  }
  return out;
}

NumericTensor random_tensor(std::mt19937_64& rng, int n, int rank) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  NumericTensor t(n, rank);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = u(rng);
  return t;
}

NumericTensor random_symmetric(std::mt19937_64& rng, int n) {
  NumericTensor t = random_tensor(rng, n, 2);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < a; ++b) t(a, b) = t(b, a);
  return t;
}

NumericTensor random_riemann(std::mt19937_64& rng, int n) {
  const NumericTensor E = random_symmetric(rng, n), F = random_symmetric(rng, n), H = random_symmetric(rng, n);
  return kulkarni_nomizu(E, F) + kulkarni_nomizu(H, H);
}

double rel_diff(const NumericTensor& a, const NumericTensor& b) {
  return norm(a - b) / std::max({norm(a), norm(b), 1e-300});
}

// Antisymmetry of the trailing pair of a (0,k+2) operator output.
double trailing_antisymmetry(const NumericTensor& t) {
  const int n = t.dim(), k = t.rank();
  double worst = 0.0;
  for_each_index(n, k, [&](const MultiIndex& i, std::size_t) {
    MultiIndex j = i;
    std::swap(j[k - 2], j[k - 1]);
    worst = std::max(worst, std::fabs(t.at(std::span<const int>(i.data(), k)) + t.at(std::span<const int>(j.data(), k))));
  });
  return worst / std::max(max_abs(t), 1e-300);
}

std::vector<PropertyOutcome> operator_properties() {
  std::vector<PropertyOutcome> out;
  std::mt19937_64 rng(20240917);
  double lin_action = 0.0, lin_q = 0.0, anti = 0.0, kn = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 2;
    const NumericTensor A = random_riemann(rng, n);
    const NumericTensor ginv = random_symmetric(rng, n);
    const NumericTensor B = random_symmetric(rng, n);
    for (int k : {2, 4}) {
      const NumericTensor T1 = random_tensor(rng, n, k), T2 = random_tensor(rng, n, k);
      lin_action = std::max(lin_action, rel_diff(curvature_action(A, T1 + T2, ginv),
                                                  curvature_action(A, T1, ginv) + curvature_action(A, T2, ginv)));
      lin_q = std::max(lin_q, rel_diff(q_operator(B, T1 + T2), q_operator(B, T1) + q_operator(B, T2)));
      anti = std::max({anti, trailing_antisymmetry(curvature_action(A, T1, ginv)),
                       trailing_antisymmetry(q_operator(B, T1))});
    }
    const NumericTensor E = random_symmetric(rng, n), F = random_symmetric(rng, n);
    kn = std::max(kn, rel_diff(kulkarni_nomizu(E, F), kulkarni_nomizu(F, E)));
  }
  out.push_back({"A.(T1+T2) = A.T1 + A.T2 on random inputs", lin_action <= 1e-12, sci(lin_action)});
  out.push_back({"Q(B,T1+T2) = Q(B,T1) + Q(B,T2) on random inputs", lin_q <= 1e-12, sci(lin_q)});
  out.push_back({"A.T and Q(B,T) antisymmetric in the trailing pair", anti <= 1e-14, sci(anti)});
  out.push_back({"E^F = F^E on random inputs", kn <= 1e-14, sci(kn)});

  double gg = 0.0, qgg = 0.0;
  Fixture& fx = fixture("melvin");
  for (const auto& p : fx.sg->points()) {
    const NumericTensor& G = p.field("G");
    const NumericTensor twoG = G + G;
    gg = std::max(gg, rel_diff(kulkarni_nomizu(p.g(), p.g()), twoG));
    qgg = std::max(qgg, max_abs(q_operator(p.g(), G)) / max_abs(G));
  }
  out.push_back({"melvin: g^g = 2G", gg <= 1e-14, sci(gg)});
  out.push_back({"melvin: Q(g,G) = 0", qgg <= 1e-14, sci(qgg)});
  return out;
}

std::vector<PropertyOutcome> scale_invariance(const Tolerance& tol) {
  std::vector<PropertyOutcome> out;
  for (const char* name : {"melvin", "melvin_type_generic", "base_3metric"}) {
    Fixture& fx = fixture(name);
    const auto& base = fx.all_fits(tol);
    for (double c : {0.5, 3.0}) {
      CatalogEntry scaled = fx.entry;
      const int n = scaled.metric.dim();
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
          if (!scaled.metric.g(a, b).is_zero()) scaled.metric.set_component(a, b, Expr(c * c) * scaled.metric.g(a, b));
      auto geo = make_geometry(scaled);
      SampledGeometry sg(*geo, fx.sg->grid());
      const auto fits = classify(sg, tol);
      // Only holds <-> fails counts as a flip. Tensors that vanish
      // identically (K ~ G when n = 3) carry roundoff that scales with g and
      // can cross the absolute floor, moving between vacuous and holds.
      std::string flipped, drifted;
      for (std::size_t i = 0; i < fits.size(); ++i) {
        const Verdict a = base[i].verdict, b = fits[i].verdict;
        const bool decided = (a == Verdict::holds || a == Verdict::fails) && (b == Verdict::holds || b == Verdict::fails);
        if ((decided && a != b) || (a != Verdict::vacuous && b != Verdict::vacuous && fits[i].order != base[i].order))
          flipped += (flipped.empty() ? "" : ", ") + fits[i].name;
        else if (a != b)
          drifted += (drifted.empty() ? "" : ", ") + fits[i].name + " " + to_string(a) + "->" + to_string(b);
      }
      std::string detail = flipped.empty() ? std::to_string(fits.size()) + " detectors" : "flipped: " + flipped;
      if (!drifted.empty()) detail += "; vacuous changes: " + drifted;
      out.push_back({std::string(name) + ": no holds/fails flip under g -> " + fmt(c * c) + " g", flipped.empty(), detail});
    }
  }
  return out;
}

ClaimResult criterion_13(const ClaimOptions& opt) {
  Tally t;
  auto record = [&](const std::vector<PropertyOutcome>& v) {
    for (const auto& o : v) t.check(o.ok, o.name + " (" + o.detail + ")");
  };
  record(curvature_properties(opt.tol));
  record(operator_properties());
  record(scale_invariance(opt.tol));
  if (opt.extra_properties.empty()) {
    t.note("no oracle suites registered; finite-difference and brute-force comparisons were not run");
  }
  for (const auto& check : opt.extra_properties) record(check());
  return t.result(13, "property suites");
}

// ---------------------------------------------------------------------------
// 14. Degenerate paths

ClaimResult criterion_14(const ClaimOptions& opt) {
  Tally t;
  Fixture& fx = fixture("minkowski");
  std::string not_vacuous;
  for (const auto& f : fx.all_fits(opt.tol))
    if (f.verdict != Verdict::vacuous) not_vacuous += (not_vacuous.empty() ? "" : ", ") + f.name;
  t.check(not_vacuous.empty(), not_vacuous.empty()
                                   ? "B0 = 0: all " + std::to_string(fx.all_fits(opt.tol).size()) + " detectors vacuous"
                                   : "B0 = 0: not vacuous: " + not_vacuous);
  const CatalogEntry melvin = lookup("melvin");
  try {
    make_grid(melvin.metric, melvin.metric.parameters, {{"r", {2.0}}}, opt.tol);
    t.check(false, "grid r = 2 at B0 = 1 was accepted");
  } catch (const EmptyGridError&) {
    t.check(true, "grid r = 2 at B0 = 1 rejected as an exceptional-locus point");
  }
  const SampleGrid mixed = make_grid(melvin.metric, melvin.metric.parameters, {{"r", {1.0, 2.0, 3.0}}}, opt.tol);
  bool has_two = false;
  for (const auto& p : mixed.points) has_two = has_two || p[kR] == 2.0;
  t.check(!has_two && mixed.points.size() == 2, "grid r in {1, 2, 3} keeps " + std::to_string(mixed.points.size()) +
                                                    " points and drops r = 2");
  return t.result(14, "degenerate paths: B0 = 0 and r = 2");
}

}  // namespace

std::string to_string(ClaimStatus s) {
  switch (s) {
    case ClaimStatus::pass: return "PASS";
    case ClaimStatus::fail: return "FAIL";
    case ClaimStatus::disputed: return "DISPUTED";
  }
  return "?";
}

ClaimResult run_criterion(int id, const ClaimOptions& options) {
  switch (id) {
    case 1: return criterion_1(options);
    case 2: return criterion_2(options);
    case 3: return criterion_3(options);
    case 4: return criterion_4(options);
    case 5: return criterion_5(options);
    case 6: return criterion_6(options);
    case 7: return criterion_7(options);
    case 8: return criterion_8(options);
    case 9: return criterion_9(options);
    case 10: return criterion_10(options);
    case 11: return criterion_11(options);
    case 12: return criterion_12(options);
    case 13: return criterion_13(options);
    case 14: return criterion_14(options);
  }
  throw std::out_of_range("no criterion " + std::to_string(id));
}

std::vector<ClaimResult> run_all(const ClaimOptions& options) {
  std::vector<ClaimResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, options));
  return out;
}

std::string summary_line(const ClaimResult& r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "criterion %2d  %-8s  ", r.id, to_string(r.status).c_str());
  return buf + r.title;
}

}  // namespace curvkit
