#include "oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>

#include "curvkit/catalog.hpp"
#include "curvkit/classifier.hpp"
#include "curvkit/operators.hpp"

namespace curvkit::oracle {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Eigen::MatrixXd to_matrix(const NumericTensor& t) {
  Eigen::MatrixXd m(t.dim(), t.dim());
  for (int a = 0; a < t.dim(); ++a)
    for (int b = 0; b < t.dim(); ++b) m(a, b) = t(a, b);
  return m;
}

std::vector<double> shifted(std::span<const double> x, int c, double dx) {
  std::vector<double> y(x.begin(), x.end());
  y[c] += dx;
  return y;
}

// Index tuple helpers that do not rely on Tensor's flat layout.
std::vector<std::vector<int>> all_tuples(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> t(k, 0);
  while (true) {
    out.push_back(t);
    int i = k - 1;
    while (i >= 0 && ++t[i] == n) t[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

double get(const NumericTensor& t, const std::vector<int>& idx) { return t.at(std::span<const int>(idx)); }

struct Sample {
  CatalogEntry entry;
  std::unique_ptr<Geometry> geometry;
  std::unique_ptr<SampledGeometry> sg;
};

Sample sample(const std::string& name) {
  Sample s;
  s.entry = lookup(name);
  s.geometry = make_geometry(s.entry);
  s.sg = std::make_unique<SampledGeometry>(*s.geometry, default_grid(s.entry.metric, s.entry.metric.parameters));
  return s;
}

const std::vector<std::string>& catalog() {
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

NumericTensor kn(const NumericTensor& E, const NumericTensor& F) {
  const int n = E.dim();
  NumericTensor out(n, 4);
  for (const auto& i : all_tuples(n, 4)) {
    const int x = i[0], y = i[1], u = i[2], v = i[3];
    out.at(std::span<const int>(i)) =
        E(x, v) * F(y, u) - E(x, u) * F(y, v) + E(y, u) * F(x, v) - E(y, v) * F(x, u);
  }
  return out;
}

std::vector<double> flat(const NumericTensor& t) { return t.data(); }

double rel_err(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300}); }

}  // namespace

// ---------------------------------------------------------------------------

NumericTensor fd_christoffel(const MetricSpec& m, std::span<const double> x, const ParamEnv& params, double h) {
  const int n = m.dim();
  std::vector<Eigen::MatrixXd> dg(n);
  for (int c = 0; c < n; ++c)
    dg[c] = (to_matrix(metric_at(m, shifted(x, c, h), params)) - to_matrix(metric_at(m, shifted(x, c, -h), params))) /
            (2 * h);
  const Eigen::MatrixXd gi = to_matrix(metric_at(m, x, params)).inverse();
  NumericTensor G(n, 3);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double v = 0.0;
        for (int d = 0; d < n; ++d) v += 0.5 * gi(a, d) * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
        G(a, b, c) = v;
      }
  return G;
}

NumericTensor fd_riemann(const MetricSpec& m, std::span<const double> x, const ParamEnv& params, double h) {
  const int n = m.dim();
  const NumericTensor G = fd_christoffel(m, x, params);
  std::vector<NumericTensor> dG(n);
  for (int c = 0; c < n; ++c) {
    const NumericTensor p = fd_christoffel(m, shifted(x, c, h), params);
    const NumericTensor q = fd_christoffel(m, shifted(x, c, -h), params);
    dG[c] = NumericTensor(n, 3);
    for (std::size_t i = 0; i < p.size(); ++i) dG[c][i] = (p[i] - q[i]) / (2 * h);
  }
  const NumericTensor g = metric_at(m, x, params);
  NumericTensor R(n, 4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double v = 0.0;
          for (int e = 0; e < n; ++e) {
            double w = dG[c](e, b, d) - dG[d](e, b, c);
            for (int f = 0; f < n; ++f) w += G(f, b, d) * G(e, f, c) - G(f, b, c) * G(e, f, d);
            v += g(a, e) * w;
          }
          R(a, b, c, d) = v;
        }
  return R;
}

NumericTensor brute_action(const NumericTensor& A, const NumericTensor& T, const NumericTensor& ginv) {
  const int n = A.dim(), k = T.rank();
  // endo[u][v](s, z): component s of A(e_u, e_v) e_z.
  std::vector<std::vector<Eigen::MatrixXd>> endo(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      for (int z = 0; z < n; ++z)
        for (int s = 0; s < n; ++s)
          for (int t = 0; t < n; ++t) endo[u][v](s, z) += ginv(s, t) * A(u, v, z, t);
  NumericTensor out(n, k + 2);
  for (const auto& idx : all_tuples(n, k + 2)) {
    const int u = idx[k], v = idx[k + 1];
    std::vector<int> zi(idx.begin(), idx.begin() + k);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      std::vector<int> moved = zi;
      for (int s = 0; s < n; ++s) {
        moved[i] = s;
        sum -= endo[u][v](s, zi[i]) * get(T, moved);
      }
    }
    out.at(std::span<const int>(idx)) = sum;
  }
  return out;
}

NumericTensor brute_q(const NumericTensor& B, const NumericTensor& T) {
  const int n = B.dim(), k = T.rank();
  NumericTensor out(n, k + 2);
  for (const auto& idx : all_tuples(n, k + 2)) {
    const int u = idx[k], v = idx[k + 1];
    std::vector<int> zi(idx.begin(), idx.begin() + k);
    // (e_u ^_B e_v) e_z = B(v,z) e_u - B(u,z) e_v
    auto wedge = [&](int s, int z) { return (s == u ? B(v, z) : 0.0) - (s == v ? B(u, z) : 0.0); };
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      std::vector<int> moved = zi;
      for (int s = 0; s < n; ++s) {
        moved[i] = s;
        sum -= wedge(s, zi[i]) * get(T, moved);
      }
    }
    out.at(std::span<const int>(idx)) = sum;
  }
  return out;
}

namespace {

// Solves M x = b in place; returns false on a zero pivot.
bool gauss_solve(std::vector<std::vector<double>> M, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(M[r][c]) > std::fabs(M[p][c])) p = r;
    if (M[p][c] == 0.0) return false;
    std::swap(M[p], M[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = M[r][c] / M[c][c];
      for (std::size_t j = c; j < n; ++j) M[r][j] -= f * M[c][j];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t c = n; c-- > 0;) {
    double v = b[c];
    for (std::size_t j = c + 1; j < n; ++j) v -= M[c][j] * x[j];
    x[c] = v / M[c][c];
  }
  return true;
}

}  // namespace

std::vector<double> normal_equations(const std::vector<std::vector<double>>& cols, const std::vector<double>& rhs) {
  const std::size_t k = cols.size();
  std::vector<double> scale(k);
  for (std::size_t i = 0; i < k; ++i) {
    double s = 0.0;
    for (double v : cols[i]) s += v * v;
    scale[i] = std::sqrt(s);
  }
  std::vector<std::vector<double>> M(k, std::vector<double>(k, 0.0));
  std::vector<double> b(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t r = 0; r < rhs.size(); ++r) M[i][j] += cols[i][r] * cols[j][r] / (scale[i] * scale[j]);
    for (std::size_t r = 0; r < rhs.size(); ++r) b[i] += cols[i][r] * rhs[r] / scale[i];
  }
  std::vector<double> x;
  if (!gauss_solve(M, b, x)) return std::vector<double>(k, std::nan(""));
  for (std::size_t i = 0; i < k; ++i) x[i] /= scale[i];
  return x;
}

int row_rank(std::vector<std::vector<double>> rows, double rel, double reference) {
  if (rows.empty()) return 0;
  double big = 0.0;
  for (const auto& r : rows)
    for (double v : r) big = std::max(big, std::fabs(v));
  big = std::max(big, reference);
  if (big == 0.0) return 0;
  const double cut = rel * big;
  const std::size_t m = rows.size(), n = rows[0].size();
  int rank = 0;
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < m; ++c) {
    std::size_t p = row;
    for (std::size_t r = row + 1; r < m; ++r)
      if (std::fabs(rows[r][c]) > std::fabs(rows[p][c])) p = r;
    if (std::fabs(rows[p][c]) <= cut) continue;
    std::swap(rows[p], rows[row]);
    for (std::size_t r = row + 1; r < m; ++r) {
      const double f = rows[r][c] / rows[row][c];
      for (std::size_t j = c; j < n; ++j) rows[r][j] -= f * rows[row][j];
    }
    ++row;
    ++rank;
  }
  return rank;
}

// ---------------------------------------------------------------------------

std::vector<PropertyOutcome> fd_curvature_checks() {
  std::vector<PropertyOutcome> out;
  for (const auto& name : catalog()) {
    const Sample s = sample(name);
    const auto& grid = s.sg->grid();
    double eg = 0.0, er = 0.0;
    for (std::size_t p = 0; p < s.sg->size(); ++p) {
      const auto& pt = (*s.sg)[p];
      const NumericTensor G = fd_christoffel(s.entry.metric, grid.points[p], grid.params);
      const NumericTensor R = fd_riemann(s.entry.metric, grid.points[p], grid.params);
      const NumericTensor& Ge = pt.field("Gamma");
      const NumericTensor& Re = pt.field("R");
      // Flat metrics are measured against the unit scale of g itself.
      const double gs = std::max(max_abs(Ge), 1.0), rs = max_abs(Re) > 1e-12 ? max_abs(Re) : 1.0;
      eg = std::max(eg, max_abs(G - Ge) / gs);
      er = std::max(er, max_abs(R - Re) / rs);
    }
    out.push_back({name + ": Christoffel symbols agree with finite differences", eg <= 1e-7, sci(eg)});
    out.push_back({name + ": Riemann tensor agrees with finite differences", er <= 1e-5, sci(er)});
  }
  return out;
}

std::vector<PropertyOutcome> derivative_checks() {
  SymbolTable sym;
  sym.coordinates = {"x", "y"};
  sym.parameters = {"a"};
  const ParamEnv params{{"a", 0.7}};
  const std::vector<std::string> sources{
      "x^3*sin(y) - a*y^2",  "exp(x*y)/(1 + x^2)",       "ln(1 + x^2 + y^2)*cos(a*x)", "sqrt(2 + sin(x*y))",
      "x^(y)",               "(x + y)^(-3/2)",           "exp(-2*ln(1 + x))*y",       "(x - y)/(x + y)^2",
      "cos(x)^2 + sin(x)^2", "ln(x/(x + 2))/2 + a*x*y"};
  const std::vector<std::vector<double>> points{{0.6, 1.3}, {1.7, 0.4}, {2.5, 2.2}};
  double worst = 0.0;
  std::string where;
  for (const auto& src : sources) {
    const Expr e = parse(src, &sym);
    for (int c = 0; c < 2; ++c) {
      const Expr d = differentiate(e, sym.coordinates[c], c);
      for (const auto& x : points) {
        const double h = 1e-5 * std::max(1.0, std::fabs(x[c]));
        const double fd =
            (evaluate(e, shifted(x, c, h), params) - evaluate(e, shifted(x, c, -h), params)) / (2 * h);
        const double v = evaluate(d, x, params);
        const double err = std::fabs(v - fd) / std::max(std::fabs(fd), 1.0);
        if (err > worst) {
          worst = err;
          where = "d/d" + sym.coordinates[c] + " " + src;
        }
      }
    }
  }
  return {{"symbolic derivatives agree with central differences", worst <= 1e-6, sci(worst) + " at " + where}};
}

std::vector<PropertyOutcome> operator_checks() {
  std::vector<PropertyOutcome> out;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random = [&](int n, int k) {
    NumericTensor t(n, k);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = u(rng);
    return t;
  };
  auto symmetric = [&](int n) {
    NumericTensor t = random(n, 2);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < a; ++b) t(a, b) = t(b, a);
    return t;
  };
  double ea = 0.0, eq = 0.0, ek = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + trial % 2;
    const NumericTensor E = symmetric(n), F = symmetric(n), B = symmetric(n), gi = symmetric(n);
    const NumericTensor A = kn(E, F);
    ek = std::max(ek, max_abs(kn(E, F) - kulkarni_nomizu(E, F)) / max_abs(A));
    for (int k : {2, 4}) {
      const NumericTensor T = random(n, k);
      const NumericTensor a1 = brute_action(A, T, gi), a2 = curvature_action(A, T, gi);
      const NumericTensor q1 = brute_q(B, T), q2 = q_operator(B, T);
      ea = std::max(ea, max_abs(a1 - a2) / max_abs(a1));
      eq = std::max(eq, max_abs(q1 - q2) / max_abs(q1));
    }
  }
  out.push_back({"Kulkarni-Nomizu product agrees with the pointwise definition", ek <= 1e-12, sci(ek)});
  out.push_back({"A.T agrees with the brute-force endomorphism action", ea <= 1e-12, sci(ea)});
  out.push_back({"Q(B,T) agrees with the brute-force endomorphism action", eq <= 1e-12, sci(eq)});

  // Same comparison on sampled curvature, including the Maxwell 2-form.
  const Sample s = sample("melvin");
  double worst = 0.0;
  for (const auto& p : s.sg->points()) {
    for (const char* A : {"R", "C"})
      for (const char* T : {"R", "S", "C", "F"}) {
        const NumericTensor a = brute_action(p.field(A), p.field(T), p.ginv());
        worst = std::max(worst, max_abs(a - curvature_action(p.field(A), p.field(T), p.ginv())) /
                                    std::max(max_abs(a), 1e-300));
      }
    for (const char* B : {"g", "S"})
      for (const char* T : {"R", "C", "F"}) {
        const NumericTensor q = brute_q(p.field(B), p.field(T));
        worst = std::max(worst, max_abs(q - q_operator(p.field(B), p.field(T))) / std::max(max_abs(q), 1e-300));
      }
  }
  out.push_back({"melvin: sampled A.T and Q(B,T) agree with the brute-force action", worst <= 1e-12, sci(worst)});
  return out;
}

std::vector<PropertyOutcome> fit_checks() {
  std::vector<PropertyOutcome> out;
  const Tolerance tol;
  {
    const Sample s = sample("melvin");
    const auto fits = classify(*s.sg, tol);
    auto find = [&](const std::string& n) -> const FitResult& {
      return *std::find_if(fits.begin(), fits.end(), [&](const FitResult& f) { return f.name == n; });
    };
    const FitResult& comb = find("combination[C.R-R.C~Q(g,R),Q(S,R)]");
    const FitResult& rot = find("roter");
    const FitResult& ps = find("pseudosymmetric[R.R]");
    double ec = 0.0, er = 0.0, ep = 0.0;
    for (std::size_t i = 0; i < s.sg->size(); ++i) {
      const auto& p = (*s.sg)[i];
      const NumericTensor lhs = brute_action(p.field("C"), p.field("R"), p.ginv()) -
                                brute_action(p.field("R"), p.field("C"), p.ginv());
      const auto x = normal_equations({flat(brute_q(p.g(), p.field("R"))), flat(brute_q(p.field("S"), p.field("R")))},
                                      flat(lhs));
      ec = std::max({ec, rel_err(x[0], comb.coefficient(i, "L3")), rel_err(x[1], comb.coefficient(i, "L4"))});
      const auto n = normal_equations({flat(kn(p.field("S"), p.field("S"))), flat(kn(p.g(), p.field("S"))),
                                       flat(kn(p.g(), p.g()))},
                                      flat(p.field("R")));
      er = std::max({er, rel_err(n[0], rot.coefficient(i, "N1")), rel_err(n[1], rot.coefficient(i, "N2")),
                     rel_err(n[2], rot.coefficient(i, "N3"))});
      const auto l = normal_equations({flat(brute_q(p.g(), p.field("R")))},
                                      flat(brute_action(p.field("R"), p.field("R"), p.ginv())));
      ep = std::max(ep, rel_err(l[0], ps.coefficient(i, "L")));
    }
    out.push_back({"melvin: L3, L4 agree with normal equations", ec <= 1e-6, sci(ec)});
    out.push_back({"melvin: N1, N2, N3 agree with normal equations", er <= 1e-6, sci(er)});
    out.push_back({"melvin: L1 agrees with normal equations", ep <= 1e-8, sci(ep)});
  }
  {
    const Sample s = sample("melvin_type_generic");
    std::vector<NumericTensor> lhs;
    std::vector<std::vector<NumericTensor>> basis;
    for (const auto& p : s.sg->points()) {
      lhs.push_back(p.field("R"));
      basis.push_back({kn(p.g(), p.field("S")), kn(p.g(), p.field("S2")), kn(p.field("S"), p.field("S")),
                       kn(p.field("S"), p.field("S2"))});
    }
    const FitResult f = fit_combination("grt", lhs, basis, {"a", "b", "c", "d"}, tol);
    double e = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      std::vector<std::vector<double>> cols;
      for (const auto& b : basis[i]) cols.push_back(flat(b));
      const auto x = normal_equations(cols, flat(lhs[i]));
      for (int j = 0; j < 4; ++j) e = std::max(e, rel_err(x[j], f.coefficients[i](j)));
    }
    out.push_back({"melvin_type_generic: four-term Roter coefficients agree with normal equations", e <= 1e-6, sci(e)});
  }
  return out;
}

std::vector<PropertyOutcome> rank_checks() {
  std::vector<PropertyOutcome> out;
  const Tolerance tol;
  for (const auto& name : catalog()) {
    const Sample s = sample(name);
    const FitResult ein = ein_level(*s.sg, tol);
    const FitResult qe = quasi_einstein_rank(*s.sg, tol);
    int level = 0;
    int qrank = -1;
    bool all_zero = true;
    for (std::size_t i = 0; i < s.sg->size(); ++i) {
      const auto& p = (*s.sg)[i];
      if (max_abs(p.field("S")) <= tol.abs_floor) continue;
      all_zero = false;
      // Smallest k with g, S, ..., S^k linearly dependent.
      const char* powers[] = {"g", "S", "S2", "S3", "S4"};
      std::vector<std::vector<double>> rows;
      int k = 5;
      for (int j = 0; j < 5; ++j) {
        std::vector<double> v = flat(p.field(powers[j]));
        double nv = 0.0;
        for (double c : v) nv = std::max(nv, std::fabs(c));
        for (double& c : v) c /= nv;
        rows.push_back(v);
        if (row_rank(rows, 1e-8) < j + 1) {
          k = j;
          break;
        }
      }
      level = std::max(level, k);
      // Minimum rank of S - lambda g over the eigenvalues of the Ricci operator.
      const Eigen::MatrixXd g = to_matrix(p.g()), S = to_matrix(p.field("S"));
      Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> es(S, g);
      int best = p.g().dim();
      for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
        const auto lam = es.eigenvalues()(j);
        if (std::fabs(lam.imag()) > 1e-8 * std::max(1.0, std::abs(lam))) continue;
        const Eigen::MatrixXd M = S - lam.real() * g;
        std::vector<std::vector<double>> rows2(M.rows(), std::vector<double>(M.cols()));
        for (Eigen::Index a = 0; a < M.rows(); ++a)
          for (Eigen::Index b = 0; b < M.cols(); ++b) rows2[a][b] = M(a, b);
        const double scale = std::max(S.cwiseAbs().maxCoeff(), std::fabs(lam.real()) * g.cwiseAbs().maxCoeff());
        best = std::min(best, row_rank(rows2, 1e-7, scale));
      }
      qrank = std::max(qrank, best);
    }
    if (all_zero) {
      out.push_back({name + ": Ricci tensor vanishes, Ein level 0", ein.order == 0, "engine " + std::to_string(ein.order)});
      continue;
    }
    out.push_back({name + ": Ein level agrees with row reduction", ein.order == level,
                   "engine " + std::to_string(ein.order) + ", oracle " + std::to_string(level)});
    out.push_back({name + ": quasi-Einstein rank agrees with row reduction", qe.order == qrank,
                   "engine " + std::to_string(qe.order) + ", oracle " + std::to_string(qrank)});
  }
  return out;
}

std::vector<PropertyCheck> property_checks() {
  return {fd_curvature_checks, derivative_checks, operator_checks, fit_checks, rank_checks};
}

}  // namespace curvkit::oracle
