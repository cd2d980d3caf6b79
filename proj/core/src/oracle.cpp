#include "harmonia/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace harmonia {
namespace {

double fnorm(const AlternatingForm& a, const PointMetric& g) { return std::sqrt(std::max(0.0, form_norm2(a, g))); }

// plain central-difference jacobian of the chart embedding
Matrix oracle_jacobian(const Chart& c, const Vector& u, double h) {
  const Vector x0 = c.embed(u);
  Matrix J(x0.size(), u.size());
  for (int a = 0; a < u.size(); ++a) {
    Vector up = u, um = u;
    up[a] += h;
    um[a] -= h;
    J.col(a) = (c.embed(up) - c.embed(um)) / (2.0 * h);
  }
  return J;
}

// field at a chart point as an ambient form vanishing on normals
AlternatingForm extended(const ModelManifold& m, const FormField& s, const ChartPoint& p, double h) {
  const Chart& c = m.chart(p.chart);
  const Matrix J = oracle_jacobian(c, p.u, h);
  const Matrix pinv = (J.transpose() * J).ldlt().solve(J.transpose());  // coordinates of the tangent part
  if (s.ambient()) {
    const Matrix P = J * pinv;
    return pullback(s.ambient()(c.embed(p.u)), P);
  }
  return pullback(s(m.local(p)), pinv);
}

Vector grad_f(const Chart& c, const Vector& u, double h) {
  Vector d(u.size());
  for (int a = 0; a < u.size(); ++a) {
    Vector up = u, um = u;
    up[a] += h;
    um[a] -= h;
    d[a] = (c.log_conformal(up) - c.log_conformal(um)) / (2.0 * h);
  }
  return d;
}

Matrix hess_f(const Chart& c, const Vector& u, double h) {
  const int n = static_cast<int>(u.size());
  Matrix H(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      auto at = [&](double sa, double sb) {
        Vector v = u;
        v[a] += sa * h;
        v[b] += sb * h;
        return c.log_conformal(v);
      };
      H(a, b) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
    }
  return H;
}

std::size_t idx4(int n, int i, int j, int k, int l) {
  return static_cast<std::size_t>(((i * n + j) * n + k) * n + l);
}

}  // namespace

std::vector<Matrix> conformal_christoffel(const Chart& c, const Vector& u, double h) {
  const int n = static_cast<int>(u.size());
  const Vector df = grad_f(c, u, h);
  std::vector<Matrix> gamma(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  // Gamma^k_{ai} = delta_ka f_i + delta_ki f_a - delta_ai f_k
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        if (k == a) v += df[i];
        if (k == i) v += df[a];
        if (a == i) v -= df[k];
        gamma[static_cast<std::size_t>(a)](k, i) = v;
      }
  return gamma;
}

OracleReport covariant_oracle(const ModelManifold& m, const FormField& s, const ChartPoint& p, double tol) {
  const Chart& c = m.chart(p.chart);
  const double h = kOracleStep * c.scale;
  const int n = m.dim();
  const LocalData l = m.local(p);
  const auto main = covariant_derivative(m, s, p);
  std::vector<AlternatingForm> alt;
  if (m.flavor() == Flavor::embedded) {
    const Matrix J0 = oracle_jacobian(c, p.u, h);
    for (int a = 0; a < n; ++a) {
      const AlternatingForm d = (1.0 / (2.0 * h)) * (extended(m, s, shifted(m, p, a, h), h) -
                                                     extended(m, s, shifted(m, p, a, -h), h));
      alt.push_back(pullback(d, J0));
    }
  } else {
    if (!c.log_conformal) throw GeometryError(m.name() + ": no covariant oracle for this chart");
    const auto gamma = conformal_christoffel(c, p.u, h);
    const AlternatingForm s0 = s(l);
    for (int a = 0; a < n; ++a) {
      const AlternatingForm d =
          (1.0 / (2.0 * h)) * (s(m.local(shifted(m, p, a, h))) - s(m.local(shifted(m, p, a, -h))));
      alt.push_back(d - derivation(gamma[static_cast<std::size_t>(a)], s0));
    }
  }
  OracleReport r;
  r.quantity = "nabla " + s.name();
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    r.route_a = std::max(r.route_a, fnorm(main[a], l.metric));
    r.route_b = std::max(r.route_b, fnorm(alt[a], l.metric));
    worst = std::max(worst, fnorm(main[a] - alt[a], l.metric));
  }
  const double ref = std::max({r.route_a, r.route_b, fnorm(s(l), l.metric)});
  r.discrepancy = ref > 0.0 ? worst / ref : worst;
  r.tolerance = tol;
  r.pass = r.discrepancy < tol;
  return r;
}

bool has_curvature_oracle(const ModelManifold& m) {
  if (m.flavor() == Flavor::embedded) return true;
  return std::all_of(m.charts().begin(), m.charts().end(), [](const Chart& c) { return bool(c.log_conformal); });
}

std::vector<double> oracle_riemann(const ModelManifold& m, const ChartPoint& p) {
  const Chart& c = m.chart(p.chart);
  const double h = kOracleStep * c.scale;
  const int n = m.dim();
  std::vector<double> Rm(static_cast<std::size_t>(n * n * n * n), 0.0);
  if (m.flavor() == Flavor::embedded) {
    // second fundamental form: normal part of d_i d_j x
    const Matrix J = oracle_jacobian(c, p.u, h);
    const Matrix N = Matrix::Identity(J.rows(), J.rows()) - J * (J.transpose() * J).ldlt().solve(J.transpose());
    std::vector<Vector> II(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto at = [&](double si, double sj) {
          Vector v = p.u;
          v[i] += si * h;
          v[j] += sj * h;
          return c.embed(v);
        };
        const Vector xx = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
        II[static_cast<std::size_t>(i * n + j)] = N * xx;
      }
    auto ii = [&](int a, int b) -> const Vector& { return II[static_cast<std::size_t>(a * n + b)]; };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            Rm[idx4(n, i, j, k, l)] = ii(j, k).dot(ii(i, l)) - ii(i, k).dot(ii(j, l));
    return Rm;
  }
  if (!c.log_conformal) throw GeometryError(m.name() + ": no curvature oracle for this chart");
  // Rm = e^{2f} (0 - T o delta), T = Hess f - df df + |df|^2 delta / 2, o the Kulkarni-Nomizu product
  const Vector df = grad_f(c, p.u, h);
  const Matrix T = hess_f(c, p.u, h) - df * df.transpose() + 0.5 * df.squaredNorm() * Matrix::Identity(n, n);
  const double e2f = std::exp(2.0 * c.log_conformal(p.u));
  auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double kn = T(i, l) * d(j, k) + T(j, k) * d(i, l) - T(i, k) * d(j, l) - T(j, l) * d(i, k);
          Rm[idx4(n, i, j, k, l)] = -e2f * kn;
        }
  return Rm;
}

OracleReport curvature_oracle(const ModelManifold& m, const ChartPoint& p, double tol) {
  const int n = m.dim();
  const PointMetric g = metric_at(m, p);
  const Curvature R = curvature_at(m, p);
  const std::vector<double> alt = oracle_riemann(m, p);
  OracleReport r;
  r.quantity = "riemann";
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          // the main path stores R_{X,Y} = -R(X,Y)
          const double a = -R.component(i, j, k, l, g);
          const double b = alt[idx4(n, i, j, k, l)];
          r.route_a = std::max(r.route_a, std::abs(a));
          r.route_b = std::max(r.route_b, std::abs(b));
          worst = std::max(worst, std::abs(a - b));
        }
  r.discrepancy = worst / std::max({1.0, r.route_a, r.route_b});
  r.tolerance = tol;
  r.pass = r.discrepancy < tol;
  return r;
}

double sphere_volume(int n) {
  const double k = 0.5 * (n + 1);
  return 2.0 * std::pow(std::numbers::pi, k) / std::tgamma(k);
}

McEstimate mc_sphere_integral(int n, const std::function<double(const Vector&)>& f, long samples,
                              std::uint64_t seed) {
  constexpr long kBlock = 4096;
  double sum = 0.0, sum2 = 0.0;
  long done = 0;
  for (std::uint64_t block = 0; done < samples; ++block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss;
    const long count = std::min(kBlock, samples - done);
    for (long i = 0; i < count; ++i) {
      Vector x(n + 1);
      for (int a = 0; a <= n; ++a) x[a] = gauss(rng);
      const double v = f(x / x.norm());
      sum += v;
      sum2 += v * v;
    }
    done += count;
  }
  const double mean = sum / static_cast<double>(samples);
  const double var = std::max(0.0, sum2 / static_cast<double>(samples) - mean * mean);
  const double vol = sphere_volume(n);
  return {vol * mean, vol * std::sqrt(var / static_cast<double>(samples)), samples};
}

McEstimate mc_integral(const ModelManifold& m, const std::function<double(const ChartPoint&)>& f, long samples,
                       std::uint64_t seed) {
  if (m.flavor() != Flavor::embedded || m.ambient_dim() != m.dim() + 1)
    throw GeometryError(m.name() + ": Monte-Carlo integration needs a round sphere");
  return mc_sphere_integral(
      m.dim(),
      [&](const Vector& x) {
        // the chart where the point sits deepest
        std::optional<ChartPoint> best;
        for (int i = 0; i < static_cast<int>(m.charts().size()); ++i) {
          const Chart& c = m.chart(i);
          if (!c.locate) continue;
          auto u = c.locate(x);
          if (!u) continue;
          ChartPoint p{i, *u};
          if (m.contains(p) && (!best || p.u.norm() < best->u.norm())) best = p;
        }
        if (!best) throw GeometryError(m.name() + ": point not covered by any chart");
        if (std::abs(m.chart(best->chart).embed(best->u).norm() - 1.0) > 1e-9)
          throw GeometryError(m.name() + ": Monte-Carlo integration needs the unit sphere");
        return f(*best);
      },
      samples, seed);
}

}  // namespace harmonia
