#include "harmonia/checks.hpp"

#include "harmonia/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <thread>

namespace harmonia {

const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> list = {
      {"covariant-oracle", "covariant derivative against the projection or conformal route", true},
      {"curvature-oracle", "Riemann tensor against the Gauss equation or the conformal formula", true},
      {"mc-area", "Monte-Carlo sphere area and total bending", true},
      {"constant-length", "pointwise |sigma|^2 constant across samples", false},
      {"transpose", "(nabla sigma)^t sigma = 0", false},
      {"laplacian-pairing", "<lap sigma, sigma> = |nabla sigma|^2", false},
      {"metric-compat", "X<s1,s2> = <nabla_X s1,s2> + <s1,nabla_X s2> with a probe field", false},
      {"nanalap", "<lap s, phi> = -div((nabla s)^t phi) + <nabla s, nabla phi> with a probe field", false},
      {"ricci-identity", "antisymmetrised second derivative equals the curvature action", false},
      {"structure", "fitted structure constants and their residuals", false},
      {"eigen", "rough Laplacian eigen-equation with the expected eigenvalue", false},
      {"harmonic-section", "lap sigma = (|nabla sigma|^2/r^2) sigma", false},
      {"harmonic-map", "harmonic section with vanishing curvature pairing", false},
      {"two-route", "curvature pairing against its divergence form at harmonic-section points", false},
      {"spectrum", "eigenvalues of <nabla_X s, nabla_Y s> against g", false},
      {"pair-thm", "fit of nabla Psi = lambda X -| Phi, nabla Phi = mu X ^ Psi and predicted eigenvalues", false},
      {"lcp", "locally conformal parallel equation, its coderivative and Laplacian, Lee form closed/parallel", false},
      {"lck-defect", "lcK harmonic-map defect and its proportionality to the curvature pairing", false},
      {"spin7-lee", "(d*theta) theta = 3 d|theta|^2 and theta from d Phi", false},
      {"kenmotsu-prop", "curvature pairing against the warped-product closed form, db(zeta) biconditional", false},
      {"variation", "first variation integrand and Hessian integrand with an orthogonal variation", false},
      {"tension", "horizontal and sphere-tangential tension components vanish", false},
      {"three-sasakian-identities", "contraction identities and Killing property of the eta_i", false},
      {"bending", "bending density against half the expected spectrum", false},
      {"einstein", "Ric = rho g with the closed-form rho", false},
      {"relations", "relations between fitted constants and rho", false},
  };
  return list;
}

bool is_check(const std::string& name) {
  const auto& c = check_catalog();
  return std::any_of(c.begin(), c.end(), [&](const CheckInfo& i) { return i.name == name; });
}

bool is_oracle_check(const std::string& name) {
  for (const auto& i : check_catalog())
    if (i.name == name) return i.oracle;
  return false;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

namespace {

double fnorm(const AlternatingForm& a, const PointMetric& g) { return std::sqrt(std::max(0.0, form_norm2(a, g))); }
double vec_norm(const Vector& v, const PointMetric& g) { return std::sqrt(std::max(0.0, v.dot(g.g() * v))); }
double safe_div(double num, double den) { return den > 0.0 ? num / den : num; }

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::isnan(x) ? INFINITY : x);
  return m;
}
double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

CheckResult finish(CheckResult r, double tol) {
  r.points = static_cast<int>(r.residuals.size());
  r.max_residual = max_of(r.residuals);
  r.tolerance = tol;
  r.pass = r.max_residual < tol;
  return r;
}

CheckResult named(const std::string& name) {
  CheckResult r;
  r.name = name;
  return r;
}

CheckResult not_applicable(const std::string& name, const std::string& why) {
  CheckResult r;
  r.name = name;
  r.applicable = false;
  r.note = why;
  return r;
}

// smooth generic field of the given degree, for identities that need a second section
FormField probe_field(int dim, int degree) {
  return FormField("probe", degree, [dim, degree](const LocalData& l) {
    AlternatingForm out(dim, degree);
    auto c = out.coefficients();
    for (std::size_t r = 0; r < c.size(); ++r) {
      double arg = 0.3 + 0.37 * static_cast<double>(r);
      for (int a = 0; a < dim; ++a) arg += (0.4 + 0.13 * a - 0.05 * static_cast<double>(r % 5)) * l.at.u[a];
      c[r] = std::sin(arg) + 0.5 * std::cos(1.3 * arg);
    }
    return out;
  });
}

const std::set<std::string> kNoJet = {"covariant-oracle", "curvature-oracle", "structure", "relations"};

struct FieldContext {
  const ModelRun& run;
  const Model& model;
  const FieldSpec& spec;
  const CheckConfig& cfg;
  std::vector<const FormField*> fields;
  std::map<std::string, std::size_t> index;
  std::vector<Jet> jets;
  std::size_t f = 0;

  EvalContext ctx(std::size_t i) const { return EvalContext{jets[i], f, index, run.constants}; }
  std::size_t slot(const std::string& name) const { return index.at(name); }

  template <class F>
  std::vector<double> per_point(F&& fn) const {
    std::vector<double> out(jets.size());
    parallel_for(jets.size(), cfg.jobs, [&](std::size_t i) { out[i] = fn(i); });
    return out;
  }
};

double r2_at(const FieldContext& fc, std::size_t i) { return form_norm2(fc.jets[i].value(fc.f), fc.jets[i].metric()); }

CheckResult check_constant_length(const FieldContext& fc) {
  CheckResult r = named("constant-length");
  const auto n2 = fc.per_point([&](std::size_t i) { return r2_at(fc, i); });
  const double mean = mean_of(n2);
  for (double x : n2) r.residuals.push_back(safe_div(std::abs(x - mean), mean));
  r.fitted["r2"] = mean;
  if (!fc.model.field(fc.spec.name).constant_length()) r.note = "field not tagged constant-length";
  return finish(r, 1e-8);
}

CheckResult check_transpose(const FieldContext& fc) {
  CheckResult r = named("transpose");
  r.residuals = fc.per_point([&](std::size_t i) {
    const Jet& j = fc.jets[i];
    const PointMetric& g = j.metric();
    Vector v(j.dim());
    for (int a = 0; a < j.dim(); ++a) v[a] = form_inner(j.nabla(fc.f)[a], j.value(fc.f), g);
    const double s = fnorm(j.value(fc.f), g);
    const double ds = std::sqrt(gradient_norm2(j.center(), fc.f));
    return safe_div(std::sqrt(std::max(0.0, v.dot(g.g_inv() * v))), s * std::max(s, ds));
  });
  return finish(r, fc.cfg.tol_d1);
}

CheckResult check_laplacian_pairing(const FieldContext& fc) {
  CheckResult r = named("laplacian-pairing");
  r.residuals = fc.per_point([&](std::size_t i) {
    const Jet& j = fc.jets[i];
    const double lhs = form_inner(rough_laplacian(j, fc.f), j.value(fc.f), j.metric());
    const double rhs = gradient_norm2(j.center(), fc.f);
    return safe_div(std::abs(lhs - rhs), std::max(std::abs(rhs), r2_at(fc, i)));
  });
  return finish(r, fc.cfg.tol_d2);
}

CheckResult check_eigen(const FieldContext& fc) {
  if (!fc.spec.eigenvalue) return not_applicable("eigen", "no eigenvalue claimed for this field");
  CheckResult r = named("eigen");
  std::vector<double> lam(fc.jets.size()), ray(fc.jets.size());
  r.residuals = fc.per_point([&](std::size_t i) {
    const Jet& j = fc.jets[i];
    const PointMetric& g = j.metric();
    const AlternatingForm& s = j.value(fc.f);
    const AlternatingForm lap = rough_laplacian(j, fc.f);
    lam[i] = fc.spec.eigenvalue(fc.ctx(i));
    ray[i] = form_inner(lap, s, g) / form_norm2(s, g);
    return fnorm(lap - lam[i] * s, g) / (fnorm(s, g) * std::max(1.0, std::abs(lam[i])));
  });
  r.fitted["expected_eigenvalue"] = mean_of(lam);
  r.fitted["rayleigh_quotient"] = mean_of(ray);
  r.note = fc.spec.eigen_formula;
  return finish(r, fc.cfg.tol_d2);
}

std::vector<double> hs_residuals(const FieldContext& fc) {
  return fc.per_point([&](std::size_t i) { return harmonic_section_residual(fc.jets[i], fc.f); });
}

CheckResult check_harmonic_section(const FieldContext& fc) {
  CheckResult r = named("harmonic-section");
  r.residuals = hs_residuals(fc);
  return finish(r, fc.cfg.tol_d2);
}

CheckResult check_harmonic_map(const FieldContext& fc) {
  CheckResult r = named("harmonic-map");
  const auto hs = hs_residuals(fc);
  const auto hm = fc.per_point([&](std::size_t i) { return harmonic_map_residual(fc.jets[i], fc.f); });
  for (std::size_t i = 0; i < hs.size(); ++i) r.residuals.push_back(std::max(hs[i], hm[i]));
  r.fitted["max_section_residual"] = max_of(hs);
  r.fitted["max_pairing_residual"] = max_of(hm);
  return finish(r, fc.cfg.tol_d2);
}

CheckResult check_two_route(const FieldContext& fc) {
  CheckResult r = named("two-route");
  const auto hs = hs_residuals(fc);
  std::vector<std::optional<double>> v(fc.jets.size());
  parallel_for(fc.jets.size(), fc.cfg.jobs, [&](std::size_t i) {
    if (!(hs[i] < fc.cfg.tol_d2)) return;
    const Jet& j = fc.jets[i];
    const PointMetric& g = j.metric();
    const Vector a = curvature_pairing(j, fc.f);
    const Vector b = curvature_pairing_div_form(j, fc.f);
    const double ref = std::max({one_form_norm(a, g), gradient_norm2(j.center(), fc.f), r2_at(fc, i)});
    v[i] = one_form_norm(a - b, g) / ref;
  });
  for (const auto& x : v)
    if (x) r.residuals.push_back(*x);
  r.note = "conditional on the harmonic-section residual";
  r.fitted["eligible_points"] = static_cast<double>(r.residuals.size());
  return finish(r, 1e-3);
}

CheckResult check_spectrum(const FieldContext& fc) {
  CheckResult r = named("spectrum");
  const std::size_t N = fc.jets.size();
  std::vector<Spectrum> sp(N);
  std::vector<std::vector<double>> expect(N);
  parallel_for(N, fc.cfg.jobs, [&](std::size_t i) {
    sp[i] = ki_spectrum(fc.jets[i].center(), fc.f);
    if (fc.spec.expected_spectrum) {
      expect[i] = fc.spec.expected_spectrum(fc.ctx(i));
      std::sort(expect[i].begin(), expect[i].end());
    }
  });
  double kmin = INFINITY, kmax = -INFINITY, spread = 0.0;
  for (const auto& s : sp) {
    kmin = std::min(kmin, s.k.front());
    kmax = std::max(kmax, s.k.back());
    spread = std::max(spread, s.spread);
  }
  // equal constants: every k_i equal, and the same at every point
  const double ref_all = std::max({std::abs(kmax), std::abs(kmin), 1e-300});
  const bool equal_constants = (kmax - kmin) <= fc.cfg.tol_d1 * std::max(1.0, ref_all);
  std::vector<double> hm(N, 0.0);
  if (equal_constants) hm = fc.per_point([&](std::size_t i) { return harmonic_map_residual(fc.jets[i], fc.f); });
  for (std::size_t i = 0; i < N; ++i) {
    const double r2 = r2_at(fc, i);
    double ref = std::max(sp[i].k.back(), r2);
    double res = std::max(0.0, -sp[i].k.front()) / ref;
    if (!expect[i].empty()) {
      ref = std::max(ref, expect[i].back());
      for (std::size_t k = 0; k < expect[i].size(); ++k) res = std::max(res, std::abs(sp[i].k[k] - expect[i][k]) / ref);
    }
    r.residuals.push_back(std::max(res, hm[i]));
  }
  r.fitted["k_min"] = kmin;
  r.fitted["k_max"] = kmax;
  r.fitted["max_spread"] = spread;
  r.fitted["equal_constants"] = equal_constants ? 1.0 : 0.0;
  if (equal_constants) r.fitted["max_pairing_residual"] = max_of(hm);
  return finish(r, fc.cfg.tol_d2);
}

CheckResult check_pair(const FieldContext& fc) {
  if (fc.spec.partner.empty()) return not_applicable("pair-thm", "no partner field");
  CheckResult r = named("pair-thm");
  const std::size_t phi = fc.slot(fc.spec.partner);
  const PairHypothesis h = pair_fit(fc.jets, fc.f, phi);
  r.fitted["lambda"] = h.lambda;
  r.fitted["mu"] = h.mu;
  r.fitted["eig_psi"] = h.eig_psi;
  r.fitted["eig_phi"] = h.eig_phi;
  r.fitted["residual_psi"] = h.residual_psi;
  r.fitted["residual_phi"] = h.residual_phi;
  r.fitted["lap_residual_psi"] = h.lap_residual_psi;
  r.fitted["lap_residual_phi"] = h.lap_residual_phi;
  r.fitted["norm_identity_residual"] = h.norm_identity_residual;
  double res = std::max({h.residual_psi, h.residual_phi, h.lap_residual_psi, h.lap_residual_phi,
                         h.norm_identity_residual});
  auto against = [&](const FieldSpec& s, double eig, const char* key) {
    if (!s.eigenvalue) return;
    const double e = s.eigenvalue(fc.ctx(0));
    r.fitted[key] = e;
    res = std::max(res, std::abs(eig - e) / std::max(1.0, std::abs(e)));
  };
  against(fc.spec, h.eig_psi, "claimed_eig_psi");
  against(fc.model.spec(fc.spec.partner), h.eig_phi, "claimed_eig_phi");
  r.residuals.assign(1, res);
  r.points = static_cast<int>(fc.jets.size());
  r.max_residual = res;
  r.tolerance = 1e-3;
  r.pass = res < 1e-3;
  return r;
}

CheckResult check_lcp(const FieldContext& fc) {
  if (fc.fields[fc.f]->degree() == fc.model.m().dim())
    return not_applicable("lcp", "top-degree form: the Lee form is not determined");
  CheckResult r = named("lcp");
  const std::size_t N = fc.jets.size();
  std::vector<LcpRecord> rec(N);
  std::vector<double> t2(N);
  parallel_for(N, fc.cfg.jobs, [&](std::size_t i) {
    rec[i] = lcp_check(fc.jets[i], fc.f);
    const Vector th = components(rec[i].theta);
    t2[i] = th.dot(fc.jets[i].metric().g_inv() * th);
  });
  double m_lcp = 0, m_dstar = 0, m_lap = 0, m_closed = 0, m_par = 0;
  for (const auto& x : rec) {
    m_lcp = std::max(m_lcp, x.residual_lcp);
    m_dstar = std::max(m_dstar, x.residual_dstar);
    m_lap = std::max(m_lap, x.residual_lap);
    m_closed = std::max(m_closed, x.theta_closed);
    m_par = std::max(m_par, x.theta_parallel);
    double res = std::max({x.residual_lcp, x.residual_dstar, x.residual_lap, x.theta_closed});
    if (fc.spec.theta_parallel) res = std::max(res, x.theta_parallel);
    r.residuals.push_back(res);
  }
  r.fitted["theta_norm2"] = mean_of(t2);
  r.fitted["residual_lcp"] = m_lcp;
  r.fitted["residual_dstar"] = m_dstar;
  r.fitted["residual_lap"] = m_lap;
  r.fitted["theta_closed"] = m_closed;
  r.fitted["theta_parallel"] = m_par;
  if (fc.spec.lee_scale != 0.0) r.fitted["lee_scale"] = fc.spec.lee_scale;
  return finish(r, fc.cfg.tol_d2);
}

CheckResult check_lck_defect(const FieldContext& fc) {
  if (fc.spec.lck_prefactor == 0.0) return not_applicable("lck-defect", "not the middle power of an lcK form");
  CheckResult r = named("lck-defect");
  const std::size_t N = fc.jets.size();
  std::vector<Vector> D(N), R(N);
  std::vector<double> rel(N), scale(N);
  parallel_for(N, fc.cfg.jobs, [&](std::size_t i) {
    const Jet& j = fc.jets[i];
    D[i] = lck_harmonic_map_defect(j, fc.f, fc.spec.lck_N);
    R[i] = curvature_pairing(j, fc.f);
    const Vector th = components(fit_lee_form(j.center(), fc.f).theta);
    const double t2 = th.dot(j.metric().g_inv() * th);
    scale[i] = std::max(1.0, std::pow(t2, 1.5));
    rel[i] = one_form_norm(D[i], j.metric()) / scale[i];
  });
  double num = 0.0, den = 0.0, rmax = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const PointMetric& g = fc.jets[i].metric();
    num += R[i].dot(g.g_inv() * D[i]);
    den += D[i].dot(g.g_inv() * D[i]);
    rmax = std::max(rmax, one_form_norm(R[i], g));
  }
  const double c = den > 0.0 ? num / den : 0.0;
  double prop = 0.0;
  for (std::size_t i = 0; i < N; ++i) prop = std::max(prop, one_form_norm(R[i] - c * D[i], fc.jets[i].metric()));
  prop = safe_div(prop, rmax);
  r.fitted["N"] = fc.spec.lck_N;
  r.fitted["max_defect"] = max_of(rel);
  r.fitted["fitted_ratio"] = c;
  r.fitted["claimed_ratio"] = fc.spec.lck_prefactor;
  r.fitted["proportionality_residual"] = prop;
  if (max_of(rel) < fc.cfg.tol_d2) {
    // vanishing defect: the pairing must vanish with it
    for (std::size_t i = 0; i < N; ++i)
      r.residuals.push_back(std::max(rel[i], harmonic_map_residual(fc.jets[i], fc.f)));
    r.note = "defect vanishes";
    return finish(r, fc.cfg.tol_d2);
  }
  r.note = "pairing = ratio * defect";
  const double res = std::max(std::abs(c - fc.spec.lck_prefactor) / std::abs(fc.spec.lck_prefactor), prop);
  r.residuals.assign(N, res);
  return finish(r, 1e-3);
}

CheckResult check_spin7_lee(const FieldContext& fc) {
  if (fc.spec.lee_scale == 0.0) return not_applicable("spin7-lee", "not a Spin(7) form");
  CheckResult r = named("spin7-lee");
  const double s = fc.spec.lee_scale;
  std::vector<double> dphi_res(fc.jets.size());
  r.residuals = fc.per_point([&](std::size_t i) {
    const Jet& j = fc.jets[i];
    const PointMetric& g = j.metric();
    const Vector th = s * components(fit_lee_form(j.center(), fc.f).theta);
    const double t2 = th.dot(g.g_inv() * th);
    const double a = one_form_norm(spin7_lee_defect(j, fc.f, s), g) / std::max(1.0, std::pow(t2, 1.5));
    const Vector alt = components(spin7_lee_from_dphi(j, fc.f));
    dphi_res[i] = one_form_norm(alt - th, g) / std::max(1.0, std::sqrt(t2));
    return std::max(a, dphi_res[i]);
  });
  r.fitted["max_dphi_residual"] = max_of(dphi_res);
  return finish(r, fc.cfg.tol_d2);
}

CheckResult check_kenmotsu(const FieldContext& fc) {
  if (!fc.spec.expected_pairing) return not_applicable("kenmotsu-prop", "no closed-form pairing");
  CheckResult r = named("kenmotsu-prop");
  std::vector<double> cond(fc.jets.size()), hm(fc.jets.size()), mism(fc.jets.size());
  r.residuals = fc.per_point([&](std::size_t i) {
    const Jet& j = fc.jets[i];
    const PointMetric& g = j.metric();
    const EvalContext ctx = fc.ctx(i);
    const Vector R = curvature_pairing(j, fc.f);
    const Vector E = fc.spec.expected_pairing(ctx);
    const double ref = std::max({one_form_norm(E, g), one_form_norm(R, g), gradient_norm2(j.center(), fc.f)});
    const double diff = safe_div(one_form_norm(R - E, g), ref);
    cond[i] = std::abs(fc.spec.pairing_condition(ctx));
    hm[i] = harmonic_map_residual(j, fc.f);
    const bool lhs = cond[i] < fc.cfg.tol_d2;
    const bool rhs = hm[i] < fc.cfg.tol_d2;
    mism[i] = lhs == rhs ? 0.0 : 1.0;
    return std::max(diff, mism[i]);
  });
  r.fitted["max_condition_miss"] = max_of(cond);
  r.fitted["max_pairing_residual"] = max_of(hm);
  r.fitted["biconditional_violations"] = std::accumulate(mism.begin(), mism.end(), 0.0);
  return finish(r, fc.cfg.tol_d2);
}

CheckResult check_variation(const FieldContext& fc) {
  if (fc.spec.variation.empty()) return not_applicable("variation", "no variation field");
  CheckResult r = named("variation");
  const std::size_t v = fc.slot(fc.spec.variation);
  std::vector<double> hess(fc.jets.size()), overlap(fc.jets.size());
  r.residuals = fc.per_point([&](std::size_t i) {
    const Jet& j = fc.jets[i];
    const PointMetric& g = j.metric();
    const VariationIntegrands vi = variation_integrands(j, fc.f, v);
    // normalised section: divide by r^2 so sigma has unit length
    const double r2 = r2_at(fc, i);
    hess[i] = vi.hess / r2;
    overlap[i] = std::abs(vi.overlap);
    const double first = safe_div(std::abs(vi.first), fnorm(rough_laplacian(j, fc.f), g) * fnorm(j.value(v), g));
    return std::max(overlap[i], first);
  });
  r.fitted["hess_min"] = *std::min_element(hess.begin(), hess.end());
  r.fitted["hess_max"] = *std::max_element(hess.begin(), hess.end());
  r.fitted["hess_mean"] = mean_of(hess);
  r.fitted["max_overlap"] = max_of(overlap);
  return finish(r, fc.cfg.tol_d2);
}

CheckResult check_tension(const FieldContext& fc) {
  CheckResult r = named("tension");
  std::vector<double> vert(fc.jets.size());
  r.residuals = fc.per_point([&](std::size_t i) {
    const Jet& j = fc.jets[i];
    const PointMetric& g = j.metric();
    const Tension t = tension_components(j, fc.f);
    const double r2 = r2_at(fc, i);
    vert[i] = -form_inner(t.vertical, j.value(fc.f), g) / r2;
    const double h = vec_norm(t.horizontal, g) / r2;
    const double s = fnorm(t.sphere_tangential, g) / (std::sqrt(r2) * std::max(1.0, std::abs(vert[i])));
    return std::max(h, s);
  });
  r.fitted["vertical_eigenvalue"] = mean_of(vert);
  return finish(r, fc.cfg.tol_d2);
}

CheckResult check_three_sasakian(const FieldContext& fc) {
  for (const char* n : {"eta1", "eta2", "eta3", "F1", "F2", "F3"})
    if (!fc.index.count(n)) return not_applicable("three-sasakian-identities", "needs the 3-Sasakian primitives");
  CheckResult r = named("three-sasakian-identities");
  std::array<std::size_t, 3> e{fc.slot("eta1"), fc.slot("eta2"), fc.slot("eta3")};
  std::array<std::size_t, 3> F{fc.slot("F1"), fc.slot("F2"), fc.slot("F3")};
  std::vector<double> eq1(fc.jets.size()), eq2(fc.jets.size()), esc(fc.jets.size());
  r.residuals = fc.per_point([&](std::size_t p) {
    const Jet& j = fc.jets[p];
    const PointMetric& g = j.metric();
    const int n = j.dim();
    const Matrix& E = g.frame();
    double a = 0.0, b = 0.0, c = 0.0;
    for (int i = 0; i < 3; ++i) {
      const int k = (i + 2) % 3, jj = (i + 1) % 3;
      const AlternatingForm& eta = j.value(e[i]);
      AlternatingForm s1(n, 1), s2(n, 2);
      for (int q = 0; q < n; ++q) {
        const Vector v = E.col(q);
        s1 += contract(v, wedge(flat(v, g), eta));
        s2 += wedge(contract(v, j.value(F[i])), contract(v, j.value(F[jj])));
      }
      a = std::max(a, fnorm(s1 - static_cast<double>(n - 1) * eta, g) / fnorm(eta, g));
      const AlternatingForm target = -2.0 * j.value(F[k]) - wedge(j.value(e[i]), j.value(e[jj]));
      b = std::max(b, fnorm(s2 - target, g) / fnorm(j.value(F[k]), g));
      // nabla_{zeta_i} eta_i = 0 and nabla eta_i antisymmetric
      const Vector zeta = g.g_inv() * components(eta);
      Matrix D(n, n);
      for (int q = 0; q < n; ++q) D.row(q) = components(j.nabla(e[i])[q]).transpose();
      const Vector along = D.transpose() * zeta;
      const Matrix& gi = g.g_inv();
      const Matrix S = D + D.transpose();
      const double dn = std::sqrt(std::max(0.0, (gi * D * gi * D.transpose()).trace()));
      c = std::max(c, std::max(one_form_norm(along, g), std::sqrt(std::max(0.0, (gi * S * gi * S.transpose()).trace()))) /
                          std::max(1e-300, dn));
    }
    eq1[p] = a;
    eq2[p] = b;
    esc[p] = c;
    return std::max({a, b, c});
  });
  // nabla_X eta_i = c X -| F_i
  ScalarFit fit;
  for (const auto& j : fc.jets)
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < j.dim(); ++a) fit.add(j.nabla(e[i])[a], coord_contract(a, j.value(F[i])), j.metric());
  r.fitted["eq_contraction_eta"] = max_of(eq1);
  r.fitted["eq_contraction_F"] = max_of(eq2);
  r.fitted["killing"] = max_of(esc);
  r.fitted["nabla_eta_coefficient"] = fit.value();
  r.fitted["nabla_eta_residual"] = fit.residual();
  for (auto& x : r.residuals) x = std::max(x, fit.residual());
  return finish(r, fc.cfg.tol_d1);
}

CheckResult check_bending(const FieldContext& fc) {
  CheckResult r = named("bending");
  std::vector<double> dens(fc.jets.size());
  r.residuals = fc.per_point([&](std::size_t i) {
    dens[i] = bending_density(fc.jets[i], fc.f);
    std::optional<double> e;
    if (fc.spec.expected_spectrum) {
      const auto k = fc.spec.expected_spectrum(fc.ctx(i));
      e = 0.5 * std::accumulate(k.begin(), k.end(), 0.0);
    } else if (fc.spec.expected_bending) {
      e = fc.spec.expected_bending(fc.ctx(i));
    }
    if (!e) return 0.0;
    const double ref = std::max(std::abs(*e), r2_at(fc, i) * 1e-12);
    return safe_div(std::abs(dens[i] - *e), std::max(ref, std::abs(dens[i])));
  });
  if (!fc.spec.expected_spectrum && !fc.spec.expected_bending) r.note = "density recorded, no closed form";
  r.fitted["mean_density"] = mean_of(dens);
  r.fitted["min_density"] = *std::min_element(dens.begin(), dens.end());
  r.fitted["max_density"] = *std::max_element(dens.begin(), dens.end());
  return finish(r, fc.cfg.tol_d2);
}

double einstein_rho(const Jet& j) { return (j.metric().g_inv() * j.curvature().ricci()).trace() / j.dim(); }

CheckResult check_einstein(const FieldContext& fc) {
  CheckResult r = named("einstein");
  std::vector<double> rho(fc.jets.size());
  r.residuals = fc.per_point([&](std::size_t i) {
    const Jet& j = fc.jets[i];
    rho[i] = einstein_rho(j);
    const Matrix miss = j.curvature().ricci() - rho[i] * j.metric().g();
    double res = miss.cwiseAbs().maxCoeff() / std::max(1.0, std::abs(rho[i]) * j.metric().g().cwiseAbs().maxCoeff());
    if (fc.model.einstein) res = std::max(res, std::abs(rho[i] - *fc.model.einstein) / std::max(1.0, std::abs(*fc.model.einstein)));
    return res;
  });
  r.fitted["rho"] = mean_of(rho);
  if (fc.model.einstein) r.fitted["rho_closed_form"] = *fc.model.einstein;
  return finish(r, fc.cfg.tol_d2);
}

CheckResult check_relations(const FieldContext& fc, double rho) {
  if (fc.model.relations.empty()) return not_applicable("relations", "model has no constant relations");
  CheckResult r = named("relations");
  r.fitted["rho"] = rho;
  for (const auto& rel : fc.model.relations) {
    const auto [lhs, rhs] = rel.sides(fc.run.constants, rho);
    r.fitted[rel.name + " lhs"] = lhs;
    r.fitted[rel.name + " rhs"] = rhs;
    r.residuals.push_back(std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
  }
  return finish(r, fc.cfg.tol_d2);
}

CheckResult check_structure(const FieldContext& fc) {
  if (fc.model.constants.empty()) return not_applicable("structure", "model has no fitted constants");
  CheckResult r = named("structure");
  for (const auto& c : fc.model.constants) {
    r.fitted[c.name] = fc.run.constants.at(c.name);
    r.fitted[c.name + " residual"] = fc.run.constant_residuals.at(c.name);
    r.residuals.push_back(fc.run.constant_residuals.at(c.name));
  }
  r.points = static_cast<int>(fc.run.points.size());
  r.max_residual = max_of(r.residuals);
  r.tolerance = fc.cfg.tol_d1;
  r.pass = r.max_residual < r.tolerance;
  return r;
}

CheckResult check_covariant_oracle(const FieldContext& fc) {
  const ModelManifold& m = fc.model.m();
  if (m.flavor() == Flavor::direct && !has_curvature_oracle(m))
    return not_applicable("covariant-oracle", "no closed-form connection for this chart");
  CheckResult r = named("covariant-oracle");
  const FormField& s = fc.model.field(fc.spec.name);
  r.residuals.resize(fc.run.points.size());
  parallel_for(fc.run.points.size(), fc.cfg.jobs,
               [&](std::size_t i) { r.residuals[i] = covariant_oracle(m, s, fc.run.points[i]).discrepancy; });
  return finish(r, 1e-4);
}

CheckResult check_curvature_oracle(const FieldContext& fc) {
  const ModelManifold& m = fc.model.m();
  if (!has_curvature_oracle(m)) return not_applicable("curvature-oracle", "no closed-form curvature for this chart");
  CheckResult r = named("curvature-oracle");
  r.residuals.resize(fc.run.points.size());
  parallel_for(fc.run.points.size(), fc.cfg.jobs,
               [&](std::size_t i) { r.residuals[i] = curvature_oracle(m, fc.run.points[i]).discrepancy; });
  return finish(r, 1e-3);
}

CheckResult check_mc(const FieldContext& fc) {
  const ModelManifold& m = fc.model.m();
  if (m.flavor() != Flavor::embedded || m.ambient_dim() != m.dim() + 1)
    return not_applicable("mc-area", "not a round sphere");
  CheckResult r = named("mc-area");
  const long samples = 4000;
  const int n = m.dim();
  const double vol = sphere_volume(n);
  const McEstimate area = mc_integral(m, [](const ChartPoint&) { return 1.0; }, samples, fc.cfg.seed);
  const FormField& s = fc.model.field(fc.spec.name);
  const McEstimate bend = mc_integral(
      m,
      [&](const ChartPoint& p) {
        const FirstOrder fo = first_order(m, {&s}, p, m.steps().h1 * m.scale(p));
        return 0.5 * gradient_norm2(fo, 0);
      },
      samples / 4, fc.cfg.seed + 1);
  std::vector<double> dens(fc.jets.size());
  for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = bending_density(fc.jets[i], fc.f);
  const double bend_exact = mean_of(dens) * vol;
  auto ratio = [&](const McEstimate& e, double exact) {
    return std::abs(e.value - exact) / (3.0 * e.error + fc.cfg.tol_d2 * std::max(std::abs(exact), 1.0));
  };
  r.fitted["area"] = area.value;
  r.fitted["area_exact"] = vol;
  r.fitted["area_stderr"] = area.error;
  r.fitted["bending"] = bend.value;
  r.fitted["bending_constant_density"] = bend_exact;
  r.fitted["bending_stderr"] = bend.error;
  r.fitted["energy"] = 0.5 * n * vol + bend.value;
  r.residuals = {ratio(area, vol), ratio(bend, bend_exact)};
  r.note = "residual is |estimate - exact| / (3 stderr + tol_d2 max(|exact|, 1))";
  return finish(r, 1.0);
}

}  // namespace

ModelRun prepare_model(const Model& model, const CheckConfig& cfg) {
  ModelRun run;
  run.model = &model;
  run.points = model.m().sample_points(cfg.points, cfg.seed);
  for (const auto& c : model.constants) {
    std::vector<const FormField*> fs;
    for (const auto& name : c.fields) fs.push_back(&model.field(name));
    std::vector<FirstOrder> fos(run.points.size());
    parallel_for(run.points.size(), cfg.jobs, [&](std::size_t i) {
      const ModelManifold& m = model.m();
      fos[i] = first_order(m, fs, run.points[i], m.steps().h1 * m.scale(run.points[i]));
    });
    const auto [value, residual] = c.fit(fos);
    run.constants[c.name] = value;
    run.constant_residuals[c.name] = residual;
  }
  return run;
}

FieldReport run_field(const ModelRun& run, const std::string& field, const std::vector<std::string>& checks,
                      const CheckConfig& cfg) {
  const Model& model = *run.model;
  FieldReport rep;
  rep.model = model.id;
  rep.field = field;
  const FieldSpec& spec = model.spec(field);
  const FormField& main = model.field(field);
  const FormField probe = probe_field(model.m().dim(), main.degree());

  FieldContext fc{run, model, spec, cfg, {}, {}, {}, 0};
  auto add = [&](const FormField& f) {
    if (fc.index.count(f.name())) return;
    fc.index[f.name()] = fc.fields.size();
    fc.fields.push_back(&f);
  };
  add(main);
  for (const auto& a : spec.aux) add(model.field(a));
  if (!spec.partner.empty()) add(model.field(spec.partner));
  if (!spec.variation.empty()) add(model.field(spec.variation));
  add(probe);
  fc.f = 0;

  const bool need_jets =
      std::any_of(checks.begin(), checks.end(), [](const std::string& c) { return !kNoJet.count(c); });
  if (need_jets) {
    std::vector<std::optional<Jet>> built(run.points.size());
    parallel_for(run.points.size(), cfg.jobs,
                 [&](std::size_t i) { built[i].emplace(model.m(), fc.fields, run.points[i], true); });
    for (auto& j : built) fc.jets.push_back(std::move(*j));
  }
  const std::size_t pr = fc.index.at("probe");

  std::optional<double> rho;
  auto rho_value = [&]() {
    if (!rho) {
      if (fc.jets.empty()) {
        std::vector<double> v(run.points.size());
        parallel_for(run.points.size(), cfg.jobs, [&](std::size_t i) {
          Jet j(model.m(), {}, run.points[i], true);
          v[i] = einstein_rho(j);
        });
        rho = mean_of(v);
      } else {
        rho = mean_of(fc.per_point([&](std::size_t i) { return einstein_rho(fc.jets[i]); }));
      }
    }
    return *rho;
  };

  for (const auto& name : checks) {
    CheckResult r;
    if (name == "constant-length") r = check_constant_length(fc);
    else if (name == "transpose") r = check_transpose(fc);
    else if (name == "laplacian-pairing") r = check_laplacian_pairing(fc);
    else if (name == "metric-compat") {
      r.name = name;
      r.residuals = fc.per_point([&](std::size_t i) { return metric_compatibility_identity(fc.jets[i], fc.f, pr); });
      r = finish(r, cfg.tol_d2);
    } else if (name == "nanalap") {
      r.name = name;
      r.residuals = fc.per_point([&](std::size_t i) { return laplacian_adjoint_residual(fc.jets[i], fc.f, pr); });
      r = finish(r, cfg.tol_d2);
    } else if (name == "ricci-identity") {
      r.name = name;
      r.residuals = fc.per_point([&](std::size_t i) {
        return std::max(ricci_identity_residual(fc.jets[i], fc.f), ricci_identity_residual(fc.jets[i], pr));
      });
      r = finish(r, cfg.tol_d2);
    } else if (name == "structure") r = check_structure(fc);
    else if (name == "eigen") r = check_eigen(fc);
    else if (name == "harmonic-section") r = check_harmonic_section(fc);
    else if (name == "harmonic-map") r = check_harmonic_map(fc);
    else if (name == "two-route") r = check_two_route(fc);
    else if (name == "spectrum") r = check_spectrum(fc);
    else if (name == "pair-thm") r = check_pair(fc);
    else if (name == "lcp") r = check_lcp(fc);
    else if (name == "lck-defect") r = check_lck_defect(fc);
    else if (name == "spin7-lee") r = check_spin7_lee(fc);
    else if (name == "kenmotsu-prop") r = check_kenmotsu(fc);
    else if (name == "variation") r = check_variation(fc);
    else if (name == "tension") r = check_tension(fc);
    else if (name == "three-sasakian-identities") r = check_three_sasakian(fc);
    else if (name == "bending") r = check_bending(fc);
    else if (name == "einstein") r = check_einstein(fc);
    else if (name == "relations") r = check_relations(fc, rho_value());
    else if (name == "covariant-oracle") r = check_covariant_oracle(fc);
    else if (name == "curvature-oracle") r = check_curvature_oracle(fc);
    else if (name == "mc-area") r = check_mc(fc);
    else throw UnknownName("unknown check '" + name + "'");
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

}  // namespace harmonia
