#include "harmonia/checks.hpp"
#include "harmonia/models.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace harmonia;

TEST_CASE("catalog entries build and are well formed") {
  std::set<std::string> seen;
  for (const auto& id : catalog_ids()) {
    INFO(id);
    CHECK(seen.insert(id).second);
    const Model m = build(id);
    CHECK(m.id == id);
    CHECK(m.m().dim() >= 2);
    REQUIRE_FALSE(m.field_names().empty());
    for (const auto& name : m.field_names()) {
      const FieldSpec& s = m.spec(name);
      CHECK(m.field(name).name() == name);
      CHECK_FALSE(s.checks.empty());
      for (const auto& c : s.checks) CHECK(is_check(c));
      for (const auto& a : s.aux) CHECK(m.has_field(a));
      if (!s.partner.empty()) CHECK(m.has_field(s.partner));
      if (!s.variation.empty()) CHECK(m.has_field(s.variation));
      if (std::find(s.checks.begin(), s.checks.end(), "eigen") != s.checks.end()) CHECK(static_cast<bool>(s.eigenvalue));
    }
    for (const auto& c : m.constants)
      for (const auto& f : c.fields) CHECK(m.has_field(f));
    // the suite lists each (field, check) once
    std::set<std::pair<std::string, std::string>> items;
    for (const auto& item : expected_suite(m)) CHECK(items.insert({item.field, item.check}).second);
  }
}

TEST_CASE("unknown or invalid ids") {
  for (const char* id : {"nope", "round-sphere", "round-sphere:1", "round-sphere:x", "sasakian-s4", "kenmotsu:0,1,0",
                         "kenmotsu:1,1", "kenmotsu:1,-1,0", "kenmotsu-exp:0", "lc-hk:2", "hopf-lck:9", "flat"}) {
    INFO(id);
    CHECK_THROWS_AS(build(id), UnknownName);
  }
  const Model m = build("round-sphere:2");
  CHECK_FALSE(m.has_field("nope"));
  CHECK_THROWS_AS(m.field("nope"), UnknownName);
  CHECK_THROWS_AS(m.spec("nope"), UnknownName);
  // parametrised families accept other members
  CHECK(build("round-sphere:5").m().dim() == 5);
  CHECK(build("sasakian-s7").m().dim() == 7);
  CHECK(build("kenmotsu:3,2,0.5").params.at("r") == 3.0);
}

TEST_CASE("fields flagged constant length have constant length") {
  for (const auto& id : catalog_ids()) {
    const Model m = build(id);
    for (const auto& name : m.field_names()) {
      const FormField& f = m.field(name);
      if (!f.constant_length()) continue;
      INFO(id);
      INFO(name);
      double lo = INFINITY, hi = 0.0;
      for (const auto& p : m.m().sample_points(6, 3)) {
        const LocalData l = m.m().local(p);
        const double v = form_norm2(f(l), l.metric);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(hi - lo <= 1e-9 * hi);
      CHECK(hi > 0.0);
    }
  }
}

TEST_CASE("Kenmotsu warping function") {
  // dt^2 + C (t+K)^{2/r} g_0 has nabla eta = b(-X^flat + eta(X) eta) with b = -1/(r(t+K))
  for (const char* id : {"kenmotsu:1,1,0", "kenmotsu:2,1,0", "kenmotsu:3,2,0.5"}) {
    INFO(id);
    const Model m = build(id);
    const double r = m.params.at("r"), K = m.params.at("K");
    for (const auto& p : m.m().sample_points(4, 9)) {
      const FirstOrder fo = first_order(m.m(), {&m.field("eta")}, p, m.m().steps().h1);
      const double t = fo.local.x[fo.local.x.size() - 1];
      CHECK(kenmotsu_b(fo, 0) == doctest::Approx(-1.0 / (r * (t + K))).epsilon(1e-8));
    }
  }
  // sigma = e^{ct}: b = -c/2 everywhere
  const Model e = build("kenmotsu-exp:1");
  for (const auto& p : e.m().sample_points(3, 1)) {
    const FirstOrder fo = first_order(e.m(), {&e.field("eta")}, p, e.m().steps().h1);
    CHECK(kenmotsu_b(fo, 0) == doctest::Approx(-0.5).epsilon(1e-8));
  }
}

TEST_CASE("expected verdicts") {
  auto expect = [](const std::string& id, const std::string& field, const std::string& check) {
    for (const auto& item : expected_suite(build(id)))
      if (item.field == field && item.check == check) return std::optional<bool>(item.expect_pass);
    return std::optional<bool>();
  };
  CHECK(expect("nk-s6", "omega", "harmonic-map") == true);
  CHECK(expect("lck-cone:3", "omega", "harmonic-section") == false);
  CHECK(expect("hopf-lck:2", "omega", "harmonic-section") == true);
  CHECK(expect("hopf-lck:2", "omega", "harmonic-map") == true);
  CHECK(expect("lck-conformal:2", "omega", "harmonic-map") == false);
  CHECK(expect("round-sphere:2", "vol", "mc-area") == true);
  CHECK_FALSE(expect("round-sphere:2", "killing", "harmonic-section").has_value());
}

TEST_CASE("describe and list") {
  CHECK(catalog_ids().size() == 18);
  CHECK(catalog_families().size() >= 10);
  for (const auto& [syntax, what] : catalog_families()) {
    CHECK_FALSE(syntax.empty());
    CHECK_FALSE(what.empty());
  }
}
