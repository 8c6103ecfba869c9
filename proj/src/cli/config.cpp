#include "mlid/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <set>

#include "mlid/common/error.hpp"
#include "mlid/phases/polynomial.hpp"

namespace mlid::cli {
namespace {

using Terms = std::vector<std::pair<std::vector<int>, double>>;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfig, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void expect_object(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  expect_object(j, path);
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) fail(join(path, k), "unknown field");
}

const Json& need(const Json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(join(path, key), "missing required field");
  return j.at(key);
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

long long as_integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

std::uint64_t as_u64(const Json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const long long x = as_integer(v, path);
  if (x < 0) fail(path, "expected a nonnegative integer");
  return static_cast<std::uint64_t>(x);
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_numbers(const Json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], index(path, i)));
  return out;
}

std::vector<int> as_ints(const Json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(static_cast<int>(as_integer(v[i], index(path, i))));
  return out;
}

std::vector<std::string> as_strings(const Json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_string(v[i], index(path, i)));
  return out;
}

template <class T, class F>
void optional_field(const Json& j, const std::string& path, const char* key, T& out, F read) {
  if (j.contains(key)) out = read(j.at(key), join(path, key));
}

Terms parse_terms(const Json& v, const std::string& path, int dim) {
  if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of terms");
  Terms out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = index(path, i);
    check_keys(v[i], p, {"exponents", "coeff"});
    auto e = as_ints(need(v[i], p, "exponents"), join(p, "exponents"));
    if (static_cast<int>(e.size()) != dim) fail(join(p, "exponents"), "length must equal dim");
    for (int x : e)
      if (x < 0) fail(join(p, "exponents"), "exponents must be nonnegative");
    out.emplace_back(std::move(e), as_number(need(v[i], p, "coeff"), join(p, "coeff")));
  }
  return out;
}

Json terms_json(const Terms& t) {
  Json a = Json::array();
  for (const auto& [e, c] : t) a.push_back({{"exponents", e}, {"coeff", c}});
  return a;
}

PhaseSpec parse_phase(const Json& j, const std::string& path) {
  expect_object(j, path);
  PhaseSpec p;
  p.kind = as_string(need(j, path, "kind"), join(path, "kind"));
  if (p.kind == "paraboloid") {
    check_keys(j, path, {"kind", "dim"});
    p.dim = static_cast<int>(as_integer(need(j, path, "dim"), join(path, "dim")));
    if (p.dim < 1) fail(join(path, "dim"), "must be at least 1");
  } else if (p.kind == "polynomial") {
    check_keys(j, path, {"kind", "dim", "terms"});
    p.dim = static_cast<int>(as_integer(need(j, path, "dim"), join(path, "dim")));
    if (p.dim < 1) fail(join(path, "dim"), "must be at least 1");
    p.terms = parse_terms(need(j, path, "terms"), join(path, "terms"), p.dim);
  } else if (p.kind == "tabulated") {
    check_keys(j, path, {"kind", "lo", "hi", "step", "values", "sample"});
    p.lo = as_number(need(j, path, "lo"), join(path, "lo"));
    p.step = as_number(need(j, path, "step"), join(path, "step"));
    if (p.step <= 0) fail(join(path, "step"), "must be positive");
    if (j.contains("values")) {
      p.values = as_numbers(j.at("values"), join(path, "values"));
      if (p.values.size() < 4) fail(join(path, "values"), "needs at least 4 samples");
      p.hi = p.lo + p.step * (p.values.size() - 1);
    } else {
      p.hi = as_number(need(j, path, "hi"), join(path, "hi"));
      if (p.hi <= p.lo) fail(join(path, "hi"), "must exceed lo");
      const Json& s = need(j, path, "sample");
      const std::string sp = join(path, "sample");
      expect_object(s, sp);
      p.sample = as_string(need(s, sp, "kind"), join(sp, "kind"));
      if (p.sample == "cosh") {
        check_keys(s, sp, {"kind"});
      } else if (p.sample == "polynomial") {
        check_keys(s, sp, {"kind", "terms"});
        p.sample_terms = parse_terms(need(s, sp, "terms"), join(sp, "terms"), 1);
      } else {
        fail(join(sp, "kind"), "unknown sample kind '" + p.sample + "' (cosh | polynomial)");
      }
    }
  } else {
    fail(join(path, "kind"), "unknown phase kind '" + p.kind + "' (paraboloid | polynomial | tabulated)");
  }
  return p;
}

Json phase_json(const PhaseSpec& p) {
  Json j{{"kind", p.kind}};
  if (p.kind == "paraboloid") {
    j["dim"] = p.dim;
  } else if (p.kind == "polynomial") {
    j["dim"] = p.dim;
    j["terms"] = terms_json(p.terms);
  } else {
    j["lo"] = p.lo;
    j["step"] = p.step;
    if (p.sample.empty()) {
      j["values"] = p.values;
    } else {
      j["hi"] = p.hi;
      Json s{{"kind", p.sample}};
      if (p.sample == "polynomial") s["terms"] = terms_json(p.sample_terms);
      j["sample"] = s;
    }
  }
  return j;
}

DensitySpec parse_density(const Json& j, const std::string& path) {
  expect_object(j, path);
  DensitySpec d;
  d.kind = as_string(need(j, path, "kind"), join(path, "kind"));
  auto modulation = [&] {
    optional_field(j, path, "modulation", d.modulation, as_numbers);
  };
  if (d.kind == "gaussian") {
    check_keys(j, path, {"kind", "center", "stddev", "amplitude", "truncation", "modulation"});
    d.center = as_numbers(need(j, path, "center"), join(path, "center"));
    d.stddev = as_number(need(j, path, "stddev"), join(path, "stddev"));
    if (d.stddev <= 0) fail(join(path, "stddev"), "must be positive");
    optional_field(j, path, "amplitude", d.amplitude, as_number);
    optional_field(j, path, "truncation", d.truncation, as_number);
    if (d.truncation <= 0) fail(join(path, "truncation"), "must be positive");
    d.dim = static_cast<int>(d.center.size());
  } else if (d.kind == "bump") {
    check_keys(j, path, {"kind", "center", "radius", "modulation"});
    d.center = as_numbers(need(j, path, "center"), join(path, "center"));
    d.radius = as_number(need(j, path, "radius"), join(path, "radius"));
    if (d.radius <= 0) fail(join(path, "radius"), "must be positive");
    d.dim = static_cast<int>(d.center.size());
  } else if (d.kind == "indicator") {
    check_keys(j, path, {"kind", "lo", "hi", "modulation"});
    d.lo = as_numbers(need(j, path, "lo"), join(path, "lo"));
    d.hi = as_numbers(need(j, path, "hi"), join(path, "hi"));
    if (d.lo.size() != d.hi.size()) fail(join(path, "hi"), "length must equal lo");
    for (std::size_t a = 0; a < d.lo.size(); ++a)
      if (d.hi[a] <= d.lo[a]) fail(join(path, "hi"), "must exceed lo on every axis");
    d.dim = static_cast<int>(d.lo.size());
  } else if (d.kind == "samples") {
    check_keys(j, path, {"kind", "lo", "hi", "shape", "values", "modulation"});
    d.lo = as_numbers(need(j, path, "lo"), join(path, "lo"));
    d.hi = as_numbers(need(j, path, "hi"), join(path, "hi"));
    d.shape = as_ints(need(j, path, "shape"), join(path, "shape"));
    if (d.lo.size() != d.hi.size() || d.lo.size() != d.shape.size())
      fail(join(path, "shape"), "lo, hi and shape must have the same length");
    std::size_t count = 1;
    for (int s : d.shape) {
      if (s < 4) fail(join(path, "shape"), "at least 4 samples per axis");
      count *= static_cast<std::size_t>(s);
    }
    const Json& v = need(j, path, "values");
    const std::string vp = join(path, "values");
    if (!v.is_array() || v.size() != count) fail(vp, "expected " + std::to_string(count) + " samples");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i].is_number()) {
        d.values.emplace_back(as_number(v[i], index(vp, i)), 0.0);
      } else {
        const auto c = as_numbers(v[i], index(vp, i));
        if (c.size() != 2) fail(index(vp, i), "expected a number or [re, im]");
        d.values.emplace_back(c[0], c[1]);
      }
    }
    d.dim = static_cast<int>(d.lo.size());
  } else if (d.kind == "zero") {
    check_keys(j, path, {"kind", "dim"});
    d.dim = static_cast<int>(as_integer(need(j, path, "dim"), join(path, "dim")));
  } else {
    fail(join(path, "kind"), "unknown density kind '" + d.kind + "' (gaussian | bump | indicator | samples | zero)");
  }
  if (d.kind != "zero") modulation();
  if (d.dim < 1) fail(path, "density dimension must be at least 1");
  if (!d.modulation.empty() && static_cast<int>(d.modulation.size()) != d.dim)
    fail(join(path, "modulation"), "length must equal the density dimension");
  return d;
}

Json density_json(const DensitySpec& d) {
  Json j{{"kind", d.kind}};
  if (d.kind == "gaussian") {
    j["center"] = d.center;
    j["stddev"] = d.stddev;
    j["amplitude"] = d.amplitude;
    j["truncation"] = d.truncation;
  } else if (d.kind == "bump") {
    j["center"] = d.center;
    j["radius"] = d.radius;
  } else if (d.kind == "indicator") {
    j["lo"] = d.lo;
    j["hi"] = d.hi;
  } else if (d.kind == "samples") {
    j["lo"] = d.lo;
    j["hi"] = d.hi;
    j["shape"] = d.shape;
    Json v = Json::array();
    for (const auto& [re, im] : d.values) v.push_back(Json::array({re, im}));
    j["values"] = v;
  } else {
    j["dim"] = d.dim;
  }
  if (!d.modulation.empty()) j["modulation"] = d.modulation;
  return j;
}

TubeSpec parse_tube(const Json& j, const std::string& path) {
  check_keys(j, path, {"direction", "cross_section", "sides", "offset", "coefficient"});
  TubeSpec t;
  t.direction = as_numbers(need(j, path, "direction"), join(path, "direction"));
  optional_field(j, path, "cross_section", t.cross_section, as_string);
  if (t.cross_section != "box" && t.cross_section != "ball")
    fail(join(path, "cross_section"), "expected box or ball");
  optional_field(j, path, "sides", t.sides, as_numbers);
  t.offset = as_numbers(need(j, path, "offset"), join(path, "offset"));
  optional_field(j, path, "coefficient", t.coefficient, as_number);
  const std::size_t n = t.direction.size();
  if (n < 2) fail(join(path, "direction"), "tubes live in R^n with n >= 2");
  if (t.offset.size() != n) fail(join(path, "offset"), "length must equal the direction's");
  if (!t.sides.empty() && (t.cross_section != "box" || t.sides.size() != n - 1))
    fail(join(path, "sides"), "box sides need n-1 entries");
  if (t.coefficient < 0) fail(join(path, "coefficient"), "must be nonnegative");
  return t;
}

Json tube_json(const TubeSpec& t) {
  Json j{{"direction", t.direction}, {"cross_section", t.cross_section}};
  if (!t.sides.empty()) j["sides"] = t.sides;
  j["offset"] = t.offset;
  j["coefficient"] = t.coefficient;
  return j;
}

std::vector<TubeSpec> parse_tubes(const Json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of tubes");
  std::vector<TubeSpec> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_tube(v[i], index(path, i)));
  return out;
}

Json tubes_json(const std::vector<TubeSpec>& t) {
  Json a = Json::array();
  for (const auto& x : t) a.push_back(tube_json(x));
  return a;
}

std::vector<IdentityCase> parse_cases(const Json& v, const std::string& path, bool with_sigma) {
  if (!v.is_array()) fail(path, "expected an array of cases");
  std::vector<IdentityCase> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = index(path, i);
    if (with_sigma) {
      check_keys(v[i], p, {"name", "phases", "densities", "sigma"});
    } else {
      check_keys(v[i], p, {"name", "phases", "densities"});
    }
    IdentityCase c;
    c.name = as_string(need(v[i], p, "name"), join(p, "name"));
    c.phases = as_strings(need(v[i], p, "phases"), join(p, "phases"));
    c.densities = as_strings(need(v[i], p, "densities"), join(p, "densities"));
    if (with_sigma) optional_field(v[i], p, "sigma", c.sigma, as_number);
    if (c.phases.size() != 2 || c.densities.size() != 2)
      fail(join(p, "phases"), "identity cases take two phases and two densities");
    out.push_back(std::move(c));
  }
  return out;
}

Json case_json(const IdentityCase& c, bool with_sigma) {
  Json j{{"name", c.name}, {"phases", c.phases}, {"densities", c.densities}};
  if (with_sigma) j["sigma"] = c.sigma;
  return j;
}

void check_phase_names(const Config& c, const std::vector<std::string>& names, const std::string& path) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!c.phases.count(names[i])) fail(index(path, i), "unknown phase '" + names[i] + "'");
}

void check_density_names(const Config& c, const std::vector<std::string>& names, const std::string& path) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!c.densities.count(names[i])) fail(index(path, i), "unknown density '" + names[i] + "'");
}

phases::Polynomial polynomial_of(int dim, const Terms& terms) {
  std::vector<phases::Monomial> m;
  for (const auto& [e, c] : terms) m.push_back({e, c});
  return phases::Polynomial(dim, std::move(m));
}

}  // namespace

Tolerances Tolerances::scaled(double f) const {
  Tolerances t = *this;
  for (double* v : {&t.bilinear, &t.tail, &t.sigma, &t.ot, &t.kakeya_sigmas, &t.kakeya_relative, &t.jacobian,
                    &t.hess, &t.scaling_slope})
    *v *= f;
  // The ratio bound is a factor, so it scales multiplicatively around 1.
  t.scaling_ratio = 1.0 + (t.scaling_ratio - 1.0) * f;
  return t;
}

bool Config::operator==(const Config& o) const {
  return convention.forward_sign == o.convention.forward_sign &&
         convention.extension_sign == o.convention.extension_sign &&
         convention.frequency_scale == o.convention.frequency_scale && seed == o.seed && workers == o.workers &&
         tolerances == o.tolerances && phases == o.phases && densities == o.densities && bilinear == o.bilinear &&
         sigma == o.sigma && ot == o.ot && kakeya == o.kakeya && blockdet == o.blockdet && jacobian == o.jacobian &&
         scaling == o.scaling;
}

Config parse_config(const Json& j) {
  check_keys(j, "", {"convention", "seed", "workers", "tolerances", "phases", "densities", "suites"});
  Config c;
  if (j.contains("convention")) {
    const Json& v = j.at("convention");
    check_keys(v, "convention", {"forward_sign", "extension_sign", "frequency_scale"});
    optional_field(v, "convention", "forward_sign", c.convention.forward_sign,
                   [](const Json& x, const std::string& p) { return static_cast<int>(as_integer(x, p)); });
    optional_field(v, "convention", "extension_sign", c.convention.extension_sign,
                   [](const Json& x, const std::string& p) { return static_cast<int>(as_integer(x, p)); });
    optional_field(v, "convention", "frequency_scale", c.convention.frequency_scale, as_number);
    for (int s : {c.convention.forward_sign, c.convention.extension_sign})
      if (s != 1 && s != -1) fail("convention", "signs must be +1 or -1");
    if (c.convention.frequency_scale <= 0) fail("convention.frequency_scale", "must be positive");
  }
  optional_field(j, "", "seed", c.seed, as_u64);
  optional_field(j, "", "workers", c.workers, [](const Json& x, const std::string& p) {
    const long long w = as_integer(x, p);
    if (w < 0) fail(p, "must be nonnegative (0 = all cores)");
    return static_cast<int>(w);
  });
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    check_keys(t, "tolerances", {"bilinear", "tail", "sigma", "ot", "kakeya_sigmas", "kakeya_relative", "jacobian",
                                 "hess", "scaling_slope", "scaling_ratio"});
    auto& tol = c.tolerances;
    for (auto [key, ptr] : std::initializer_list<std::pair<const char*, double*>>{
             {"bilinear", &tol.bilinear}, {"tail", &tol.tail}, {"sigma", &tol.sigma}, {"ot", &tol.ot},
             {"kakeya_sigmas", &tol.kakeya_sigmas}, {"kakeya_relative", &tol.kakeya_relative},
             {"jacobian", &tol.jacobian}, {"hess", &tol.hess}, {"scaling_slope", &tol.scaling_slope},
             {"scaling_ratio", &tol.scaling_ratio}}) {
      optional_field(t, "tolerances", key, *ptr, as_number);
      if (*ptr <= 0) fail(join("tolerances", key), "must be positive");
    }
  }
  if (j.contains("phases")) {
    expect_object(j.at("phases"), "phases");
    for (const auto& [name, v] : j.at("phases").items()) c.phases[name] = parse_phase(v, join("phases", name));
  }
  if (j.contains("densities")) {
    expect_object(j.at("densities"), "densities");
    for (const auto& [name, v] : j.at("densities").items())
      c.densities[name] = parse_density(v, join("densities", name));
  }
  if (!j.contains("suites")) return c;
  const Json& s = j.at("suites");
  check_keys(s, "suites", {"bilinear", "sigma", "ot", "kakeya", "blockdet", "jacobian", "scaling"});

  if (s.contains("bilinear")) {
    const Json& b = s.at("bilinear");
    check_keys(b, "suites.bilinear", {"cases", "r1", "r2"});
    c.bilinear.cases = parse_cases(need(b, "suites.bilinear", "cases"), "suites.bilinear.cases", false);
    optional_field(b, "suites.bilinear", "r1", c.bilinear.r1, as_number);
    optional_field(b, "suites.bilinear", "r2", c.bilinear.r2, as_number);
    if (!(c.bilinear.r1 > 0 && c.bilinear.r2 > c.bilinear.r1)) fail("suites.bilinear.r2", "need 0 < r1 < r2");
  }
  if (s.contains("sigma")) {
    const Json& b = s.at("sigma");
    check_keys(b, "suites.sigma", {"cases", "sigmas"});
    c.sigma.cases = parse_cases(need(b, "suites.sigma", "cases"), "suites.sigma.cases", false);
    c.sigma.sigmas = as_numbers(need(b, "suites.sigma", "sigmas"), "suites.sigma.sigmas");
  }
  if (s.contains("ot")) {
    const Json& b = s.at("ot");
    check_keys(b, "suites.ot", {"pairs"});
    const Json& pairs = need(b, "suites.ot", "pairs");
    if (!pairs.is_array()) fail("suites.ot.pairs", "expected an array");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string p = index("suites.ot.pairs", i);
      check_keys(pairs[i], p, {"name", "f1", "f2"});
      c.ot.pairs.push_back({as_string(need(pairs[i], p, "name"), join(p, "name")),
                            as_string(need(pairs[i], p, "f1"), join(p, "f1")),
                            as_string(need(pairs[i], p, "f2"), join(p, "f2"))});
    }
  }
  if (s.contains("kakeya")) {
    const Json& b = s.at("kakeya");
    const std::string bp = "suites.kakeya";
    check_keys(b, bp, {"samples", "shards", "z_count", "z_box", "min_wedge", "configurations", "families",
                       "family_sigmas", "family_samples"});
    auto& k = c.kakeya;
    optional_field(b, bp, "samples", k.samples, as_u64);
    optional_field(b, bp, "shards", k.shards,
                   [](const Json& x, const std::string& p) { return static_cast<int>(as_integer(x, p)); });
    optional_field(b, bp, "z_count", k.z_count,
                   [](const Json& x, const std::string& p) { return static_cast<int>(as_integer(x, p)); });
    optional_field(b, bp, "z_box", k.z_box, as_number);
    optional_field(b, bp, "min_wedge", k.min_wedge, as_number);
    optional_field(b, bp, "family_samples", k.family_samples, as_u64);
    if (k.samples == 0 || k.shards <= 0 || k.z_count <= 0 || k.family_samples == 0)
      fail(bp, "samples, shards, z_count and family_samples must be positive");
    if (b.contains("configurations")) {
      const Json& cs = b.at("configurations");
      if (!cs.is_array()) fail(join(bp, "configurations"), "expected an array");
      for (std::size_t i = 0; i < cs.size(); ++i) {
        const std::string p = index(join(bp, "configurations"), i);
        check_keys(cs[i], p, {"name", "tubes", "random"});
        KakeyaConfiguration kc;
        kc.name = as_string(need(cs[i], p, "name"), join(p, "name"));
        if (cs[i].contains("tubes") == cs[i].contains("random")) fail(p, "give exactly one of tubes or random");
        if (cs[i].contains("tubes")) {
          kc.tubes = parse_tubes(cs[i].at("tubes"), join(p, "tubes"));
          for (std::size_t t = 0; t < kc.tubes.size(); ++t)
            if (kc.tubes[t].direction.size() != kc.tubes.size())
              fail(index(join(p, "tubes"), t), "a configuration needs n tubes in R^n");
        } else {
          const Json& r = cs[i].at("random");
          const std::string rp = join(p, "random");
          check_keys(r, rp, {"n", "seed"});
          kc.random_n = static_cast<int>(as_integer(need(r, rp, "n"), join(rp, "n")));
          kc.random_seed = as_u64(need(r, rp, "seed"), join(rp, "seed"));
          if (kc.random_n < 2) fail(join(rp, "n"), "must be at least 2");
        }
        k.configurations.push_back(std::move(kc));
      }
    }
    if (b.contains("families")) {
      const Json& fs = b.at("families");
      if (!fs.is_array()) fail(join(bp, "families"), "expected an array of families");
      for (std::size_t i = 0; i < fs.size(); ++i)
        k.families.push_back(parse_tubes(fs[i], index(join(bp, "families"), i)));
      for (std::size_t i = 0; i < k.families.size(); ++i)
        for (const auto& t : k.families[i])
          if (t.direction.size() != k.families.size())
            fail(index(join(bp, "families"), i), "n families of tubes in R^n are required");
    }
    optional_field(b, bp, "family_sigmas", k.family_sigmas, as_numbers);
  }
  if (s.contains("blockdet")) {
    const Json& b = s.at("blockdet");
    const std::string bp = "suites.blockdet";
    check_keys(b, bp, {"specs_per_shape", "max_n", "hess_tuples", "hess_max_n"});
    auto integer = [](const Json& x, const std::string& p) { return static_cast<int>(as_integer(x, p)); };
    optional_field(b, bp, "specs_per_shape", c.blockdet.specs_per_shape, integer);
    optional_field(b, bp, "max_n", c.blockdet.max_n, integer);
    optional_field(b, bp, "hess_tuples", c.blockdet.hess_tuples, integer);
    optional_field(b, bp, "hess_max_n", c.blockdet.hess_max_n, integer);
    if (c.blockdet.max_n < 2 || c.blockdet.max_n > 8) fail(join(bp, "max_n"), "must lie in [2, 8]");
    if (c.blockdet.hess_max_n < 2 || c.blockdet.hess_max_n > 6) fail(join(bp, "hess_max_n"), "must lie in [2, 6]");
    if (c.blockdet.specs_per_shape < 1 || c.blockdet.hess_tuples < 1) fail(bp, "counts must be positive");
  }
  if (s.contains("jacobian")) {
    const Json& b = s.at("jacobian");
    check_keys(b, "suites.jacobian", {"dims", "tuples"});
    optional_field(b, "suites.jacobian", "dims", c.jacobian.dims, as_ints);
    optional_field(b, "suites.jacobian", "tuples", c.jacobian.tuples,
                   [](const Json& x, const std::string& p) { return static_cast<int>(as_integer(x, p)); });
    for (int d : c.jacobian.dims)
      if (d < 2 || d > 8) fail("suites.jacobian.dims", "dimensions must lie in [2, 8]");
  }
  if (s.contains("scaling")) {
    const Json& b = s.at("scaling");
    const std::string bp = "suites.scaling";
    check_keys(b, bp, {"phases", "densities", "lambdas"});
    const Json& ph = need(b, bp, "phases");
    if (!ph.is_array() || ph.size() != 2) fail(join(bp, "phases"), "expected two phases");
    for (std::size_t i = 0; i < ph.size(); ++i) {
      const std::string p = index(join(bp, "phases"), i);
      check_keys(ph[i], p, {"height", "x_lo", "x_hi", "x_taper", "xi_lo", "xi_hi"});
      ScalingPhaseSpec sp;
      sp.height = as_string(need(ph[i], p, "height"), join(p, "height"));
      sp.x_lo = as_numbers(need(ph[i], p, "x_lo"), join(p, "x_lo"));
      sp.x_hi = as_numbers(need(ph[i], p, "x_hi"), join(p, "x_hi"));
      optional_field(ph[i], p, "x_taper", sp.x_taper, as_number);
      sp.xi_lo = as_number(need(ph[i], p, "xi_lo"), join(p, "xi_lo"));
      sp.xi_hi = as_number(need(ph[i], p, "xi_hi"), join(p, "xi_hi"));
      if (sp.x_lo.size() != 2 || sp.x_hi.size() != 2) fail(join(p, "x_lo"), "x boxes live in R^2");
      if (sp.xi_hi <= sp.xi_lo) fail(join(p, "xi_hi"), "must exceed xi_lo");
      c.scaling.phases.push_back(std::move(sp));
    }
    c.scaling.densities = as_strings(need(b, bp, "densities"), join(bp, "densities"));
    if (c.scaling.densities.size() != 2) fail(join(bp, "densities"), "expected two densities");
    c.scaling.lambdas = as_numbers(need(b, bp, "lambdas"), join(bp, "lambdas"));
    for (double l : c.scaling.lambdas)
      if (l < 1) fail(join(bp, "lambdas"), "lambda values must be at least 1");
  }

  // Cross references.
  for (std::size_t i = 0; i < c.bilinear.cases.size(); ++i) {
    const std::string p = index("suites.bilinear.cases", i);
    check_phase_names(c, c.bilinear.cases[i].phases, join(p, "phases"));
    check_density_names(c, c.bilinear.cases[i].densities, join(p, "densities"));
  }
  for (std::size_t i = 0; i < c.sigma.cases.size(); ++i) {
    const std::string p = index("suites.sigma.cases", i);
    check_phase_names(c, c.sigma.cases[i].phases, join(p, "phases"));
    check_density_names(c, c.sigma.cases[i].densities, join(p, "densities"));
  }
  for (std::size_t i = 0; i < c.ot.pairs.size(); ++i)
    check_density_names(c, {c.ot.pairs[i].f1, c.ot.pairs[i].f2}, join(index("suites.ot.pairs", i), "f"));
  for (std::size_t i = 0; i < c.scaling.phases.size(); ++i) {
    const std::string p = join(index("suites.scaling.phases", i), "height");
    const auto it = c.phases.find(c.scaling.phases[i].height);
    if (it == c.phases.end()) fail(p, "unknown phase '" + c.scaling.phases[i].height + "'");
    if (it->second.kind == "tabulated" || it->second.dim != 1) fail(p, "scaling heights are one-variable polynomials");
  }
  check_density_names(c, c.scaling.densities, "suites.scaling.densities");
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
  return parse_config(j);
}

Json to_json(const Config& c) {
  Json j;
  j["convention"] = {{"forward_sign", c.convention.forward_sign},
                     {"extension_sign", c.convention.extension_sign},
                     {"frequency_scale", c.convention.frequency_scale}};
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  const auto& t = c.tolerances;
  j["tolerances"] = {{"bilinear", t.bilinear},       {"tail", t.tail},
                     {"sigma", t.sigma},             {"ot", t.ot},
                     {"kakeya_sigmas", t.kakeya_sigmas}, {"kakeya_relative", t.kakeya_relative},
                     {"jacobian", t.jacobian},       {"hess", t.hess},
                     {"scaling_slope", t.scaling_slope}, {"scaling_ratio", t.scaling_ratio}};
  Json ph = Json::object();
  for (const auto& [name, p] : c.phases) ph[name] = phase_json(p);
  j["phases"] = ph;
  Json de = Json::object();
  for (const auto& [name, d] : c.densities) de[name] = density_json(d);
  j["densities"] = de;

  Json s;
  Json cases = Json::array();
  for (const auto& k : c.bilinear.cases) cases.push_back(case_json(k, false));
  s["bilinear"] = {{"cases", cases}, {"r1", c.bilinear.r1}, {"r2", c.bilinear.r2}};
  cases = Json::array();
  for (const auto& k : c.sigma.cases) cases.push_back(case_json(k, false));
  s["sigma"] = {{"cases", cases}, {"sigmas", c.sigma.sigmas}};
  Json pairs = Json::array();
  for (const auto& p : c.ot.pairs) pairs.push_back({{"name", p.name}, {"f1", p.f1}, {"f2", p.f2}});
  s["ot"] = {{"pairs", pairs}};
  const auto& k = c.kakeya;
  Json confs = Json::array();
  for (const auto& kc : k.configurations) {
    Json x{{"name", kc.name}};
    if (kc.random_n > 0) {
      x["random"] = {{"n", kc.random_n}, {"seed", kc.random_seed}};
    } else {
      x["tubes"] = tubes_json(kc.tubes);
    }
    confs.push_back(x);
  }
  Json fams = Json::array();
  for (const auto& f : k.families) fams.push_back(tubes_json(f));
  s["kakeya"] = {{"samples", k.samples},         {"shards", k.shards},       {"z_count", k.z_count},
                 {"z_box", k.z_box},             {"min_wedge", k.min_wedge}, {"configurations", confs},
                 {"families", fams},             {"family_sigmas", k.family_sigmas},
                 {"family_samples", k.family_samples}};
  s["blockdet"] = {{"specs_per_shape", c.blockdet.specs_per_shape},
                   {"max_n", c.blockdet.max_n},
                   {"hess_tuples", c.blockdet.hess_tuples},
                   {"hess_max_n", c.blockdet.hess_max_n}};
  s["jacobian"] = {{"dims", c.jacobian.dims}, {"tuples", c.jacobian.tuples}};
  Json sp = Json::array();
  for (const auto& p : c.scaling.phases)
    sp.push_back({{"height", p.height},
                  {"x_lo", p.x_lo},
                  {"x_hi", p.x_hi},
                  {"x_taper", p.x_taper},
                  {"xi_lo", p.xi_lo},
                  {"xi_hi", p.xi_hi}});
  s["scaling"] = {{"phases", sp}, {"densities", c.scaling.densities}, {"lambdas", c.scaling.lambdas}};
  j["suites"] = s;
  return j;
}

namespace {

PhaseSpec tabulated_spec(std::string sample, Terms terms = {}) {
  PhaseSpec p;
  p.kind = "tabulated";
  p.lo = -3.0;
  p.hi = 3.0;
  p.step = 1.0 / 64;
  p.sample = std::move(sample);
  p.sample_terms = std::move(terms);
  return p;
}

DensitySpec gaussian_spec(double center, double stddev, double amplitude = 1.0, std::vector<double> modulation = {}) {
  DensitySpec d;
  d.kind = "gaussian";
  d.center = {center};
  d.stddev = stddev;
  d.amplitude = amplitude;
  d.modulation = std::move(modulation);
  return d;
}

DensitySpec bump_spec(double center, double radius) {
  DensitySpec d;
  d.kind = "bump";
  d.center = {center};
  d.radius = radius;
  return d;
}

TubeSpec tube_spec(std::vector<double> direction, std::vector<double> offset, double coefficient = 1.0) {
  TubeSpec t;
  t.direction = std::move(direction);
  t.offset = std::move(offset);
  t.coefficient = coefficient;
  return t;
}

}  // namespace

Config default_config() {
  Config c;
  PhaseSpec parabola;
  parabola.kind = "paraboloid";
  c.phases["parabola"] = parabola;
  c.phases["quartic"] = tabulated_spec("polynomial", {{{2}, 1.0}, {{4}, 0.25}});
  c.phases["cosh"] = tabulated_spec("cosh");

  const double amp = std::pow(std::numbers::pi, -0.25);
  c.densities["g_plus"] = gaussian_spec(1.0, 1.0 / 16);
  c.densities["g_minus"] = gaussian_spec(-1.0, 1.0 / 16);
  c.densities["ot_gaussian"] = gaussian_spec(0.0, 1.0, amp);
  c.densities["ot_modulated"] = gaussian_spec(0.0, 1.0, amp, {5.0});
  c.densities["bump_plus"] = bump_spec(1.5, 1.0);
  c.densities["bump_minus"] = bump_spec(-1.5, 1.0);

  c.bilinear.cases = {{"parabola-pair", {"parabola", "parabola"}, {"g_plus", "g_minus"}},
                      {"tabulated-pair", {"quartic", "cosh"}, {"g_plus", "g_minus"}}};
  c.sigma.cases = c.bilinear.cases;
  c.sigma.sigmas = {0.0, 0.25, 0.5};
  c.ot.pairs = {{"gaussian-pair", "ot_gaussian", "ot_gaussian"}, {"modulated-pair", "ot_gaussian", "ot_modulated"}};

  auto strip = [](double deg, std::vector<double> offset) {
    const double a = deg * std::numbers::pi / 180;
    return tube_spec({std::cos(a), std::sin(a)}, std::move(offset));
  };
  auto axes = [](int n) {
    std::vector<TubeSpec> t;
    for (int a = 0; a < n; ++a) {
      std::vector<double> e(n, 0.0);
      e[a] = 1.0;
      t.push_back(tube_spec(e, std::vector<double>(n, 0.0)));
    }
    return t;
  };
  auto& k = c.kakeya;
  k.configurations = {{"plane-30deg", {strip(0, {0.0, 0.0}), strip(30, {0.3, -0.2})}},
                      {"plane-60deg", {strip(0, {0.0, 0.0}), strip(60, {0.3, -0.2})}},
                      {"plane-85deg", {strip(0, {0.0, 0.0}), strip(85, {0.3, -0.2})}},
                      {"space-orthogonal", axes(3)},
                      {"space-random-a", {}, 3, 11},
                      {"space-random-b", {}, 3, 12},
                      {"four-orthogonal", axes(4)}};
  k.families = {{tube_spec({1.0, 0.0}, {0.0, 0.0}, 0.5), tube_spec({1.0, 0.4}, {0.0, 1.0}, 2.0)},
                {tube_spec({0.2, 1.0}, {1.0, 0.0}, 1.0), tube_spec({-0.5, 1.0}, {0.0, 0.0}, 0.75)}};
  k.family_sigmas = {0.0, 0.5};

  c.scaling.phases = {{"parabola", {-1.5, -1.5}, {1.5, 1.5}, 0.5, 0.5, 2.5},
                      {"parabola", {-1.5, -1.5}, {1.5, 1.5}, 0.5, -2.5, -0.5}};
  c.scaling.densities = {"bump_plus", "bump_minus"};
  c.scaling.lambdas = {16, 32, 64, 128, 256};
  return c;
}

phases::PhaseFunction build_phase(const Config& c, const std::string& name) {
  const auto it = c.phases.find(name);
  require(it != c.phases.end(), ErrorCode::kConfig, "unknown phase '" + name + "'");
  const PhaseSpec& p = it->second;
  if (p.kind == "paraboloid") return phases::PhaseFunction::paraboloid(p.dim);
  if (p.kind == "polynomial") return phases::PhaseFunction::polynomial(polynomial_of(p.dim, p.terms));
  std::vector<double> values = p.values;
  if (!p.sample.empty()) {
    const int count = static_cast<int>(std::lround((p.hi - p.lo) / p.step)) + 1;
    const auto poly = polynomial_of(1, p.sample_terms);
    for (int i = 0; i < count; ++i) {
      const double x = p.lo + i * p.step;
      values.push_back(p.sample == "cosh" ? std::cosh(x) : poly.value(std::span<const double>(&x, 1)));
    }
  }
  return phases::PhaseFunction::tabulated(p.lo, p.step, std::move(values));
}

phases::Density build_density(const Config& c, const std::string& name) {
  const auto it = c.densities.find(name);
  require(it != c.densities.end(), ErrorCode::kConfig, "unknown density '" + name + "'");
  const DensitySpec& d = it->second;
  auto make = [&]() -> phases::Density {
    if (d.kind == "gaussian") return phases::Density::gaussian(d.center, d.stddev, d.amplitude, d.truncation);
    if (d.kind == "bump") return phases::Density::bump(d.center, d.radius);
    if (d.kind == "indicator") return phases::Density::indicator(phases::Box{d.lo, d.hi});
    if (d.kind == "zero") return phases::Density::zero(d.dim);
    phases::SampleGrid g;
    g.box = phases::Box{d.lo, d.hi};
    g.shape = d.shape;
    for (const auto& [re, im] : d.values) g.values.emplace_back(re, im);
    return phases::Density::sampled(std::move(g));
  };
  phases::Density out = make();
  if (!d.modulation.empty()) out = out.modulated(d.modulation);
  return out;
}

kakeya::Tube build_tube(const TubeSpec& t) {
  const int m = static_cast<int>(t.direction.size()) - 1;
  kakeya::CrossSection cs = t.cross_section == "ball"   ? kakeya::CrossSection::unit_ball(m)
                            : t.sides.empty()           ? kakeya::CrossSection::unit_box(m)
                                                        : kakeya::CrossSection::box(t.sides);
  return kakeya::Tube::along(t.direction, std::move(cs), t.offset);
}

}  // namespace mlid::cli
