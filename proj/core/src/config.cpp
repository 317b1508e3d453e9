#include "exradon/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace exradon {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Spec-string parsing: ident(args) segments piped with '|'; args are numbers,
// bare words, or bracketed lists.

struct SpecValue {
  enum class Kind { Number, Word, List } kind = Kind::Number;
  double num = 0.0;
  std::string word;
  std::vector<SpecValue> list;
};

struct SpecCall {
  std::string name;
  std::vector<SpecValue> args;
};

class SpecParser {
 public:
  explicit SpecParser(const std::string& text) : s_(text) {}

  std::vector<SpecCall> parse_pipeline() {
    std::vector<SpecCall> calls;
    calls.push_back(parse_call());
    skip_ws();
    while (peek() == '|') {
      ++pos_;
      calls.push_back(parse_call());
      skip_ws();
    }
    if (pos_ != s_.size()) fail("trailing characters");
    return calls;
  }

 private:
  SpecCall parse_call() {
    SpecCall c;
    skip_ws();
    c.name = parse_ident();
    skip_ws();
    if (peek() == '(') {
      ++pos_;
      skip_ws();
      if (peek() != ')') {
        c.args.push_back(parse_value());
        skip_ws();
        while (peek() == ',') {
          ++pos_;
          c.args.push_back(parse_value());
          skip_ws();
        }
      }
      expect(')');
    }
    return c;
  }

  SpecValue parse_value() {
    skip_ws();
    SpecValue v;
    const char c = peek();
    if (c == '[') {
      ++pos_;
      v.kind = SpecValue::Kind::List;
      skip_ws();
      if (peek() != ']') {
        v.list.push_back(parse_value());
        skip_ws();
        while (peek() == ',') {
          ++pos_;
          v.list.push_back(parse_value());
          skip_ws();
        }
      }
      expect(']');
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      v.kind = SpecValue::Kind::Word;
      v.word = parse_ident();
      return v;
    }
    v.kind = SpecValue::Kind::Number;
    size_t used = 0;
    try {
      v.num = std::stod(s_.substr(pos_), &used);
    } catch (...) {
      fail("expected a number");
    }
    pos_ += used;
    return v;
  }

  std::string parse_ident() {
    skip_ws();
    const size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("expected an identifier");
    return s_.substr(start, pos_ - start);
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    raise(Errc::ConfigInvalid, "spec \"" + s_ + "\": " + why + " at offset " +
                                   std::to_string(pos_));
  }

  std::string s_;
  size_t pos_ = 0;
};

double want_number(const SpecCall& c, size_t i) {
  if (i >= c.args.size() || c.args[i].kind != SpecValue::Kind::Number)
    raise(Errc::ConfigInvalid, c.name + ": argument " + std::to_string(i + 1) + " must be a number");
  return c.args[i].num;
}

std::string want_word(const SpecCall& c, size_t i) {
  if (i >= c.args.size() || c.args[i].kind != SpecValue::Kind::Word)
    raise(Errc::ConfigInvalid, c.name + ": argument " + std::to_string(i + 1) + " must be a word");
  return c.args[i].word;
}

std::vector<double> want_number_list(const SpecValue& v, const std::string& ctx) {
  if (v.kind != SpecValue::Kind::List)
    raise(Errc::ConfigInvalid, ctx + ": expected a bracketed list");
  std::vector<double> out;
  for (const auto& e : v.list) {
    if (e.kind != SpecValue::Kind::Number) raise(Errc::ConfigInvalid, ctx + ": expected numbers");
    out.push_back(e.num);
  }
  return out;
}

double deg2rad(double d) { return d * kPi / 180.0; }

}  // namespace

FieldPtr parse_field_spec(const std::string& spec) {
  const auto calls = SpecParser(spec).parse_pipeline();
  FieldPtr field;
  const SpecCall& base = calls.front();
  if (base.name == "zero") {
    field = make_zero();
  } else if (base.name == "gaussian") {
    field = make_gaussian(base.args.empty() ? 1.0 : want_number(base, 0));
  } else if (base.name == "stretched") {
    const double beta = want_number(base, 0);
    const std::string part = base.args.size() > 1 ? want_word(base, 1) : "re";
    if (part != "re" && part != "im")
      raise(Errc::ConfigInvalid, "stretched part must be re or im");
    field = stretched_exp_field(beta, part == "re" ? ComplexPart::Re : ComplexPart::Im);
  } else if (base.name == "condition_e") {
    field = make_condition_e(Direction(deg2rad(base.args.empty() ? 0.0 : want_number(base, 0))));
  } else {
    raise(Errc::ConfigInvalid, "unknown field kind: " + base.name);
  }

  for (size_t i = 1; i < calls.size(); ++i) {
    const SpecCall& mod = calls[i];
    if (mod.name == "transport") {
      if (mod.args.size() != 2)
        raise(Errc::ConfigInvalid, "transport needs (matrix, translation)");
      if (mod.args[0].kind != SpecValue::Kind::List || mod.args[0].list.size() != 2)
        raise(Errc::ConfigInvalid, "transport matrix must be [[a,b],[c,d]]");
      const auto r0 = want_number_list(mod.args[0].list[0], "transport matrix row");
      const auto r1 = want_number_list(mod.args[0].list[1], "transport matrix row");
      const auto tr = want_number_list(mod.args[1], "transport translation");
      if (r0.size() != 2 || r1.size() != 2 || tr.size() != 2)
        raise(Errc::ConfigInvalid, "transport expects 2x2 matrix and 2-vector");
      field = transport_affine(field, AffineMap::make(Mat2{r0[0], r0[1], r1[0], r1[1]},
                                                       Vec2{tr[0], tr[1]}));
    } else if (mod.name == "mollify") {
      field = mollify(field, want_number(mod, 0));
    } else {
      raise(Errc::ConfigInvalid, "unknown field modifier: " + mod.name);
    }
  }
  return field;
}

std::optional<ConvexRegion> parse_region_spec(const std::string& spec) {
  const auto calls = SpecParser(spec).parse_pipeline();
  if (calls.size() != 1) raise(Errc::ConfigInvalid, "region spec cannot be a pipeline");
  const SpecCall& c = calls.front();
  if (c.name == "none" || c.name == "empty") return std::nullopt;
  if (c.name == "quadrant") return ConvexRegion::quadrant();
  if (c.name == "wedge")
    return ConvexRegion::wedge(deg2rad(want_number(c, 0)), deg2rad(want_number(c, 1)));
  if (c.name == "halfstrip") return ConvexRegion::halfstrip(want_number(c, 0));
  if (c.name == "polyhedral") {
    std::vector<HalfPlane> hps;
    for (const auto& arg : c.args) {
      const auto pair = want_number_list(arg, "polyhedral");
      if (pair.size() != 2)
        raise(Errc::ConfigInvalid, "polyhedral expects [normal_deg, offset] pairs");
      const double a = deg2rad(pair[0]);
      hps.emplace_back(Vec2{std::cos(a), std::sin(a)}, pair[1]);
    }
    if (hps.empty()) raise(Errc::ConfigInvalid, "polyhedral needs at least one half-plane");
    return ConvexRegion::from_halfplanes(std::move(hps));
  }
  raise(Errc::ConfigInvalid, "unknown region preset: " + c.name);
}

namespace {

class Validator {
 public:
  void require(bool ok, const std::string& msg) {
    if (!ok) problems_.push_back(msg);
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
      problems_.push_back(path + " must be an object");
      return;
    }
    for (const auto& [key, _] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) problems_.push_back("unknown key " + path + "." + key);
    }
  }

  void finish() const {
    if (problems_.empty()) return;
    std::ostringstream msg;
    msg << "invalid config (" << problems_.size() << " problem(s)):";
    for (const auto& p : problems_) msg << "\n  - " << p;
    raise(Errc::ConfigInvalid, msg.str());
  }

 private:
  std::vector<std::string> problems_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    raise(Errc::ConfigInvalid, std::string("config parse error: ") + e.what());
  }

  ExperimentConfig cfg;
  Validator v;
  v.check_keys(doc, "config",
               {"command", "field", "region", "grid", "lambda", "quadrature", "recursion",
                "laplace", "helgason", "probe", "mollify_radius", "include_hole_cells",
                "tolerances", "output_dir", "seed"});
  v.finish();

  auto get = [&](const json& obj, const char* key, auto fallback) {
    using T = decltype(fallback);
    if (!obj.contains(key)) return fallback;
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception&) {
      raise(Errc::ConfigInvalid, std::string("bad type for key: ") + key);
    }
  };

  cfg.command = get(doc, "command", std::string{});
  cfg.field = get(doc, "field", cfg.field);
  cfg.region = get(doc, "region", cfg.region);
  cfg.lambda = get(doc, "lambda", cfg.lambda);
  cfg.mollify_radius = get(doc, "mollify_radius", cfg.mollify_radius);
  cfg.include_hole_cells = get(doc, "include_hole_cells", cfg.include_hole_cells);
  cfg.output_dir = get(doc, "output_dir", cfg.output_dir);
  cfg.seed = get(doc, "seed", cfg.seed);

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    v.check_keys(g, "grid",
                 {"theta_start_deg", "theta_count", "theta_step_deg", "p_start", "p_count",
                  "p_step"});
    v.finish();
    cfg.grid.theta_start_deg = get(g, "theta_start_deg", cfg.grid.theta_start_deg);
    cfg.grid.theta_count = get(g, "theta_count", cfg.grid.theta_count);
    cfg.grid.theta_step_deg = get(g, "theta_step_deg", cfg.grid.theta_step_deg);
    cfg.grid.p_start = get(g, "p_start", cfg.grid.p_start);
    cfg.grid.p_count = get(g, "p_count", cfg.grid.p_count);
    cfg.grid.p_step = get(g, "p_step", cfg.grid.p_step);
  }
  if (doc.contains("quadrature")) {
    const json& q = doc["quadrature"];
    v.check_keys(q, "quadrature",
                 {"rule", "abs_tol", "rel_tol", "truncation_threshold", "max_halfwidth",
                  "max_panels"});
    v.finish();
    cfg.quad.rule = get(q, "rule", cfg.quad.rule);
    cfg.quad.abs_tol = get(q, "abs_tol", cfg.quad.abs_tol);
    cfg.quad.rel_tol = get(q, "rel_tol", cfg.quad.rel_tol);
    cfg.quad.truncation_threshold = get(q, "truncation_threshold", cfg.quad.truncation_threshold);
    cfg.quad.max_halfwidth = get(q, "max_halfwidth", cfg.quad.max_halfwidth);
    cfg.quad.max_panels = get(q, "max_panels", cfg.quad.max_panels);
    cfg.quad_overridden = true;
  }
  if (doc.contains("recursion")) {
    const json& r = doc["recursion"];
    v.check_keys(r, "recursion", {"k_max", "fd_order", "anchors"});
    v.finish();
    cfg.recursion.k_max = get(r, "k_max", cfg.recursion.k_max);
    cfg.recursion.fd_order = get(r, "fd_order", cfg.recursion.fd_order);
    if (r.contains("anchors")) {
      for (const json& a : r["anchors"]) {
        v.check_keys(a, "recursion.anchors[]", {"k", "q", "value"});
        v.finish();
        cfg.anchors.push_back({get(a, "k", 0), get(a, "q", 0.0), get(a, "value", 0.0)});
      }
    }
  }
  if (doc.contains("laplace")) {
    const json& l = doc["laplace"];
    v.check_keys(l, "laplace", {"profile", "s_values", "N_values", "n_max", "vanish_tol"});
    v.finish();
    cfg.laplace.profile = get(l, "profile", cfg.laplace.profile);
    cfg.laplace.s_values = get(l, "s_values", cfg.laplace.s_values);
    cfg.laplace.N_values = get(l, "N_values", cfg.laplace.N_values);
    cfg.laplace.n_max = get(l, "n_max", cfg.laplace.n_max);
    cfg.laplace.vanish_tol = get(l, "vanish_tol", cfg.laplace.vanish_tol);
  }
  if (doc.contains("helgason")) {
    const json& h = doc["helgason"];
    v.check_keys(h, "helgason", {"k_max", "p_window"});
    v.finish();
    cfg.helgason_k_max = get(h, "k_max", cfg.helgason_k_max);
    if (h.contains("p_window")) {
      const auto w = h["p_window"].get<std::vector<double>>();
      if (w.size() == 2) {
        cfg.helgason_p_window = {w[0], w[1]};
      } else {
        v.require(false, "helgason.p_window must be [lo, hi]");
      }
    }
  }
  if (doc.contains("probe")) {
    const json& p = doc["probe"];
    v.check_keys(p, "probe",
                 {"theta0_deg", "half_width_deg", "p0", "mu", "k_max", "p_samples", "expect"});
    v.finish();
    cfg.probe.theta0_deg = get(p, "theta0_deg", cfg.probe.theta0_deg);
    cfg.probe.half_width_deg = get(p, "half_width_deg", cfg.probe.half_width_deg);
    cfg.probe.p0 = get(p, "p0", cfg.probe.p0);
    cfg.probe.mu = get(p, "mu", cfg.probe.mu);
    cfg.probe.k_max = get(p, "k_max", cfg.probe.k_max);
    cfg.probe.p_samples = get(p, "p_samples", cfg.probe.p_samples);
    if (p.contains("expect")) {
      const json& e = p["expect"];
      v.check_keys(e, "probe.expect", {"b", "c", "d", "e"});
      v.finish();
      cfg.probe.expect_b = get(e, "b", true);
      cfg.probe.expect_c = get(e, "c", true);
      cfg.probe.expect_d = get(e, "d", true);
      cfg.probe.expect_e = get(e, "e", true);
    }
  }
  if (doc.contains("tolerances")) {
    for (const auto& [key, val] : doc["tolerances"].items()) {
      if (!val.is_number()) {
        v.require(false, "tolerances." + key + " must be a number");
      } else {
        cfg.tolerances[key] = val.get<double>();
      }
    }
  }

  static const std::vector<std::string> kCommands{
      "forward", "counterexample", "recover", "convolution", "laplace", "helgason", "probe"};
  v.require(cfg.command.empty() ||
                std::find(kCommands.begin(), kCommands.end(), cfg.command) != kCommands.end(),
            "unknown command: " + cfg.command);
  v.require(cfg.grid.theta_count >= 1, "grid.theta_count must be >= 1");
  v.require(cfg.grid.p_count >= 1, "grid.p_count must be >= 1");
  v.require(cfg.grid.theta_step_deg > 0.0, "grid.theta_step_deg must be positive");
  v.require(cfg.grid.p_step > 0.0, "grid.p_step must be positive");
  v.require(cfg.quad.abs_tol > 0.0 && cfg.quad.rel_tol > 0.0,
            "quadrature tolerances must be positive");
  v.require(cfg.quad.truncation_threshold > 0.0, "quadrature.truncation_threshold must be positive");
  v.require(cfg.quad.max_halfwidth > 0.0, "quadrature.max_halfwidth must be positive");
  v.require(cfg.recursion.fd_order == 2 || cfg.recursion.fd_order == 4,
            "recursion.fd_order must be 2 or 4");
  v.require(cfg.recursion.k_max >= 0, "recursion.k_max must be >= 0");
  v.require(cfg.mollify_radius > 0.0, "mollify_radius must be positive");
  v.require(cfg.probe.p0 > 0.0, "probe.p0 must be positive");
  v.finish();

  // Specs must resolve; surface their diagnostics as config problems.
  parse_field_spec(cfg.field);
  parse_region_spec(cfg.region);

  if (cfg.command == "counterexample") {
    const auto problems = counterexample_setup_problems(cfg);
    for (const auto& p : problems) v.require(false, p);
    v.finish();
  }
  return cfg;
}

std::vector<std::string> counterexample_setup_problems(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  const auto calls = SpecParser(cfg.field).parse_pipeline();
  if (calls.front().name != "stretched") {
    out.push_back("counterexample requires a stretched field");
    return out;
  }
  const double beta = calls.front().args.empty() ? 0.0 : calls.front().args[0].num;
  if (beta <= 0.0 || beta >= 1.0) {
    out.push_back("stretched exponent must lie in (0, 1)");
    return out;
  }
  if (cfg.lambda != 0.0)
    out.push_back("the vanishing construction holds for the classical transform (lambda = 0)");

  const auto region = parse_region_spec(cfg.region);
  if (!region) {
    out.push_back("counterexample requires a hole region");
    return out;
  }
  // The hole must cover the directions where the field fails to decay:
  // everything outside the cone |arg z| < pi/(2 beta), and the branch cut.
  const double cone = stretched_valid_cone_half_angle(beta);
  auto contained = [&](double phi) {
    for (double r : {1.0, 1e3, 1e6}) {
      const Vec2 x{r * std::cos(phi), r * std::sin(phi)};
      for (const auto& hp : region->halfplanes()) {
        if (hp.signed_violation(x) > 1e-7 * r) return false;
      }
    }
    return true;
  };
  if (!contained(kPi)) out.push_back("hole must contain the negative real axis (branch cut)");
  if (cone < kPi) {
    const int n = 32;
    for (int i = 0; i <= n; ++i) {
      const double phi = cone + (kPi - cone) * i / n;
      if (!contained(phi) || !contained(-phi)) {
        out.push_back("hole does not cover the non-decaying directions beyond the valid cone");
        break;
      }
    }
  }
  return out;
}

}  // namespace exradon
