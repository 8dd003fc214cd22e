#include "commands.hpp"

#include "hypshadow/error.hpp"
#include "hypshadow/sampling.hpp"
#include "hypshadow/shadow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace hypshadow {

using nlohmann::json;

namespace {

struct Input {
  PolyFile file;
  bool cone = false;
  RVector e;

  std::size_t n() const { return file.poly.nvars(); }
  std::string show(const Polynomial& p) const { return format(p, file.vars); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(data.data(), static_cast<std::streamsize>(data.size())))
    throw IoError("cannot write " + path);
}

std::string required(const json& req, const char* key) {
  if (!req.contains(key) || !req[key].is_string()) throw UsageError(std::string("missing option --") + key);
  return req[key].get<std::string>();
}

RVector point_option(const json& req, const char* key, std::size_t n) {
  RVector p = parse_point(required(req, key));
  require_dims(p.size(), n, key);
  return p;
}

Input load_input(const json& req) {
  Input in;
  in.file = parse_poly_file(required(req, "poly"));
  const std::string mode = req.value("mode", "auto");
  if (mode == "cone") {
    in.cone = true;
  } else if (mode == "rz") {
    in.cone = false;
  } else if (mode == "auto") {
    in.cone = in.file.poly.is_homogeneous() && in.file.poly.degree() >= 1;
  } else {
    throw UsageError("--mode must be auto, cone or rz");
  }
  in.e = point_option(req, "e", in.n());
  return in;
}

json header(const std::string& command, const Input& in) {
  return {{"schema", 1},
          {"command", command},
          {"polynomial", in.show(in.file.poly)},
          {"vars", in.file.vars},
          {"mode", in.cone ? "cone" : "rz"},
          {"e", format_point(in.e)}};
}

json matrix_json(const RMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(format_point(m.row(i)));
  return rows;
}

json verdict_json(const MembershipVerdict& v) {
  const RootCountCertificate& c = v.roots;
  return {{"status", to_string(v.status)},
          {"multiplicity", v.multiplicity},
          {"restricted", v.restricted.to_string("t")},
          {"distinct_real_roots", c.distinct_real_roots},
          {"degree", c.total_degree}};
}

RZInstance rz_instance(const Input& in) {
  return RZInstance(in.file.poly, in.e, in.file.factors);
}

MembershipVerdict membership_of(const Input& in, std::span<const Rational> a) {
  if (in.cone) return cone_membership(HyperbolicInstance(in.file.poly, in.e), a);
  return rz_membership(rz_instance(in), a);
}

std::uint64_t seed_of(const json& req) { return req.value("seed", std::uint64_t{0}); }

json cmd_check_hyperbolic(const json& req) {
  const Input in = load_input(req);
  const std::size_t samples = req.value("samples", std::size_t{1000});
  const std::uint64_t seed = seed_of(req);
  const SampledReport r = in.cone ? is_hyperbolic_sampled(HyperbolicInstance(in.file.poly, in.e), samples, seed)
                                  : is_real_zero_sampled(rz_instance(in), samples, seed);
  json out = header("check-hyperbolic", in);
  json failures = json::array();
  for (std::size_t i = 0; i < r.failures.size() && i < 10; ++i) failures.push_back(format_point(r.failures[i]));
  out["samples"] = r.samples;
  out["seed"] = seed;
  out["passed"] = r.passed();
  out["failure_count"] = r.failures.size();
  out["failures"] = failures;
  return out;
}

json cmd_member(const json& req) {
  const Input in = load_input(req);
  const RVector a = point_option(req, "a", in.n());
  json out = header("member", in);
  out["a"] = format_point(a);
  out.update(verdict_json(membership_of(in, a)));
  return out;
}

json cmd_mult(const json& req) {
  const Input in = load_input(req);
  const RVector a = point_option(req, "a", in.n());
  json out = header("mult", in);
  out["a"] = format_point(a);
  if (in.cone) {
    const HyperbolicInstance inst(in.file.poly, in.e);
    const RVector f = req.contains("f") ? point_option(req, "f", in.n()) : in.e;
    const int m = multiplicity(inst, a, f);
    out["f"] = format_point(f);
    out["multiplicity"] = m;
    // lowest nonzero homogeneous part of h around a
    const HomogeneousParts parts = homogeneous_parts(in.file.poly, a);
    out["lowest_homogeneous_degree"] = parts.multiplicity();
  } else {
    const MembershipVerdict v = rz_membership(rz_instance(in), a);
    if (v.status == MembershipStatus::not_real_rooted) throw DomainError("mult: restriction is not real-rooted");
    if (v.status == MembershipStatus::outside) throw DomainError("mult: a lies outside S_e(p)");
    out["status"] = to_string(v.status);
    out["multiplicity"] = v.multiplicity;
    // the same order through the homogenization at (1, a)
    const Polynomial h = homogenize(in.file.poly, in.file.poly.degree());
    RVector lifted{1}, e1{1};
    lifted.insert(lifted.end(), a.begin(), a.end());
    e1.insert(e1.end(), in.e.begin(), in.e.end());
    out["cone_multiplicity"] = multiplicity(HyperbolicInstance(h, e1), lifted, e1);
  }
  return out;
}

json cmd_qc(const json& req) {
  const Input in = load_input(req);
  const RVector a = point_option(req, "a", in.n());
  const QCVerdict v = strict_quasiconcavity(in.file.poly, a, req.value("tol", 1e-9));
  json out = header("qc", in);
  out["a"] = format_point(a);
  out["status"] = to_string(v.status);
  out["gradient"] = format_point(v.gradient);
  out["hessian"] = matrix_json(v.hessian);
  json comp = json::array();
  for (const auto& c : v.complement) comp.push_back(format_point(c));
  out["complement"] = comp;
  out["restricted"] = matrix_json(v.restricted);
  out["projected_spectrum"] = v.projected_spectrum;
  out["float_strict"] = v.float_strict;
  if (v.status != QCStatus::strict) {
    // recheck the witness from scratch
    const Derivatives d = derivatives(in.file.poly, a);
    Rational value = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.size(); ++j) value += v.witness[i] * d.hessian(i, j) * v.witness[j];
    const bool orthogonal = dot(v.witness, d.gradient) == 0;
    out["witness"] = format_point(v.witness);
    out["witness_value"] = to_string(v.witness_value);
    out["recheck"] = {{"orthogonal", orthogonal},
                      {"value", to_string(value)},
                      {"certified", orthogonal && value == v.witness_value && !is_zero(v.witness) &&
                                        (v.status == QCStatus::degenerate ? value == 0 : value > 0)}};
    out["line_vanishes"] = line_vanishing_check(in.file.poly, a, v.witness);
  }
  return out;
}

json cmd_smooth(const json& req) {
  const Input in = load_input(req);
  if (!in.cone) throw DomainError("smooth: the polynomial must be homogeneous");
  const HyperbolicInstance inst(in.file.poly, in.e);
  const Polynomial ell = parse_polynomial(required(req, "ell"), in.file.vars);
  std::vector<RVector> watch;
  if (req.contains("watch"))
    for (const auto& w : req["watch"]) {
      watch.push_back(parse_point(w.get<std::string>()));
      require_dims(watch.back().size(), in.n(), "watch");
    }
  NuijOptions opts;
  opts.samples = req.value("samples", std::size_t{1000});
  opts.seed = seed_of(req);
  json out = header("smooth", in);
  out["ell"] = in.show(ell);
  out["samples"] = opts.samples;
  out["seed"] = opts.seed;
  auto step_json = [&](const NuijResult& r) {
    json w = json::array();
    for (const auto& x : r.watch)
      w.push_back({{"point", format_point(x.point)},
                   {"on_hypersurface", x.on_hypersurface},
                   {"ell_vanishes", x.ell_vanishes},
                   {"before", x.before},
                   {"after", x.after},
                   {"drop_ok", x.drop_ok}});
    return json{{"eps", to_string(r.eps)}, {"exponent", r.exponent}, {"polynomial", in.show(r.h)}, {"watch", w}};
  };
  const int iterations = req.value("iterate", 0);
  if (iterations <= 0) {
    out.update(step_json(nuij_smooth(inst, ell, watch, opts)));
    return out;
  }
  const NuijIteration it = nuij_iterate(inst, ell, watch, opts, iterations, req.value("boundary_samples", std::size_t{200}));
  json steps = json::array();
  for (const auto& s : it.steps) steps.push_back(step_json(s));
  out["steps"] = steps;
  out["polynomial_final"] = in.show(it.h);
  out["max_sampled_multiplicity"] = it.max_sampled_multiplicity;
  return out;
}

json cmd_build_shadow(const json& req) {
  const Input in = load_input(req);
  ConeShadowOptions opts;
  opts.order = req.value("order", 0);
  opts.directions = req.value("directions", std::size_t{0});
  opts.seed = seed_of(req);
  json out = header("build-shadow", in);
  ShadowRep shadow;
  if (in.cone) {
    ConeShadow cs = build_cone_shadow(HyperbolicInstance(in.file.poly, in.e), opts);
    out["report"] = std::move(cs.report);
    shadow = std::move(cs.shadow);
  } else {
    // S_e(p) is the slice x0 = 1 of the cone of the homogenization
    const Polynomial h = homogenize(in.file.poly, in.file.poly.degree());
    RVector e1{1};
    e1.insert(e1.end(), in.e.begin(), in.e.end());
    ConeShadow cs = build_cone_shadow(HyperbolicInstance(h, e1), opts);
    out["report"] = std::move(cs.report);
    shadow = fix_coordinate(cs.shadow, 0, 1);
  }
  out["shadow"] = {{"ambient", shadow.ambient},
                   {"lifted", shadow.lifted},
                   {"pencils", shadow.pencils.size()},
                   {"equalities", shadow.equalities.size()}};
  if (req.contains("shadow_out")) {
    const std::string path = req["shadow_out"].get<std::string>();
    write_file(path, to_json(shadow).dump() + "\n");
    out["shadow_path"] = path;
  }
  return out;
}

// Normalized signed distance to the boundary along the ray used by membership:
// > 0 inside, < 0 outside, NaN when the restriction is not real-rooted.
double oracle_depth(const Input& in, std::span<const Rational> x) {
  if (in.cone) {
    const UniPoly q = line_restriction(in.file.poly, x, sub(RVector(in.e.size()), in.e));
    if (!is_real_rooted(q)) return std::nan("");
    const auto roots = numeric_roots(q, 1e-12);
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto& r : roots) lmin = std::min(lmin, r.value);
    double nx = 0, ne = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      nx += x[i].get_d() * x[i].get_d();
      ne += in.e[i].get_d() * in.e[i].get_d();
    }
    if (nx == 0) return 0;
    return lmin * std::sqrt(ne / nx);
  }
  const UniPoly q = line_restriction(in.file.poly, in.e, sub(x, in.e));
  if (!is_real_rooted(q)) return std::nan("");
  double first = std::numeric_limits<double>::infinity();
  for (const auto& r : numeric_roots(q, 1e-12))
    if (r.value >= 0) first = std::min(first, r.value);
  if (!std::isfinite(first)) return 1;
  return (first - 1) / std::max(first, 1.0);
}

json cmd_verify_shadow(const json& req) {
  const ShadowRep shadow = shadow_from_json(json::parse(read_file(required(req, "shadow"))));
  const PreparedShadow prep(shadow);
  const double tol = req.value("tol", 1e-5);
  json out = {{"schema", 1}, {"command", "verify-shadow"}, {"ambient", shadow.ambient}, {"tol", tol}};
  std::optional<Input> in;
  if (req.contains("poly")) {
    in = load_input(req);
    require_dims(in->n(), shadow.ambient, "verify-shadow: polynomial variables");
    out["polynomial"] = in->show(in->file.poly);
    out["mode"] = in->cone ? "cone" : "rz";
  }

  json points = json::array();
  auto check = [&](const RVector& x) {
    const MembershipResult r = prep.membership(to_doubles(x), tol);
    json p = {{"point", format_point(x)}, {"verdict", to_string(r.verdict)}, {"slack", r.slack}};
    if (r.verdict == ShadowVerdict::inconclusive) p["diagnostics"] = r.diagnostics;
    return std::pair<json, ShadowVerdict>(p, r.verdict);
  };
  if (req.contains("points"))
    for (const auto& s : req["points"]) {
      const RVector x = parse_point(s.get<std::string>());
      require_dims(x.size(), shadow.ambient, "verify-shadow: point");
      json p = check(x).first;
      if (in) p["oracle"] = to_string(membership_of(*in, x).status);
      points.push_back(std::move(p));
    }
  out["points"] = points;

  const std::size_t probes = req.value("probes", in ? std::size_t{200} : std::size_t{0});
  if (probes > 0) {
    if (!in) throw UsageError("verify-shadow: --probes needs --poly and --e as the oracle");
    const double margin = req.value("margin", 0.01);
    const double radius = req.value("radius", 1.5);
    const std::uint64_t seed = seed_of(req);
    std::size_t agree = 0, skipped = 0, inconclusive = 0, tried = 0;
    json disagreements = json::array();
    for (std::uint64_t i = 0; agree + disagreements.size() + inconclusive < probes && tried < 50 * probes; ++i, ++tried) {
      std::vector<double> g = gaussian_direction(shadow.ambient, seed, i);
      if (!in->cone) {
        const double r = radius * uniform01(seed, ~i);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] = in->e[k].get_d() + r * g[k];
      }
      const RVector x = round_dyadic(g, 20);
      const double depth = oracle_depth(*in, x);
      if (std::isnan(depth) || std::abs(depth) < margin) {
        ++skipped;
        continue;
      }
      auto [p, v] = check(x);
      const ShadowVerdict want = depth > 0 ? ShadowVerdict::member : ShadowVerdict::non_member;
      if (v == ShadowVerdict::inconclusive) {
        ++inconclusive;
      } else if (v == want) {
        ++agree;
      } else {
        p["depth"] = depth;
        disagreements.push_back(std::move(p));
      }
    }
    out["probes"] = {{"requested", probes},
                     {"seed", seed},
                     {"margin", margin},
                     {"agree", agree},
                     {"disagree", disagreements.size()},
                     {"inconclusive", inconclusive},
                     {"skipped_near_boundary", skipped},
                     {"disagreements", disagreements}};
  }
  return out;
}

struct Rgb {
  unsigned char r, g, b;
  bool operator==(const Rgb&) const = default;
};

std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

json cmd_plot(const json& req) {
  const Input in = load_input(req);
  const std::size_t n = in.n();
  const RVector u = point_option(req, "u", n);
  const RVector v = point_option(req, "v", n);
  if (rank(RMatrix::from_rows({u, v})) < 2) throw UsageError("plot: --u and --v must be linearly independent");
  const RVector origin = req.contains("origin") ? point_option(req, "origin", n) : in.e;
  if (membership_of(in, origin).status != MembershipStatus::interior)
    throw DomainError("plot: the plane origin is not an interior point");
  const std::string output = required(req, "image");
  std::string fmt = req.value("format", "");
  if (fmt.empty()) fmt = output.size() >= 4 && output.substr(output.size() - 4) == ".ppm" ? "ppm" : "svg";
  if (fmt != "ppm" && fmt != "svg") throw UsageError("plot: --format must be svg or ppm");
  const int res = req.value("resolution", 128);
  if (res < 2 || res > 2048) throw UsageError("plot: --resolution must be in [2, 2048]");
  const Rational extent = parse_rational(req.value("extent", "2"));
  if (extent <= 0) throw UsageError("plot: --extent must be positive");

  auto at = [&](int row, int col) {
    const Rational s = extent * Rational(2 * col + 1 - res) / res;
    const Rational t = extent * Rational(res - 2 * row - 1) / res;
    RVector p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = origin[i] + s * u[i] + t * v[i];
    return p;
  };
  const Rgb inside{198, 219, 239}, outside{255, 255, 255}, curve{20, 20, 20}, broken{244, 182, 182};
  std::vector<Rgb> img(static_cast<std::size_t>(res * res));
  std::vector<int> sign(img.size());
  std::map<std::string, std::size_t> counts;
  for (int r = 0; r < res; ++r)
    for (int c = 0; c < res; ++c) {
      const RVector p = at(r, c);
      const MembershipVerdict m = membership_of(in, p);
      const auto k = static_cast<std::size_t>(r * res + c);
      sign[k] = sgn(in.file.poly.evaluate(p));
      ++counts[to_string(m.status)];
      img[k] = m.status == MembershipStatus::interior  ? inside
               : m.status == MembershipStatus::outside ? outside
               : m.status == MembershipStatus::boundary ? curve
                                                        : broken;
    }
  // zero set of p: sign changes between neighbours
  std::size_t curve_pixels = 0;
  for (int r = 0; r < res; ++r)
    for (int c = 0; c < res; ++c) {
      const auto k = static_cast<std::size_t>(r * res + c);
      const bool right = c + 1 < res && sign[k] * sign[k + 1] <= 0 && sign[k] != sign[k + 1];
      const bool down = r + 1 < res && sign[k] * sign[k + static_cast<std::size_t>(res)] <= 0 &&
                        sign[k] != sign[k + static_cast<std::size_t>(res)];
      if (sign[k] == 0 || right || down) {
        img[k] = curve;
        ++curve_pixels;
      }
    }

  json overlay = nullptr;
  struct Dot {
    double x, y;
    Rgb color;
  };
  std::vector<Dot> dots;
  if (req.contains("shadow")) {
    const ShadowRep shadow = shadow_from_json(json::parse(read_file(req["shadow"].get<std::string>())));
    require_dims(shadow.ambient, n, "plot: shadow ambient dimension");
    const PreparedShadow prep(shadow);
    const int grid = req.value("overlay_resolution", 16);
    std::map<std::string, std::size_t> oc;
    for (int r = 0; r < grid; ++r)
      for (int c = 0; c < grid; ++c) {
        const int pr = (2 * r + 1) * res / (2 * grid), pc = (2 * c + 1) * res / (2 * grid);
        const MembershipResult m = prep.membership(to_doubles(at(pr, pc)), req.value("tol", 1e-5));
        ++oc[to_string(m.verdict)];
        const Rgb col = m.verdict == ShadowVerdict::member       ? Rgb{34, 139, 34}
                        : m.verdict == ShadowVerdict::non_member ? Rgb{200, 40, 40}
                                                                 : Rgb{255, 140, 0};
        dots.push_back({pc + 0.5, pr + 0.5, col});
      }
    overlay = {{"grid", grid}, {"counts", oc}};
  }

  std::string data;
  if (fmt == "ppm") {
    data = "P6\n" + std::to_string(res) + " " + std::to_string(res) + "\n255\n";
    for (const auto& d : dots) {
      const int cx = static_cast<int>(d.x), cy = static_cast<int>(d.y);
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          const int r = cy + dr, c = cx + dc;
          if (r >= 0 && r < res && c >= 0 && c < res) img[static_cast<std::size_t>(r * res + c)] = d.color;
        }
    }
    for (const auto& p : img) {
      data.push_back(static_cast<char>(p.r));
      data.push_back(static_cast<char>(p.g));
      data.push_back(static_cast<char>(p.b));
    }
  } else {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << res << "\" height=\"" << res << "\" viewBox=\"0 0 "
      << res << " " << res << "\" shape-rendering=\"crispEdges\">\n";
    for (int r = 0; r < res; ++r) {
      int c = 0;
      while (c < res) {
        const Rgb col = img[static_cast<std::size_t>(r * res + c)];
        int end = c + 1;
        while (end < res && img[static_cast<std::size_t>(r * res + end)] == col) ++end;
        if (!(col == outside))
          s << "<rect x=\"" << c << "\" y=\"" << r << "\" width=\"" << end - c << "\" height=\"1\" fill=\"" << hex(col)
            << "\"/>\n";
        c = end;
      }
    }
    for (const auto& d : dots)
      s << "<circle cx=\"" << d.x << "\" cy=\"" << d.y << "\" r=\"1.5\" fill=\"" << hex(d.color) << "\"/>\n";
    s << "</svg>\n";
    data = s.str();
  }
  write_file(output, data);

  json out = header("plot", in);
  out["u"] = format_point(u);
  out["v"] = format_point(v);
  out["origin"] = format_point(origin);
  out["extent"] = to_string(extent);
  out["resolution"] = res;
  out["format"] = fmt;
  out["image"] = output;
  out["counts"] = counts;
  out["curve_pixels"] = curve_pixels;
  out["overlay"] = overlay;
  return out;
}

}  // namespace

json run_command(const std::string& command, const json& request) {
  static const std::map<std::string, std::function<json(const json&)>> table{
      {"check-hyperbolic", cmd_check_hyperbolic},
      {"member", cmd_member},
      {"mult", cmd_mult},
      {"qc", cmd_qc},
      {"smooth", cmd_smooth},
      {"build-shadow", cmd_build_shadow},
      {"verify-shadow", cmd_verify_shadow},
      {"plot", cmd_plot},
  };
  const auto it = table.find(command);
  if (it == table.end()) throw UsageError("unknown command '" + command + "'");
  if (!request.is_object()) throw UsageError("request must be a JSON object");
  try {
    return it->second(request);
  } catch (const json::exception& err) {
    throw UsageError(std::string("malformed option: ") + err.what());
  }
}

json error_payload(const std::exception& err) {
  json out = {{"schema", 1}, {"error", "internal"}, {"message", err.what()}};
  if (const auto* e = dynamic_cast<const Error*>(&err)) out["error"] = to_string(e->kind());
  if (const auto* h = dynamic_cast<const HypothesisViolation*>(&err)) {
    out["stage"] = h->stage();
    out["witness"] = h->witness();
  }
  if (const auto* p = dynamic_cast<const ParseError*>(&err)) out["offset"] = p->offset();
  return out;
}

}  // namespace hypshadow
