// hypshadow command-line front end. Everything goes through the C API: the
// options are packed into a JSON request for hs_run.

#include "hypshadow/hypshadow.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;

struct Options {
  std::string poly, e, a, f, ell, mode = "auto", shadow_out, shadow, output, u, v, origin, extent, image, format;
  std::vector<std::string> watch, points;
  std::uint64_t seed = 0;
  std::size_t samples = 0, directions = 0, probes = 0, boundary_samples = 0;
  int order = 0, iterate = 0, resolution = 0, overlay_resolution = 0;
  double tol = 0, margin = 0, radius = 0;
};

int exit_code(hs_status s) { return s == HS_OK ? 0 : s == HS_E_HYPOTHESIS ? 2 : 1; }

int fail(const std::string& kind, const std::string& message) {
  std::cerr << json{{"schema", 1}, {"error", kind}, {"message", message}}.dump(2) << "\n";
  return 1;
}

bool read_text(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperbolicity cones, rigidly convex sets and their spectrahedral shadows"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hs_version()));
  Options o;

  auto common = [&](CLI::App* sub, bool needs_poly) {
    auto* p = sub->add_option("--poly", o.poly, ".poly input file");
    if (needs_poly) p->required();
    sub->add_option("--e", o.e, "interior point, comma separated rationals")->required(needs_poly);
    sub->add_option("--mode", o.mode, "auto, cone or rz (auto: cone iff homogeneous)")
        ->check(CLI::IsMember({"auto", "cone", "rz"}));
    sub->add_option("--seed", o.seed, "sampling seed");
    sub->add_option("--output", o.output, "write the JSON report here instead of stdout");
  };

  auto* check = app.add_subcommand("check-hyperbolic", "sampled hyperbolicity / real-zero test");
  common(check, true);
  check->add_option("--samples", o.samples, "number of lines");

  auto* member = app.add_subcommand("member", "exact membership of a point");
  common(member, true);
  member->add_option("--a", o.a, "point")->required();

  auto* mult = app.add_subcommand("mult", "multiplicity of a boundary point");
  common(mult, true);
  mult->add_option("--a", o.a, "point")->required();
  mult->add_option("--f", o.f, "interior direction for the cone multiplicity (default e)");

  auto* qc = app.add_subcommand("qc", "strict quasi-concavity at a point");
  common(qc, true);
  qc->add_option("--a", o.a, "point")->required();
  qc->add_option("--tol", o.tol, "floating screen tolerance");

  auto* smooth = app.add_subcommand("smooth", "Nuij smoothing h + eps l d_e h");
  common(smooth, true);
  smooth->add_option("--ell", o.ell, "linear form l")->required();
  smooth->add_option("--watch", o.watch, "points whose multiplicity is reported (repeatable)");
  smooth->add_option("--samples", o.samples, "hyperbolicity lines per candidate eps");
  smooth->add_option("--iterate", o.iterate, "smooth repeatedly, at most this many times");
  smooth->add_option("--boundary-samples", o.boundary_samples, "boundary points checked between iterations");

  auto* build = app.add_subcommand("build-shadow", "spectrahedral shadow of the cone or rigidly convex set");
  common(build, true);
  build->add_option("--order", o.order, "moment relaxation order (default ceil(deg/2))");
  build->add_option("--directions", o.directions, "boundary sample directions");
  build->add_option("--shadow-out", o.shadow_out, "write the shadow JSON here");

  auto* verify = app.add_subcommand("verify-shadow", "probe a shadow against the exact oracle");
  common(verify, false);
  verify->add_option("--shadow", o.shadow, "shadow JSON")->required();
  verify->add_option("--points", o.points, "points to classify (repeatable)");
  verify->add_option("--probes", o.probes, "random probes against --poly");
  verify->add_option("--margin", o.margin, "skip probes closer than this to the boundary");
  verify->add_option("--radius", o.radius, "probe radius around e (rz mode)");
  verify->add_option("--tol", o.tol, "membership slack tolerance");

  auto* plot = app.add_subcommand("plot", "render a 2D affine slice");
  common(plot, true);
  plot->add_option("--u", o.u, "first plane direction")->required();
  plot->add_option("--v", o.v, "second plane direction")->required();
  plot->add_option("--origin", o.origin, "plane origin (default e)");
  plot->add_option("--extent", o.extent, "half width of the square, rational");
  plot->add_option("--resolution", o.resolution, "pixels per side");
  plot->add_option("--image", o.image, "output image (.svg or .ppm)")->required();
  plot->add_option("--format", o.format, "svg or ppm (default from the extension)")
      ->check(CLI::IsMember({"svg", "ppm"}));
  plot->add_option("--shadow", o.shadow, "overlay shadow membership from this shadow JSON");
  plot->add_option("--overlay-resolution", o.overlay_resolution, "overlay grid per side");
  plot->add_option("--tol", o.tol, "membership slack tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& s) {
    return app.exit(s);
  } catch (const CLI::ParseError& err) {
    return fail("usage", err.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  json req = json::object();
  auto set = [&](const char* flag, const char* key, const auto& value) {
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt && opt->count() > 0) req[key] = value;
  };
  if (!o.poly.empty()) {
    std::string text;
    if (!read_text(o.poly, text)) return fail("io", "cannot read " + o.poly);
    req["poly"] = text;
  }
  set("--e", "e", o.e);
  set("--a", "a", o.a);
  set("--f", "f", o.f);
  set("--mode", "mode", o.mode);
  set("--seed", "seed", o.seed);
  set("--samples", "samples", o.samples);
  set("--tol", "tol", o.tol);
  set("--ell", "ell", o.ell);
  set("--watch", "watch", o.watch);
  set("--iterate", "iterate", o.iterate);
  set("--boundary-samples", "boundary_samples", o.boundary_samples);
  set("--order", "order", o.order);
  set("--directions", "directions", o.directions);
  set("--shadow-out", "shadow_out", o.shadow_out);
  set("--shadow", "shadow", o.shadow);
  set("--points", "points", o.points);
  set("--probes", "probes", o.probes);
  set("--margin", "margin", o.margin);
  set("--radius", "radius", o.radius);
  set("--u", "u", o.u);
  set("--v", "v", o.v);
  set("--origin", "origin", o.origin);
  set("--extent", "extent", o.extent);
  set("--resolution", "resolution", o.resolution);
  set("--image", "image", o.image);
  set("--format", "format", o.format);
  set("--overlay-resolution", "overlay_resolution", o.overlay_resolution);

  char* report = nullptr;
  const hs_status status = hs_run(sub->get_name().c_str(), req.dump().c_str(), &report);
  if (status != HS_OK) {
    std::cerr << json::parse(hs_last_error()).dump(2) << "\n";
    return exit_code(status);
  }
  std::string text(report);
  hs_free_string(report);
  if (o.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(o.output, std::ios::binary);
    if (!(out << text)) return fail("io", "cannot write " + o.output);
  }
  return 0;
}
