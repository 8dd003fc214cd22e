// Exercises the shared library through its C header only.

#include "hypshadow/hypshadow.h"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

std::string data(const std::string& name) {
  std::ifstream in(std::string(HS_TEST_DATA) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  hs_status status;
  std::string text;
  json report() const { return json::parse(text); }
};

Run run(const std::string& command, const json& req) {
  char* out = nullptr;
  const hs_status st = hs_run(command.c_str(), req.dump().c_str(), &out);
  Run r{st, st == HS_OK ? std::string(out) : std::string(hs_last_error())};
  hs_free_string(out);
  return r;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(hs_status_name(HS_OK)) == "ok");
  CHECK(std::string(hs_status_name(HS_E_HYPOTHESIS)) == "hypothesis");
  CHECK(std::string(hs_version()).size() > 0);
}

TEST_CASE("member on the samosa corner reports a double boundary root") {
  const Run r = run("member", {{"poly", data("samosa.poly")}, {"e", "0,0,0"}, {"a", "1,1,1"}});
  REQUIRE(r.status == HS_OK);
  const json j = r.report();
  CHECK(j["schema"] == 1);
  CHECK(j["status"] == "boundary");
  CHECK(j["multiplicity"] == 2);
  CHECK(std::string(hs_last_error()).empty());
}

TEST_CASE("hypothesis violations carry stage and witness") {
  const Run r = run("build-shadow", {{"poly", data("xyz.poly")}, {"e", "1,1,1"}});
  REQUIRE(r.status == HS_E_HYPOTHESIS);
  const json j = r.report();
  CHECK(j["error"] == "hypothesis");
  CHECK(j["stage"] == "smoothness");
  CHECK(j["witness"]["points"].size() >= 1);
}

TEST_CASE("error codes map to the error kind") {
  CHECK(run("frobnicate", json::object()).status == HS_E_USAGE);
  CHECK(run("member", {{"e", "0"}}).status == HS_E_USAGE);
  CHECK(run("member", {{"poly", "vars: x\nx^^2"}, {"e", "0"}, {"a", "1"}}).status == HS_E_PARSE);
  CHECK(run("member", {{"poly", data("samosa.poly")}, {"e", "0,0"}, {"a", "1,1,1"}}).status == HS_E_DIMENSION);
  CHECK(run("member", {{"poly", data("samosa.poly")}, {"e", "1,1,1"}, {"a", "0,0,0"}}).status == HS_E_DOMAIN);
  CHECK(run("verify-shadow", {{"shadow", "/nonexistent/shadow.json"}}).status == HS_E_IO);
  CHECK(run("member", {{"poly", data("samosa.poly")}, {"e", 7}, {"a", "1,1,1"}}).status == HS_E_USAGE);

  char* out = nullptr;
  CHECK(hs_run("member", "{not json", &out) == HS_E_PARSE);
  CHECK(json::parse(hs_last_error())["error"] == "parse");
  CHECK(hs_run(nullptr, "{}", &out) == HS_E_USAGE);
}

TEST_CASE("reports are byte-identical for identical requests") {
  const json req = {{"poly", data("samosa.poly")}, {"e", "0,0,0"}, {"samples", 300}, {"seed", 11}};
  const Run a = run("check-hyperbolic", req), b = run("check-hyperbolic", req);
  REQUIRE(a.status == HS_OK);
  CHECK(a.text == b.text);

  const json build = {{"poly", data("lorentz.poly")}, {"e", "1,0,0"}, {"seed", 3}};
  const Run c = run("build-shadow", build), d = run("build-shadow", build);
  REQUIRE(c.status == HS_OK);
  CHECK(c.text == d.text);
}

TEST_CASE("polynomial handles") {
  hs_poly* p = nullptr;
  REQUIRE(hs_poly_parse("x^2 - y^2 - z^2", "x,y,z", &p) == HS_OK);
  CHECK(hs_poly_nvars(p) == 3);
  char* v = nullptr;
  REQUIRE(hs_poly_evaluate(p, "3,1/2,2", &v) == HS_OK);
  CHECK(std::string(v) == "19/4");
  hs_free_string(v);
  CHECK(hs_poly_evaluate(p, "1,2", &v) == HS_E_DIMENSION);
  char* f = nullptr;
  REQUIRE(hs_poly_format(p, &f) == HS_OK);
  CHECK(std::string(f) == "x^2 - y^2 - z^2");
  hs_free_string(f);
  hs_poly_free(p);

  hs_poly* q = nullptr;
  REQUIRE(hs_poly_parse_file(data("lens.poly").c_str(), &q) == HS_OK);
  CHECK(hs_poly_nvars(q) == 2);
  hs_poly_free(q);
  CHECK(hs_poly_parse_file("vars: x\nx +* 1", &q) == HS_E_PARSE);
  CHECK(json::parse(hs_last_error()).contains("offset"));
}

TEST_CASE("shadow handles round trip through JSON") {
  const Run built = run("build-shadow", {{"poly", data("disk.poly")}, {"e", "0,0"}});
  REQUIRE(built.status == HS_OK);
  const std::string path = "capi_disk.shadow.json";
  REQUIRE(run("build-shadow", {{"poly", data("disk.poly")}, {"e", "0,0"}, {"shadow_out", path}}).status == HS_OK);
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();

  hs_shadow* s = nullptr;
  REQUIRE(hs_shadow_from_json(ss.str().c_str(), &s) == HS_OK);
  CHECK(hs_shadow_ambient(s) == 2);
  hs_verdict verdict = HS_INCONCLUSIVE;
  double slack = -1;
  const double inside[] = {0.3, -0.4}, outside[] = {0.9, 0.9};
  REQUIRE(hs_shadow_membership(s, inside, 2, 1e-5, &verdict, &slack) == HS_OK);
  CHECK(verdict == HS_MEMBER);
  REQUIRE(hs_shadow_membership(s, outside, 2, 1e-5, &verdict, nullptr) == HS_OK);
  CHECK(verdict == HS_NON_MEMBER);
  CHECK(hs_shadow_membership(s, inside, 3, 1e-5, &verdict, nullptr) == HS_E_DIMENSION);

  char* text = nullptr;
  REQUIRE(hs_shadow_to_json(s, &text) == HS_OK);
  hs_shadow* t = nullptr;
  REQUIRE(hs_shadow_from_json(text, &t) == HS_OK);
  char* again = nullptr;
  REQUIRE(hs_shadow_to_json(t, &again) == HS_OK);
  CHECK(std::string(text) == std::string(again));
  hs_free_string(text);
  hs_free_string(again);
  hs_shadow_free(t);
  hs_shadow_free(s);

  CHECK(hs_shadow_from_json("{\"schema\": 1}", &s) == HS_E_DOMAIN);
  CHECK(hs_shadow_from_json("[", &s) == HS_E_PARSE);
}

TEST_CASE("rigidly convex build fixes the homogenizing coordinate") {
  const Run r = run("build-shadow", {{"poly", data("ellipse.poly")}, {"e", "0,0"}});
  REQUIRE(r.status == HS_OK);
  const json j = r.report();
  CHECK(j["mode"] == "rz");
  CHECK(j["shadow"]["ambient"] == 2);
}

TEST_CASE("the lens corners are rejected as non-smooth") {
  const Run r = run("build-shadow", {{"poly", data("lens.poly")}, {"e", "0,0"}});
  REQUIRE(r.status == HS_E_HYPOTHESIS);
  const json w = r.report()["witness"];
  REQUIRE(w["points"].size() == 2);
  for (const auto& p : w["points"]) {
    CHECK(p["multiplicity"] == 2);
    CHECK(std::abs(p["point"][0].get<double>()) < 1e-9);
    CHECK(std::abs(std::abs(p["point"][1].get<double>()) - 0.8660254037844386) < 1e-9);
  }
}

TEST_CASE("plot rejects parallel directions and exterior origins") {
  const json base = {{"poly", data("samosa.poly")}, {"e", "0,0,0"}, {"image", "capi_plot.svg"}};
  json par = base;
  par["u"] = "1,0,0";
  par["v"] = "-2,0,0";
  CHECK(run("plot", par).status == HS_E_USAGE);
  json off = base;
  off["u"] = "1,0,0";
  off["v"] = "0,1,0";
  off["origin"] = "2,0,0";
  CHECK(run("plot", off).status == HS_E_DOMAIN);
}
