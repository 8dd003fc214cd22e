// Acceptance run: one PASS/FAIL line per criterion, with the measured runtime
// checked against its budget. Exit status is the number of failures.

#include "hypshadow/error.hpp"
#include "hypshadow/hyperbolicity.hpp"
#include "hypshadow/rz_geometry.hpp"
#include "hypshadow/sampling.hpp"
#include "hypshadow/sdp.hpp"
#include "hypshadow/shadow.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace hypshadow;

namespace {

const std::vector<std::string> xyz_vars{"x", "y", "z"};
const std::vector<std::string> xy_vars{"x", "y"};

Polynomial poly(const std::string& text, const std::vector<std::string>& vars = xyz_vars) {
  return parse_polynomial(text, vars);
}

RVector pt(std::initializer_list<long> xs) {
  RVector out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < budget_s;
  const bool pass = out.ok && in_time;
  if (!pass) ++failures;
  std::ostringstream line;
  line.precision(3);
  line << (pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << out.detail << " (" << std::fixed << secs
       << " s, budget " << budget_s << " s" << (in_time ? "" : ", OVER BUDGET") << ")";
  std::cout << line.str() << std::endl;
}

void info(int id, const std::string& text) { std::cout << "INFO [" << id << "] " << text << std::endl; }

struct Proc {
  int code;
  std::string out;
};

Proc run_cli(const std::string& args) {
  const std::string cmd = std::string(HS_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const std::string& name) { return std::string(HS_TEST_DATA) + "/" + name; }

std::string show(const RVector& v) { return format_point(v); }

double lorentz_margin(const std::vector<double>& a) { return a[0] - std::hypot(a[1], a[2]); }

// Normalized ray distance of an exterior point: 1 - t* where e + t*(a - e)
// is the first boundary crossing.
double ray_distance(const HyperbolicInstance& inst, const RVector& a) {
  const auto root = smallest_root_above(line_restriction(inst.h(), inst.e(), sub(a, inst.e())), 0);
  if (!root) return 0;
  return 1 - root->approx();
}

double depth(const std::vector<double>& a) {
  const double n = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  return *std::min_element(a.begin(), a.end()) / n;
}

Outcome taco_qc() {
  const Polynomial taco = poly("z - x^2");
  const RVector e = pt({0, 0, 1});
  const QCVerdict v = strict_quasiconcavity(taco, e);
  if (v.status != QCStatus::degenerate) return {false, std::string("status ") + to_string(v.status)};
  // recertify: witness orthogonal to the gradient with w^T H w == 0
  const Derivatives d = derivatives(taco, e);
  Rational dot = 0, quad = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    dot += d.gradient[i] * v.witness[i];
    for (std::size_t j = 0; j < 3; ++j) quad += v.witness[i] * d.hessian(i, j) * v.witness[j];
  }
  const bool nonzero = std::any_of(v.witness.begin(), v.witness.end(), [](const Rational& x) { return x != 0; });
  return {nonzero && dot == 0 && quad == 0 && quad == v.witness_value,
          "degenerate, witness " + show(v.witness) + ", <grad,w> = " + to_string(dot) + ", w^T H w = " + to_string(quad)};
}

Outcome samosa_structure() {
  const Polynomial p = poly("1 + 2*x*y*z - x^2 - y^2 - z^2");
  const RZInstance inst(p, pt({0, 0, 0}));

  // oracle: solve p = 0, grad p = 0. grad p = 0 forces x = yz, y = xz, z = xy,
  // so x^2 = y^2 = z^2 in {0, 1}; enumerate and keep the exact solutions
  std::set<RVector> oracle;
  for (long x : {-1, 0, 1})
    for (long y : {-1, 0, 1})
      for (long z : {-1, 0, 1}) {
        const RVector a = pt({x, y, z});
        const Derivatives d = derivatives(p, a);
        const bool crit = std::all_of(d.gradient.begin(), d.gradient.end(), [](const Rational& g) { return g == 0; });
        if (crit && p.evaluate(a) == 0) oracle.insert(a);
      }

  const auto scan = singular_boundary_scan(inst, 300, 0);
  std::set<RVector> found;
  bool mult_ok = true;
  for (const auto& s : scan) {
    if (!s.exact || s.multiplicity != 2) mult_ok = false;
    if (s.exact) found.insert(*s.exact);
  }
  bool product_ok = true;
  for (const auto& a : found) product_ok = product_ok && a[0] * a[1] * a[2] == 1;

  int midpoints_ok = 0;
  for (const auto& m : {pt({1, 0, 0}), pt({-1, 0, 0}), pt({0, 1, 0}), pt({0, -1, 0}), pt({0, 0, 1}), pt({0, 0, -1})}) {
    const QCVerdict v = strict_quasiconcavity(p, m);
    if (v.status == QCStatus::degenerate && line_vanishing_check(p, m, v.witness)) ++midpoints_ok;
  }
  std::ostringstream d;
  d << scan.size() << " singular points (oracle " << oracle.size() << ", equal " << (found == oracle)
    << "), multiplicity 2: " << mult_ok << ", product +1: " << product_ok << ", degenerate midpoints with vanishing line "
    << midpoints_ok << "/6";
  return {scan.size() == 4 && found == oracle && mult_ok && product_ok && midpoints_ok == 6, d.str()};
}

Outcome multiplicity_invariance() {
  const std::vector<std::pair<std::string, HyperbolicInstance>> fixtures{
      {"xyz", HyperbolicInstance(poly("x*y*z"), pt({1, 1, 1}))},
      {"lorentz", HyperbolicInstance(poly("x^2 - y^2 - z^2"), pt({1, 0, 0}))},
      {"samosa_hom", HyperbolicInstance(homogenize(poly("1 + 2*x*y*z - x^2 - y^2 - z^2"), 3), pt({1, 0, 0, 0}))}};
  std::mt19937_64 rng(31);
  auto rat = [&](long range, long den) {
    Rational r(std::uniform_int_distribution<long>(-range * den, range * den)(rng), den);
    r.canonicalize();
    return r;
  };
  std::size_t checks = 0, mismatches = 0, boundary = 0;
  for (const auto& [name, inst] : fixtures) {
    const std::size_t n = inst.dim();
    std::vector<RVector> dirs;
    while (dirs.size() < 10) {
      RVector f = inst.e();
      for (auto& x : f) x += rat(1, 8) / 2;
      if (cone_membership(inst, f).status == MembershipStatus::interior) dirs.push_back(f);
    }
    for (int i = 0; i < 50; ++i) {
      RVector a(n);
      // half the points on the boundary, where multiplicity is at least 1
      if (i % 2 == 0) {
        for (auto& x : a) x = rat(3, 4);
      } else if (name == "xyz") {
        for (auto& x : a) x = rat(3, 4);
        a[static_cast<std::size_t>(i) % 3] = 0;
        if (i % 3 == 0) a[(static_cast<std::size_t>(i) + 1) % 3] = 0;
      } else if (name == "lorentz") {
        const Rational p = rat(3, 3), q = rat(3, 3);
        a = {p * p + q * q, p * p - q * q, 2 * p * q};
      } else {
        const Rational s = rat(1, 4), w = rat(2, 2) + 3;
        a = i % 3 == 0 ? RVector{w, w, s * w, s * w} : i % 3 == 1 ? RVector{w, w, w, w} : RVector{w, -w, -w, w};
      }
      const int oracle = homogeneous_parts(inst.h(), a).multiplicity();
      if (oracle > 0) ++boundary;
      for (const auto& f : dirs) {
        ++checks;
        if (multiplicity(inst, a, f) != oracle) ++mismatches;
      }
    }
  }
  std::ostringstream d;
  d << checks << " (point, direction) pairs, " << boundary << " points with positive multiplicity, " << mismatches
    << " mismatches against the lowest homogeneous degree";
  return {checks == 1500 && mismatches == 0, d.str()};
}

Outcome nuij() {
  const HyperbolicInstance xyz(poly("x*y*z"), pt({1, 1, 1}));
  const Polynomial ell = poly("(x + y + z)/3");
  NuijOptions o;
  o.samples = 1000;
  const NuijResult r = nuij_smooth(xyz, ell, {pt({0, 0, 1})}, o);
  const bool drop = r.watch.size() == 1 && r.watch[0].before == 2 && r.watch[0].after == 1;
  const SampledReport hyp = is_hyperbolic_sampled(HyperbolicInstance(r.h, pt({1, 1, 1})), 1000, 77);
  const NuijIteration it = nuij_iterate(xyz, ell, {pt({0, 0, 1})}, o, 4, 200);
  std::ostringstream d;
  d << "multiplicity " << (r.watch.empty() ? -1 : r.watch[0].before) << " -> " << (r.watch.empty() ? -1 : r.watch[0].after)
    << " at eps " << to_string(r.eps) << ", " << hyp.samples << " lines, " << hyp.failures.size() << " failures, "
    << it.steps.size() << " iteration(s) to sampled multiplicity " << it.max_sampled_multiplicity;
  return {drop && hyp.samples >= 1000 && hyp.passed() && it.steps.size() <= 2 && it.max_sampled_multiplicity <= 1,
          d.str()};
}

Outcome lorentz_pencil() {
  const HyperbolicInstance inst(poly("x^2 - y^2 - z^2"), pt({1, 0, 0}));
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<long> num(-2 * 64, 2 * 64);
  int probes = 0, disagree = 0, members = 0;
  while (probes < 200) {
    RVector a;
    for (int i = 0; i < 3; ++i) a.push_back(Rational(num(rng), 64));
    std::vector<double> ad = to_doubles(a);
    if (std::abs(lorentz_margin(ad)) < 1e-4) continue;
    ++probes;
    // x I + y diag(1, -1) + z offdiag
    RMatrix m(2, 2);
    m(0, 0) = a[0] + a[1];
    m(1, 1) = a[0] - a[1];
    m(0, 1) = m(1, 0) = a[2];
    const bool cone = cone_membership(inst, a).status != MembershipStatus::outside;
    const bool exact_psd = psd_check(m).psd;
    const bool float_psd = psd_check(SymMatrix::from_rational(m)).psd;
    if (cone) ++members;
    if (exact_psd != cone || float_psd != cone) ++disagree;
  }
  std::ostringstream d;
  d << probes << " probes (" << members << " in the cone), " << disagree << " disagreements";
  return {disagree == 0, d.str()};
}

Outcome disk_sharpness() {
  const PreparedShadow s(moment_relaxation({poly("1 - x^2 - y^2", xy_vars)}, 1));
  const MembershipResult in = s.membership(std::vector<double>{0.6, 0.6});
  const MembershipResult out = s.membership(std::vector<double>{0.8, 0.8});
  // oracle: the order-1 moment matrix [[1,x,y],[x,a,c],[y,c,b]] with a + b <= 1
  // is feasible iff x^2 + y^2 <= 1
  const bool oracle_in = 0.6 * 0.6 + 0.6 * 0.6 <= 1, oracle_out = 0.8 * 0.8 + 0.8 * 0.8 > 1;
  std::ostringstream d;
  d << "(0.6,0.6) " << to_string(in.verdict) << " slack " << in.slack << "; (0.8,0.8) " << to_string(out.verdict)
    << " slack " << out.slack;
  return {oracle_in && oracle_out && in.verdict == ShadowVerdict::member && in.slack <= 1e-7 &&
              out.verdict == ShadowVerdict::non_member && out.slack >= 0.05,
          d.str()};
}

Outcome lifts() {
  const std::vector<ShadowRep> disks{moment_relaxation({poly("1 - (x - 1)^2 - y^2", xy_vars)}, 1),
                                     moment_relaxation({poly("1 - (x + 1)^2 - y^2", xy_vars)}, 1)};
  const PreparedShadow stadium(convex_hull_shadows(disks, 3));
  RMatrix embed(3, 2);
  embed(1, 0) = 1;
  embed(2, 1) = 1;
  const ShadowRep slice = affine_image(moment_relaxation({poly("1 - x^2 - y^2", xy_vars)}, 1), embed, pt({1, 0, 0}));
  const PreparedShadow cone(conical_hull(slice, pt({1, 0, 0}), 1));

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ux(-2.6, 2.6), uy(-1.4, 1.4), u(-1.5, 1.5);
  int sp = 0, sd = 0, si = 0;
  while (sp < 200) {
    const double x = ux(rng), y = uy(rng);
    const double dist = std::hypot(std::max(std::abs(x) - 1, 0.0), y) - 1;
    if (std::abs(dist) < 0.01) continue;
    ++sp;
    const ShadowVerdict v = stadium.membership(std::vector<double>{x, y}).verdict;
    if (v == ShadowVerdict::inconclusive) ++si;
    else if (v != (dist < 0 ? ShadowVerdict::member : ShadowVerdict::non_member)) ++sd;
  }
  int cp = 0, cd = 0, ci = 0;
  while (cp < 200) {
    const std::vector<double> a{u(rng) + 0.5, u(rng), u(rng)};
    // Euclidean distance to the Lorentz cone boundary
    const double r = std::hypot(a[1], a[2]);
    const double dist = a[0] < -r ? std::hypot(a[0], r) : std::abs(a[0] - r) / std::sqrt(2.0);
    const bool inside = a[0] >= r;
    if (dist < 0.01) continue;
    ++cp;
    const ShadowVerdict v = cone.membership(a).verdict;
    if (v == ShadowVerdict::inconclusive) ++ci;
    else if (v != (inside ? ShadowVerdict::member : ShadowVerdict::non_member)) ++cd;
  }
  std::ostringstream d;
  d << "stadium " << sp << " probes, " << sd << " disagreements, " << si << " inconclusive; Lorentz lift " << cp
    << " probes, " << cd << " disagreements, " << ci << " inconclusive";
  return {sd == 0 && cd == 0 && si == 0 && ci == 0, d.str()};
}

Outcome pipeline() {
  const HyperbolicInstance inst(poly("x^2 - y^2 - z^2"), pt({1, 0, 0}));
  const ConeShadow cs = build_cone_shadow(inst);
  const PreparedShadow s(cs.shadow);
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<long> num(-2 * 1024, 2 * 1024);
  int interior = 0, exterior = 0, disagree = 0, inconclusive = 0;
  while (interior + exterior < 200) {
    RVector a;
    for (int i = 0; i < 3; ++i) a.push_back(Rational(num(rng), 1024));
    const MembershipStatus st = cone_membership(inst, a).status;
    bool want_member;
    if (st == MembershipStatus::interior) {
      if (interior >= 100) continue;
      ++interior;
      want_member = true;
    } else if (st == MembershipStatus::outside) {
      if (exterior >= 100 || ray_distance(inst, a) < 0.05) continue;
      ++exterior;
      want_member = false;
    } else {
      continue;
    }
    const ShadowVerdict v = s.membership(to_doubles(a)).verdict;
    if (v == ShadowVerdict::inconclusive) ++inconclusive;
    else if ((v == ShadowVerdict::member) != want_member) ++disagree;
  }
  std::ostringstream d;
  d << "built with " << cs.shadow.lifted << " lifted variables; " << interior << " interior + " << exterior
    << " exterior probes, " << disagree << " disagreements, " << inconclusive << " inconclusive";
  return {disagree == 0 && inconclusive <= 4, d.str()};
}

Outcome hypothesis_detection() {
  const Proc a = run_cli("build-shadow --poly " + data("xyz.poly") + " --e 1,1,1");
  const Proc b = run_cli("build-shadow --poly " + data("samosa_hom.poly") + " --e 1,0,0,0");
  auto names_witness = [](const Proc& p) {
    return p.code == 2 && p.out.find("\"stage\": \"smoothness\"") != std::string::npos &&
           p.out.find("\"multiplicity\": 2") != std::string::npos;
  };
  std::ostringstream d;
  d << "xyz exit " << a.code << ", samosa_hom exit " << b.code;
  return {names_witness(a) && names_witness(b), d.str()};
}

Outcome approximation() {
  const HyperbolicInstance xyz(poly("x*y*z"), pt({1, 1, 1}));
  const Polynomial ell = poly("(x + y + z)/3");
  // interior probes in the orthant at depth >= 0.05, exterior ones at depth <= -0.05
  std::vector<std::vector<double>> inner, outer;
  for (std::uint64_t i = 0; inner.size() < 40 || outer.size() < 30; ++i) {
    std::vector<double> a = gaussian_direction(3, 53, i);
    for (auto& x : a) x = std::abs(x);
    if (i % 2 == 1) a[i % 3] = -0.6 * a[i % 3];
    const double d = depth(a);
    if (d >= 0.05 && inner.size() < 40) inner.push_back(a);
    if (d <= -0.05 && outer.size() < 30) outer.push_back(a);
  }
  const std::vector<double> deltas{0.1, 0.05};
  const int kmax = 6;
  // pass[k][j]: every probe at depth >= deltas[j] is a member of the eps = 2^-k shadow
  std::vector<std::vector<bool>> pass(kmax + 1, std::vector<bool>(deltas.size(), false));
  std::ostringstream trail;
  for (int k = 1; k <= kmax; ++k) {
    NuijOptions o;
    o.samples = 300;
    o.first_exponent = o.last_exponent = k;
    const NuijResult r = nuij_smooth(xyz, ell, {}, o);
    const HyperbolicInstance sm(r.h, pt({1, 1, 1}));
    const ConeShadow cs = build_cone_shadow(sm);
    const PreparedShadow s(cs.shadow);
    std::vector<int> missed(deltas.size(), 0);
    for (const auto& a : inner) {
      if (s.membership(a).verdict == ShadowVerdict::member) continue;
      for (std::size_t j = 0; j < deltas.size(); ++j)
        if (depth(a) >= deltas[j]) ++missed[j];
    }
    // exterior probes outside the exact smoothed cone, and how many of those the shadow rejects
    int exact_out = 0, rejected = 0;
    for (const auto& a : outer) {
      if (cone_membership(sm, round_dyadic(a, 30)).status != MembershipStatus::outside) continue;
      ++exact_out;
      rejected += s.membership(a).verdict == ShadowVerdict::non_member;
    }
    for (std::size_t j = 0; j < deltas.size(); ++j) pass[k][j] = missed[j] == 0;
    trail << "eps " << to_string(r.eps) << ": missed " << missed[0] << "/" << missed[1] << ", exterior "
          << exact_out << "/" << outer.size() << " outside the smoothed cone, " << rejected << " rejected; ";
  }
  info(10, trail.str());
  std::ostringstream d;
  bool ok = true;
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    // largest eps from which every smaller tested eps passes
    int from = kmax + 1;
    while (from > 1 && pass[from - 1][j]) --from;
    if (from > kmax) {
      ok = false;
      d << "delta " << deltas[j] << ": no eps found; ";
    } else {
      d << "delta " << deltas[j] << ": eps(delta) = 2^-" << from << "; ";
    }
  }
  d << inner.size() << " interior probes, eps down to 2^-" << kmax;
  return {ok, d.str()};
}

}  // namespace

int main() {
  std::cout << "hypshadow acceptance" << std::endl;
  criterion(1, "taco quasi-concavity failure at e", 1, taco_qc);
  criterion(2, "samosa singular structure", 10, samosa_structure);
  criterion(3, "multiplicity is direction independent", 30, multiplicity_invariance);
  criterion(4, "Nuij smoothing of xyz", 30, nuij);
  criterion(5, "Lorentz pencil against cone membership", 10, lorentz_pencil);
  criterion(6, "order-1 moment relaxation of the disk", 5, disk_sharpness);
  criterion(7, "stadium hull and Lorentz conical lift", 60, lifts);
  criterion(8, "Lorentz cone shadow pipeline", 300, pipeline);
  criterion(9, "non-smooth inputs exit 2 with a witness", 30, hypothesis_detection);
  criterion(10, "xyz approximation by smoothed shadows", 600, approximation);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
