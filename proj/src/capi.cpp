#include "hypshadow/hypshadow.h"

#include "commands.hpp"
#include "hypshadow/error.hpp"
#include "hypshadow/shadow.hpp"

#include <cstdlib>
#include <cstring>
#include <sstream>

struct hs_poly {
  hypshadow::PolyFile file;
};

struct hs_shadow {
  hypshadow::ShadowRep rep;
  hypshadow::PreparedShadow prepared;
};

namespace {

thread_local std::string last_error;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

hs_status status_of(hypshadow::ErrorKind kind) {
  using hypshadow::ErrorKind;
  switch (kind) {
    case ErrorKind::usage: return HS_E_USAGE;
    case ErrorKind::parse: return HS_E_PARSE;
    case ErrorKind::dimension: return HS_E_DIMENSION;
    case ErrorKind::domain: return HS_E_DOMAIN;
    case ErrorKind::hypothesis: return HS_E_HYPOTHESIS;
    case ErrorKind::numeric: return HS_E_NUMERIC;
    case ErrorKind::io: return HS_E_IO;
  }
  return HS_E_INTERNAL;
}

// Runs f, translating any exception into a status and the thread's error payload.
template <class F>
hs_status guarded(F&& f) {
  last_error.clear();
  try {
    f();
    return HS_OK;
  } catch (const hypshadow::Error& err) {
    last_error = hypshadow::error_payload(err).dump();
    return status_of(err.kind());
  } catch (const std::exception& err) {
    last_error = hypshadow::error_payload(err).dump();
    return HS_E_INTERNAL;
  } catch (...) {
    last_error = R"({"error":"internal","message":"unknown exception","schema":1})";
    return HS_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw hypshadow::UsageError(std::string(what) + " is NULL");
}

}  // namespace

extern "C" {

const char* hs_version(void) { return "0.1.0"; }

const char* hs_status_name(hs_status status) {
  switch (status) {
    case HS_OK: return "ok";
    case HS_E_USAGE: return "usage";
    case HS_E_PARSE: return "parse";
    case HS_E_DIMENSION: return "dimension";
    case HS_E_DOMAIN: return "domain";
    case HS_E_HYPOTHESIS: return "hypothesis";
    case HS_E_NUMERIC: return "numeric";
    case HS_E_IO: return "io";
    case HS_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* hs_last_error(void) { return last_error.c_str(); }

void hs_free_string(char* s) { std::free(s); }

hs_status hs_run(const char* command, const char* request_json, char** report) {
  return guarded([&] {
    need(command, "command");
    need(report, "report");
    *report = nullptr;
    nlohmann::json request = nlohmann::json::object();
    if (request_json && *request_json) {
      try {
        request = nlohmann::json::parse(request_json);
      } catch (const nlohmann::json::parse_error& err) {
        throw hypshadow::ParseError("request JSON: " + std::string(err.what()), err.byte);
      }
    }
    *report = dup(hypshadow::run_command(command, request).dump(2) + "\n");
  });
}

hs_status hs_poly_parse_file(const char* text, hs_poly** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new hs_poly{hypshadow::parse_poly_file(text)};
  });
}

hs_status hs_poly_parse(const char* text, const char* vars, hs_poly** out) {
  return guarded([&] {
    need(text, "text");
    need(vars, "vars");
    need(out, "out");
    std::vector<std::string> names;
    std::stringstream ss(vars);
    for (std::string v; std::getline(ss, v, ',');)
      if (!v.empty()) names.push_back(v);
    hypshadow::Polynomial p = hypshadow::parse_polynomial(text, names);
    *out = new hs_poly{{names, p, {}}};
  });
}

void hs_poly_free(hs_poly* p) { delete p; }

size_t hs_poly_nvars(const hs_poly* p) { return p ? p->file.poly.nvars() : 0; }

hs_status hs_poly_format(const hs_poly* p, char** out) {
  return guarded([&] {
    need(p, "poly");
    need(out, "out");
    *out = dup(hypshadow::format(p->file.poly, p->file.vars));
  });
}

hs_status hs_poly_evaluate(const hs_poly* p, const char* point, char** value) {
  return guarded([&] {
    need(p, "poly");
    need(point, "point");
    need(value, "value");
    const hypshadow::RVector a = hypshadow::parse_point(point);
    hypshadow::require_dims(a.size(), p->file.poly.nvars(), "point");
    *value = dup(hypshadow::to_string(p->file.poly.evaluate(std::span<const hypshadow::Rational>(a))));
  });
}

hs_status hs_shadow_from_json(const char* json, hs_shadow** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& err) {
      throw hypshadow::ParseError("shadow JSON: " + std::string(err.what()), err.byte);
    }
    hypshadow::ShadowRep rep = hypshadow::shadow_from_json(j);
    hypshadow::PreparedShadow prepared(rep);
    *out = new hs_shadow{std::move(rep), std::move(prepared)};
  });
}

hs_status hs_shadow_to_json(const hs_shadow* s, char** out) {
  return guarded([&] {
    need(s, "shadow");
    need(out, "out");
    *out = dup(hypshadow::to_json(s->rep).dump());
  });
}

void hs_shadow_free(hs_shadow* s) { delete s; }

size_t hs_shadow_ambient(const hs_shadow* s) { return s ? s->rep.ambient : 0; }

hs_status hs_shadow_membership(const hs_shadow* s, const double* x, size_t n, double tol, hs_verdict* verdict,
                               double* slack) {
  return guarded([&] {
    need(s, "shadow");
    need(x, "x");
    need(verdict, "verdict");
    hypshadow::require_dims(n, s->rep.ambient, "point");
    if (!(tol > 0)) throw hypshadow::DomainError("tol must be positive");
    const hypshadow::MembershipResult r = s->prepared.membership(std::span<const double>(x, n), tol);
    *verdict = r.verdict == hypshadow::ShadowVerdict::member       ? HS_MEMBER
               : r.verdict == hypshadow::ShadowVerdict::non_member ? HS_NON_MEMBER
                                                                   : HS_INCONCLUSIVE;
    if (slack) *slack = r.slack;
  });
}

}  // extern "C"
