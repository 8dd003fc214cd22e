#include "hypshadow/polynomial.hpp"

#include "hypshadow/error.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace hypshadow {

int total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

bool GradedLess::operator()(const Exponent& a, const Exponent& b) const {
  const int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return a < b;
}

Polynomial::Polynomial(std::size_t nvars) : nvars_(nvars) {}

Polynomial Polynomial::constant(std::size_t nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(Exponent(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index) {
  if (index >= nvars) throw DimensionError("variable index out of range");
  Polynomial p(nvars);
  Exponent e(nvars, 0);
  e[index] = 1;
  p.add_term(e, 1);
  return p;
}

Polynomial Polynomial::linear(std::span<const Rational> coeffs, const Rational& c0) {
  Polynomial p = constant(coeffs.size(), c0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    Exponent e(coeffs.size(), 0);
    e[i] = 1;
    p.add_term(e, coeffs[i]);
  }
  return p;
}

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  return total_degree(terms_.rbegin()->first);
}

bool Polynomial::is_homogeneous() const {
  if (terms_.empty()) return true;
  const int d = degree();
  return total_degree(terms_.begin()->first) == d;
}

Rational Polynomial::coeff(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Exponent& e, const Rational& c) {
  require_dims(e.size(), nvars_, "Polynomial::add_term");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  r += o;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  require_dims(o.nvars_, nvars_, "Polynomial sum");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  require_dims(o.nvars_, nvars_, "Polynomial product");
  Polynomial r(nvars_);
  Exponent e(nvars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      for (std::size_t i = 0; i < nvars_; ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  return r;
}

Polynomial Polynomial::operator*(const Rational& s) const {
  if (s == 0) return Polynomial(nvars_);
  Polynomial r = *this;
  for (auto& [e, c] : r.terms_) c *= s;
  return r;
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial result = constant(nvars_, 1);
  Polynomial base = *this;
  while (k) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k) base = base * base;
  }
  return result;
}

Rational Polynomial::evaluate(std::span<const Rational> a) const {
  require_dims(a.size(), nvars_, "Polynomial::evaluate");
  Rational sum = 0;
  Rational term;
  for (const auto& [e, c] : terms_) {
    term = c;
    for (std::size_t i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) term *= a[i];
    sum += term;
  }
  return sum;
}

double Polynomial::evaluate(std::span<const double> a) const {
  require_dims(a.size(), nvars_, "Polynomial::evaluate");
  double sum = 0;
  for (const auto& [e, c] : terms_) {
    double term = c.get_d();
    for (std::size_t i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) term *= a[i];
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::partial(std::size_t index) const {
  if (index >= nvars_) throw DimensionError("partial: variable index out of range");
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[index] == 0) continue;
    Exponent d = e;
    d[index] -= 1;
    r.add_term(d, c * e[index]);
  }
  return r;
}

std::vector<double> Polynomial::gradient(std::span<const double> a) const {
  require_dims(a.size(), nvars_, "Polynomial::gradient");
  std::vector<double> g(nvars_, 0.0);
  for (const auto& [e, c] : terms_) {
    const double cd = c.get_d();
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      double term = cd * e[i];
      for (std::size_t j = 0; j < nvars_; ++j) {
        const int k = j == i ? e[j] - 1 : e[j];
        for (int r = 0; r < k; ++r) term *= a[j];
      }
      g[i] += term;
    }
  }
  return g;
}

Polynomial Polynomial::homogeneous_component(int deg) const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_)
    if (total_degree(e) == deg) r.terms_.emplace(e, c);
  return r;
}

Polynomial compose(const Polynomial& p, const std::vector<Polynomial>& images) {
  require_dims(images.size(), p.nvars(), "compose");
  const std::size_t m = images.empty() ? 0 : images.front().nvars();
  for (const auto& q : images) require_dims(q.nvars(), m, "compose");
  // powers[i][k] = images[i]^k, built lazily
  std::vector<std::vector<Polynomial>> powers(images.size());
  auto power = [&](std::size_t i, int k) -> const Polynomial& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(Polynomial::constant(m, 1));
    while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * images[i]);
    return cache[static_cast<std::size_t>(k)];
  };
  Polynomial out(m);
  for (const auto& [e, c] : p.terms()) {
    Polynomial term = Polynomial::constant(m, c);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] > 0) term = term * power(i, e[i]);
    out += term;
  }
  return out;
}

Polynomial homogenize(const Polynomial& p, int d) {
  if (d < p.degree())
    throw DomainError("homogenize: degree " + std::to_string(d) + " is below deg(p) = " + std::to_string(p.degree()));
  Polynomial h(p.nvars() + 1);
  for (const auto& [e, c] : p.terms()) {
    Exponent he(p.nvars() + 1);
    he[0] = d - total_degree(e);
    std::copy(e.begin(), e.end(), he.begin() + 1);
    h.add_term(he, c);
  }
  return h;
}

Polynomial restrict_hyperplane(const Polynomial& h, std::span<const Rational> normal, const Rational& level,
                               std::size_t eliminated) {
  const std::size_t n = h.nvars();
  require_dims(normal.size(), n, "restrict_hyperplane");
  if (eliminated >= n) throw DimensionError("restrict_hyperplane: eliminated index out of range");
  if (normal[eliminated] == 0) throw DomainError("restrict_hyperplane: zero pivot coefficient");
  const std::size_t m = n - 1;
  std::vector<Polynomial> images;
  images.reserve(n);
  const Rational inv = 1 / normal[eliminated];
  Polynomial solved = Polynomial::constant(m, level * inv);
  for (std::size_t j = 0, k = 0; j < n; ++j) {
    if (j == eliminated) continue;
    solved += Polynomial::variable(m, k) * (-normal[j] * inv);
    ++k;
  }
  for (std::size_t j = 0, k = 0; j < n; ++j) {
    if (j == eliminated) {
      images.push_back(solved);
    } else {
      images.push_back(Polynomial::variable(m, k++));
    }
  }
  return compose(h, images);
}

UniPoly line_restriction(const Polynomial& h, std::span<const Rational> a, std::span<const Rational> v) {
  require_dims(a.size(), h.nvars(), "line_restriction (point)");
  require_dims(v.size(), h.nvars(), "line_restriction (direction)");
  const std::size_t n = h.nvars();
  std::vector<std::vector<UniPoly>> powers(n);
  auto power = [&](std::size_t i, int k) -> const UniPoly& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(UniPoly::constant(1));
    const UniPoly lin({a[i], v[i]});
    while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * lin);
    return cache[static_cast<std::size_t>(k)];
  };
  UniPoly out;
  for (const auto& [e, c] : h.terms()) {
    UniPoly term = UniPoly::constant(c);
    for (std::size_t i = 0; i < n; ++i)
      if (e[i] > 0) term = term * power(i, e[i]);
    out = out + term;
  }
  return out;
}

int HomogeneousParts::multiplicity() const {
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (!parts[i].is_zero()) return static_cast<int>(i);
  return -1;
}

HomogeneousParts homogeneous_parts(const Polynomial& g, std::span<const Rational> a) {
  const std::size_t n = g.nvars();
  require_dims(a.size(), n, "homogeneous_parts");
  std::vector<Polynomial> images;
  for (std::size_t i = 0; i < n; ++i) images.push_back(Polynomial::variable(n, i) + Polynomial::constant(n, a[i]));
  const Polynomial shifted = compose(g, images);
  HomogeneousParts hp;
  const int d = std::max(g.degree(), 0);
  hp.parts.assign(static_cast<std::size_t>(d + 1), Polynomial(n));
  for (const auto& [e, c] : shifted.terms()) hp.parts[static_cast<std::size_t>(total_degree(e))].add_term(e, c);
  return hp;
}

Derivatives derivatives(const Polynomial& g, std::span<const Rational> a) {
  const std::size_t n = g.nvars();
  const HomogeneousParts hp = homogeneous_parts(g, a);
  Derivatives d{RVector(n), RMatrix(n, n)};
  if (hp.parts.size() > 1) {
    for (const auto& [e, c] : hp.parts[1].terms())
      for (std::size_t i = 0; i < n; ++i)
        if (e[i] == 1) d.gradient[i] = c;
  }
  if (hp.parts.size() > 2) {
    for (const auto& [e, c] : hp.parts[2].terms()) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < e[i]; ++k) idx.push_back(i);
      if (idx[0] == idx[1]) {
        d.hessian(idx[0], idx[0]) = 2 * c;
      } else {
        d.hessian(idx[0], idx[1]) = c;
        d.hessian(idx[1], idx[0]) = c;
      }
    }
  }
  return d;
}

Polynomial directional_derivative(const Polynomial& h, std::span<const Rational> e) {
  require_dims(e.size(), h.nvars(), "directional_derivative");
  Polynomial out(h.nvars());
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i] != 0) out += h.partial(i) * e[i];
  return out;
}

Polynomial det_pencil_poly(const std::vector<RMatrix>& mats, std::size_t cap) {
  if (mats.empty()) throw DimensionError("det_pencil_poly: need at least M0");
  const std::size_t k = mats.front().rows();
  for (const auto& m : mats)
    if (m.rows() != k || m.cols() != k) throw DimensionError("det_pencil_poly: matrices must be square of equal size");
  if (k > cap) throw DomainError("det_pencil_poly: size " + std::to_string(k) + " exceeds cap " + std::to_string(cap));
  const std::size_t n = mats.size() - 1;
  if (k == 0) return Polynomial::constant(n, 1);
  // Entry polynomials M0 + sum x_i M_i.
  std::vector<Polynomial> entry(k * k, Polynomial(n));
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) {
      Polynomial& p = entry[r * k + c];
      p += Polynomial::constant(n, mats[0](r, c));
      for (std::size_t i = 1; i <= n; ++i)
        if (mats[i](r, c) != 0) p += Polynomial::variable(n, i - 1) * mats[i](r, c);
    }
  // Division-free cofactor expansion memoised over column subsets:
  // minor[S] = det of rows 0..|S|-1 restricted to the columns in S.
  const std::size_t full = (std::size_t{1} << k);
  std::vector<Polynomial> minor(full, Polynomial(n));
  minor[0] = Polynomial::constant(n, 1);
  for (std::size_t s = 1; s < full; ++s) {
    const int row = std::popcount(s) - 1;
    int position = 0;
    Polynomial acc(n);
    for (std::size_t c = 0; c < k; ++c) {
      if (!(s & (std::size_t{1} << c))) continue;
      const Polynomial& a = entry[static_cast<std::size_t>(row) * k + c];
      const Polynomial& sub = minor[s & ~(std::size_t{1} << c)];
      if (!a.is_zero() && !sub.is_zero()) {
        // Column c sits at `position` among the chosen columns; expanding
        // along the last row gives sign (-1)^(row + position).
        const bool negative = ((row + position) & 1) != 0;
        Polynomial prod = a * sub;
        acc += negative ? -prod : prod;
      }
      ++position;
    }
    minor[s] = std::move(acc);
  }
  return minor[full - 1];
}

// ---------------------------------------------------------------------------
// Parsing and formatting

namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return p;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    skip_ws();
    bool negate = false;
    if (accept('-')) {
      negate = true;
    } else {
      accept('+');
    }
    Polynomial acc = term();
    if (negate) acc = -acc;
    while (true) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        break;
      }
    }
    return acc;
  }

  Polynomial term() {
    Polynomial acc = factor();
    while (true) {
      if (accept('*')) {
        acc = acc * factor();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Polynomial d = factor();
        if (!d.is_constant() || d.is_zero()) throw ParseError("division only by a nonzero constant", at);
        acc = acc * (1 / d.coeff(Exponent(vars_.size(), 0)));
      } else {
        break;
      }
    }
    return acc;
  }

  Polynomial factor() {
    Polynomial b = base();
    if (accept('^')) {
      skip_ws();
      const std::size_t at = pos_;
      std::size_t end = pos_;
      while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
      if (end == pos_) throw ParseError("expected non-negative integer exponent", at);
      const unsigned k = static_cast<unsigned>(std::stoul(std::string(s_.substr(pos_, end - pos_))));
      pos_ = end;
      if (k > 64) throw ParseError("exponent too large", at);
      b = b.pow(k);
    }
    return b;
  }

  Polynomial base() {
    skip_ws();
    const std::size_t n = vars_.size();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
        throw ParseError("decimal literals are not accepted, use p/q", pos_);
      if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        throw ParseError("missing '*' between number and variable", pos_);
      return Polynomial::constant(n, Rational(mpz_class(std::string(s_.substr(start, pos_ - start)), 10)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name(s_.substr(start, pos_ - start));
      auto it = std::find(vars_.begin(), vars_.end(), name);
      if (it == vars_.end()) throw ParseError("unknown variable '" + name + "'", start);
      return Polynomial::variable(n, static_cast<std::size_t>(it - vars_.begin()));
    }
    if (c == '.') throw ParseError("decimal literals are not accepted, use p/q", pos_);
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& vars, ParseOptions opts) {
  if (vars.size() > opts.max_variables)
    throw DomainError("variable count " + std::to_string(vars.size()) + " exceeds cap " +
                      std::to_string(opts.max_variables));
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j)
      if (vars[i] == vars[j]) throw DomainError("duplicate variable name '" + vars[i] + "'");
  if (trim_view(text).empty()) throw ParseError("empty polynomial", 0);
  return Parser(text, vars).parse();
}

std::string format(const Polynomial& p, const std::vector<std::string>& vars) {
  require_dims(vars.size(), p.nvars(), "format");
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    const Rational mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    const bool constant_term = total_degree(e) == 0;
    bool need_star = false;
    if (constant_term || mag != 1) {
      os << to_string(mag);
      need_star = true;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (need_star) os << "*";
      os << vars[i];
      if (e[i] > 1) os << "^" << e[i];
      need_star = true;
    }
  }
  return os.str();
}

std::vector<std::string> default_var_names(std::size_t n) {
  if (n <= 3) {
    static const char* names[] = {"x", "y", "z"};
    return std::vector<std::string>(names, names + n);
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("x" + std::to_string(i + 1));
  return out;
}

PolyFile parse_poly_file(std::string_view text, ParseOptions opts) {
  PolyFile file;
  std::string body;
  std::size_t body_offset = 0;
  std::vector<std::pair<std::string, std::size_t>> factor_lines;
  bool have_vars = false;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = text.substr(line_start, line_end - line_start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::string_view t = trim_view(line);
    if (t.starts_with("vars:")) {
      std::istringstream is{std::string(t.substr(5))};
      std::string name;
      while (is >> name) file.vars.push_back(name);
      have_vars = true;
    } else if (t.starts_with("factor:")) {
      factor_lines.emplace_back(std::string(t.substr(7)), line_start);
    } else if (!t.empty()) {
      if (body.empty()) body_offset = line_start;
      body += std::string(line);
      body += ' ';
    }
    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }
  if (!have_vars) throw ParseError("missing 'vars:' header", 0);
  try {
    file.poly = parse_polynomial(body, file.vars, opts);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), body_offset + e.offset());
  }
  for (const auto& [src, off] : factor_lines) file.factors.push_back(parse_polynomial(src, file.vars, opts));
  return file;
}

}  // namespace hypshadow
