#include "foldlab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "foldlab/errors.hpp"

namespace foldlab {

namespace {

constexpr double kDropThreshold = 1e-300;

bool exps_less(const Term& a, const Term& b) { return a.exps < b.exps; }

}  // namespace

PolynomialPhase::PolynomialPhase(int n, std::vector<Term> terms) : n_(n), terms_(std::move(terms)) {
  if (n < 1) throw ConfigError("phase dimension must be positive");
  for (const auto& t : terms_) {
    if (static_cast<int>(t.exps.size()) != 2 * n)
      throw ConfigError("term exponent vector must have length 2n = " + std::to_string(2 * n));
    for (int e : t.exps)
      if (e < 0) throw ConfigError("term exponents must be nonnegative");
    if (!std::isfinite(t.coeff)) throw ConfigError("term coefficient must be finite");
  }
  normalize();
}

PolynomialPhase PolynomialPhase::constant(int n, double c) {
  return PolynomialPhase(n, {Term{c, std::vector<int>(2 * n, 0)}});
}

PolynomialPhase PolynomialPhase::monomial(int n, double coeff, std::vector<int> exps) {
  return PolynomialPhase(n, {Term{coeff, std::move(exps)}});
}

void PolynomialPhase::normalize() {
  std::sort(terms_.begin(), terms_.end(), exps_less);
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().exps == t.exps)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(std::move(t));
  }
  std::erase_if(merged, [](const Term& t) { return std::abs(t.coeff) < kDropThreshold; });
  terms_ = std::move(merged);
}

int PolynomialPhase::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int e : t.exps) s += e;
    d = std::max(d, s);
  }
  return d;
}

int PolynomialPhase::degree_in(int var) const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.exps[var]);
  return d;
}

double PolynomialPhase::evaluate(std::span<const double> vars) const {
  double sum = 0.0;
  const std::size_t nv = vars.size();
  for (const auto& t : terms_) {
    double m = t.coeff;
    for (std::size_t v = 0; v < nv; ++v)
      if (t.exps[v]) m *= ipow(vars[v], t.exps[v]);
    sum += m;
  }
  return sum;
}

double PolynomialPhase::operator()(std::span<const double> x, std::span<const double> theta) const {
  double sum = 0.0;
  const std::size_t n = x.size();
  for (const auto& t : terms_) {
    double m = t.coeff;
    for (std::size_t i = 0; i < n; ++i) {
      if (t.exps[i]) m *= ipow(x[i], t.exps[i]);
      if (t.exps[n + i]) m *= ipow(theta[i], t.exps[n + i]);
    }
    sum += m;
  }
  return sum;
}

PolynomialPhase PolynomialPhase::derivative(int var) const {
  if (var < 0 || var >= num_vars()) throw ConfigError("derivative variable index out of range");
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (t.exps[var] == 0) continue;
    Term d = t;
    d.coeff *= t.exps[var];
    d.exps[var] -= 1;
    out.push_back(std::move(d));
  }
  PolynomialPhase p;
  p.n_ = n_;
  p.terms_ = std::move(out);
  p.normalize();
  return p;
}

std::vector<double> PolynomialPhase::restrict_to(int var, std::span<const double> vars) const {
  std::vector<double> c(static_cast<std::size_t>(degree_in(var)) + 1, 0.0);
  const std::size_t nv = vars.size();
  for (const auto& t : terms_) {
    double m = t.coeff;
    for (std::size_t v = 0; v < nv; ++v)
      if (static_cast<int>(v) != var && t.exps[v]) m *= ipow(vars[v], t.exps[v]);
    c[t.exps[var]] += m;
  }
  return c;
}

PolynomialPhase& PolynomialPhase::operator+=(const PolynomialPhase& other) {
  if (other.n_ != n_) throw ConfigError("phase dimension mismatch");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  normalize();
  return *this;
}

PolynomialPhase& PolynomialPhase::operator-=(const PolynomialPhase& other) {
  if (other.n_ != n_) throw ConfigError("phase dimension mismatch");
  for (auto t : other.terms_) {
    t.coeff = -t.coeff;
    terms_.push_back(std::move(t));
  }
  normalize();
  return *this;
}

PolynomialPhase& PolynomialPhase::operator*=(double s) {
  for (auto& t : terms_) t.coeff *= s;
  normalize();
  return *this;
}

PolynomialPhase operator*(const PolynomialPhase& a, const PolynomialPhase& b) {
  if (a.n_ != b.n_) throw ConfigError("phase dimension mismatch");
  PolynomialPhase p;
  p.n_ = a.n_;
  p.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      Term t{ta.coeff * tb.coeff, ta.exps};
      for (std::size_t v = 0; v < t.exps.size(); ++v) t.exps[v] += tb.exps[v];
      p.terms_.push_back(std::move(t));
    }
  }
  p.normalize();
  return p;
}

std::string PolynomialPhase::to_string() const {
  if (terms_.empty()) return "0";
  auto var_name = [this](int v) {
    const bool is_x = v < n_;
    const int idx = is_x ? v : v - n_;
    std::string s = is_x ? "x" : "t";
    if (n_ > 1) s += std::to_string(idx + 1);
    return s;
  };
  std::ostringstream os;
  // Highest total degree first reads naturally.
  std::vector<Term> order = terms_;
  std::stable_sort(order.begin(), order.end(), [](const Term& a, const Term& b) {
    int da = 0, db = 0;
    for (int e : a.exps) da += e;
    for (int e : b.exps) db += e;
    if (da != db) return da > db;
    return a.exps > b.exps;
  });
  bool first = true;
  for (const auto& t : order) {
    double c = t.coeff;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    c = std::abs(c);
    bool has_var = false;
    for (int e : t.exps) has_var |= e > 0;
    std::ostringstream factors;
    bool need_star = false;
    if (c != 1.0 || !has_var) {
      factors << c;
      need_star = true;
    }
    for (int v = 0; v < num_vars(); ++v) {
      if (t.exps[v] == 0) continue;
      if (need_star) factors << "*";
      factors << var_name(v);
      if (t.exps[v] > 1) factors << "^" << t.exps[v];
      need_star = true;
    }
    os << factors.str();
    first = false;
  }
  return os.str();
}

}  // namespace foldlab
