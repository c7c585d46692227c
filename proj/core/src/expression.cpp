#include "growthlab/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace growthlab {
namespace detail {

class ExprNode {
 public:
  virtual ~ExprNode() = default;
  virtual ScaledComplex eval(std::complex<double> z) const = 0;
  virtual std::complex<double> eval_complex(std::complex<double> z) const = 0;
  virtual NodePtr derivative() const = 0;
  virtual std::vector<ScaledComplex> series(std::size_t n) const = 0;
  virtual bool nonneg_series() const = 0;
  virtual bool transcendental() const = 0;
  virtual bool zero() const { return false; }
  virtual void print(std::ostream& os) const = 0;
};

namespace {

NodePtr make_poly(std::vector<std::complex<double>> coeffs);
NodePtr make_sum(std::vector<NodePtr> terms);
NodePtr make_prod(std::vector<NodePtr> factors);
NodePtr make_exp(NodePtr child);



class PolyNode final : public ExprNode {
 public:
  explicit PolyNode(std::vector<std::complex<double>> c) : coeffs_(std::move(c)) {
    while (coeffs_.size() > 1 && coeffs_.back() == std::complex<double>(0.0))
      coeffs_.pop_back();
    if (coeffs_.empty()) coeffs_.push_back(0.0);
  }

  ScaledComplex eval(std::complex<double> z) const override {
    return ScaledComplex::from_complex(eval_complex(z));
  }

  std::complex<double> eval_complex(std::complex<double> z) const override {
    std::complex<double> acc = coeffs_.back();
    for (std::size_t i = coeffs_.size(); i-- > 1;) acc = acc * z + coeffs_[i - 1];
    return acc;
  }

  NodePtr derivative() const override {
    if (coeffs_.size() == 1) return make_poly({0.0});
    std::vector<std::complex<double>> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * double(i);
    return make_poly(std::move(d));
  }

  std::vector<ScaledComplex> series(std::size_t n) const override {
    std::vector<ScaledComplex> s(n);
    for (std::size_t i = 0; i < n && i < coeffs_.size(); ++i)
      s[i] = ScaledComplex::from_complex(coeffs_[i]);
    return s;
  }

  bool nonneg_series() const override {
    for (auto& c : coeffs_)
      if (c.imag() != 0.0 || c.real() < 0.0) return false;
    return true;
  }

  bool transcendental() const override { return false; }

  bool zero() const override {
    return coeffs_.size() == 1 && coeffs_[0] == std::complex<double>(0.0);
  }

  void print(std::ostream& os) const override {
    os << "poly(";
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (i) os << ",";
      if (coeffs_[i].imag() == 0.0)
        os << coeffs_[i].real();
      else
        os << coeffs_[i];
    }
    os << ")";
  }

  const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }

 private:
  std::vector<std::complex<double>> coeffs_;
};

class ExpNode final : public ExprNode {
 public:
  explicit ExpNode(NodePtr child) : child_(std::move(child)) {}

  ScaledComplex eval(std::complex<double> z) const override {
    ScaledComplex w = child_->eval(z);
    if (w.log_abs() > 700.0)
      throw std::runtime_error("exp node: argument magnitude exceeds double range");
    std::complex<double> a = w.to_complex();
    return ScaledComplex::from_log_polar(a.real(), a.imag());
  }

  std::complex<double> eval_complex(std::complex<double> z) const override {
    return std::exp(child_->eval_complex(z));
  }

  NodePtr derivative() const override {
    return make_prod({child_->derivative(), make_exp(child_)});
  }

  std::vector<ScaledComplex> series(std::size_t n) const override {
    // f = exp(u): (n+1) a_{n+1} = sum_{j=0..n} (j+1) u_{j+1} a_{n-j}.
    std::vector<ScaledComplex> u = child_->series(n + 1);
    std::vector<ScaledComplex> a(n);
    if (n == 0) return a;
    std::complex<double> u0 = u[0].to_complex();
    a[0] = ScaledComplex::from_log_polar(u0.real(), u0.imag());
    for (std::size_t m = 1; m < n; ++m) {
      ScaledComplex acc;
      for (std::size_t j = 0; j < m; ++j)
        acc += ScaledComplex::from_complex(double(j + 1)) * u[j + 1] * a[m - 1 - j];
      a[m] = acc * ScaledComplex::from_complex(1.0 / double(m));
    }
    return a;
  }

  bool nonneg_series() const override { return child_->nonneg_series(); }
  bool transcendental() const override { return true; }

  void print(std::ostream& os) const override {
    os << "exp(";
    child_->print(os);
    os << ")";
  }

  const NodePtr& child() const { return child_; }

 private:
  NodePtr child_;
};

class SumNode final : public ExprNode {
 public:
  explicit SumNode(std::vector<NodePtr> terms) : terms_(std::move(terms)) {}

  ScaledComplex eval(std::complex<double> z) const override {
    ScaledComplex acc;
    for (auto& t : terms_) acc += t->eval(z);
    return acc;
  }

  std::complex<double> eval_complex(std::complex<double> z) const override {
    std::complex<double> acc = 0.0;
    for (auto& t : terms_) acc += t->eval_complex(z);
    return acc;
  }

  NodePtr derivative() const override {
    std::vector<NodePtr> d;
    d.reserve(terms_.size());
    for (auto& t : terms_) d.push_back(t->derivative());
    return make_sum(std::move(d));
  }

  std::vector<ScaledComplex> series(std::size_t n) const override {
    std::vector<ScaledComplex> acc(n);
    for (auto& t : terms_) {
      auto s = t->series(n);
      for (std::size_t i = 0; i < n; ++i) acc[i] += s[i];
    }
    return acc;
  }

  bool nonneg_series() const override {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const NodePtr& t) { return t->nonneg_series(); });
  }

  bool transcendental() const override {
    return std::any_of(terms_.begin(), terms_.end(),
                       [](const NodePtr& t) { return t->transcendental(); });
  }

  void print(std::ostream& os) const override {
    os << "(";
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) os << " + ";
      terms_[i]->print(os);
    }
    os << ")";
  }

  const std::vector<NodePtr>& terms() const { return terms_; }

 private:
  std::vector<NodePtr> terms_;
};

class ProdNode final : public ExprNode {
 public:
  explicit ProdNode(std::vector<NodePtr> factors) : factors_(std::move(factors)) {}

  ScaledComplex eval(std::complex<double> z) const override {
    ScaledComplex acc = ScaledComplex::from_complex(1.0);
    for (auto& f : factors_) acc *= f->eval(z);
    return acc;
  }

  std::complex<double> eval_complex(std::complex<double> z) const override {
    std::complex<double> acc = 1.0;
    for (auto& f : factors_) acc *= f->eval_complex(z);
    return acc;
  }

  NodePtr derivative() const override {
    std::vector<NodePtr> terms;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      std::vector<NodePtr> fs = factors_;
      fs[i] = factors_[i]->derivative();
      terms.push_back(make_prod(std::move(fs)));
    }
    return make_sum(std::move(terms));
  }

  std::vector<ScaledComplex> series(std::size_t n) const override {
    std::vector<ScaledComplex> acc = factors_.front()->series(n);
    for (std::size_t k = 1; k < factors_.size(); ++k) {
      auto b = factors_[k]->series(n);
      std::vector<ScaledComplex> out(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) out[i] += acc[j] * b[i - j];
      acc = std::move(out);
    }
    return acc;
  }

  bool nonneg_series() const override {
    return std::all_of(factors_.begin(), factors_.end(),
                       [](const NodePtr& f) { return f->nonneg_series(); });
  }

  bool transcendental() const override {
    return std::any_of(factors_.begin(), factors_.end(),
                       [](const NodePtr& f) { return f->transcendental(); });
  }

  void print(std::ostream& os) const override {
    os << "(";
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) os << " * ";
      factors_[i]->print(os);
    }
    os << ")";
  }

  const std::vector<NodePtr>& factors() const { return factors_; }

 private:
  std::vector<NodePtr> factors_;
};

class SeriesNode final : public ExprNode {
 public:
  SeriesNode(std::function<ScaledComplex(std::size_t)> gen, bool nonneg, std::string label)
      : gen_(std::move(gen)), nonneg_(nonneg), label_(std::move(label)) {}

  ScaledComplex eval(std::complex<double> z) const override {
    // Sum terms until they fall irreversibly below the running maximum.
    ScaledComplex sum;
    double max_log_term = -std::numeric_limits<double>::infinity();
    int below = 0;
    const std::size_t budget = 200000;
    ScaledComplex zpow = ScaledComplex::from_complex(1.0);
    ScaledComplex zc = ScaledComplex::from_complex(z);
    for (std::size_t n = 0; n < budget; ++n) {
      ScaledComplex term = gen_(n) * zpow;
      sum += term;
      double lt = term.log_abs();
      max_log_term = std::max(max_log_term, lt);
      if (std::isfinite(max_log_term) && lt < max_log_term - 45.0 && n > 4) {
        if (++below >= 10) return sum;
      } else {
        below = 0;
      }
      zpow *= zc;
    }
    throw std::runtime_error("series eval: truncation budget exhausted (" + label_ + ")");
  }

  std::complex<double> eval_complex(std::complex<double> z) const override {
    return eval(z).to_complex();
  }

  NodePtr derivative() const override {
    auto g = gen_;
    return std::make_shared<SeriesNode>(
        [g](std::size_t n) {
          return g(n + 1) * ScaledComplex::from_complex(double(n + 1));
        },
        nonneg_, label_ + "'");
  }

  std::vector<ScaledComplex> series(std::size_t n) const override {
    std::vector<ScaledComplex> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = gen_(i);
    return s;
  }

  bool nonneg_series() const override { return nonneg_; }
  bool transcendental() const override { return true; }

  void print(std::ostream& os) const override { os << "series(" << label_ << ")"; }

 private:
  std::function<ScaledComplex(std::size_t)> gen_;
  bool nonneg_;
  std::string label_;
};

const std::complex<double>* constant_of(const NodePtr& n) {
  if (auto p = dynamic_cast<const PolyNode*>(n.get()))
    if (p->coeffs().size() == 1) return &p->coeffs()[0];
  return nullptr;
}

NodePtr make_poly(std::vector<std::complex<double>> coeffs) {
  return std::make_shared<PolyNode>(std::move(coeffs));
}

NodePtr make_exp(NodePtr child) { return std::make_shared<ExpNode>(std::move(child)); }

NodePtr make_sum(std::vector<NodePtr> terms) {
  std::vector<NodePtr> flat;
  std::vector<std::complex<double>> poly_acc;
  for (auto& t : terms) {
    if (auto s = dynamic_cast<const SumNode*>(t.get())) {
      for (auto& u : s->terms()) flat.push_back(u);
    } else {
      flat.push_back(t);
    }
  }
  // Fold polynomial terms together.
  std::vector<NodePtr> rest;
  for (auto& t : flat) {
    if (auto p = dynamic_cast<const PolyNode*>(t.get())) {
      if (poly_acc.size() < p->coeffs().size()) poly_acc.resize(p->coeffs().size());
      for (std::size_t i = 0; i < p->coeffs().size(); ++i) poly_acc[i] += p->coeffs()[i];
    } else {
      rest.push_back(t);
    }
  }
  bool poly_nonzero = std::any_of(poly_acc.begin(), poly_acc.end(),
                                  [](auto c) { return c != std::complex<double>(0.0); });
  if (poly_nonzero || rest.empty()) rest.push_back(make_poly(std::move(poly_acc)));
  if (rest.size() == 1) return rest[0];
  return std::make_shared<SumNode>(std::move(rest));
}

NodePtr make_prod(std::vector<NodePtr> factors) {
  std::vector<NodePtr> flat;
  for (auto& f : factors) {
    if (auto p = dynamic_cast<const ProdNode*>(f.get())) {
      for (auto& u : p->factors()) flat.push_back(u);
    } else {
      flat.push_back(f);
    }
  }
  std::complex<double> scalar = 1.0;
  std::vector<NodePtr> rest;
  for (auto& f : flat) {
    if (auto c = constant_of(f)) {
      scalar *= *c;
    } else {
      rest.push_back(f);
    }
  }
  if (scalar == std::complex<double>(0.0) || rest.empty())
    return make_poly({rest.empty() ? scalar : 0.0});
  if (scalar != std::complex<double>(1.0)) rest.insert(rest.begin(), make_poly({scalar}));
  if (rest.size() == 1) return rest[0];
  return std::make_shared<ProdNode>(std::move(rest));
}

}  // namespace
}  // namespace detail

using detail::NodePtr;

struct EntireFunction::State {
  NodePtr root;
  mutable std::mutex mu;
  mutable std::vector<NodePtr> derivative_chain;   // [0] = root
  mutable std::vector<ScaledComplex> series_cache;
};

EntireFunction::EntireFunction() : EntireFunction(detail::make_poly({0.0})) {}

EntireFunction::EntireFunction(NodePtr root) : state_(std::make_shared<State>()) {
  state_->root = std::move(root);
  state_->derivative_chain.push_back(state_->root);
}

EntireFunction EntireFunction::polynomial(std::vector<std::complex<double>> coeffs) {
  return EntireFunction(detail::make_poly(std::move(coeffs)));
}

EntireFunction EntireFunction::constant(std::complex<double> c) {
  return EntireFunction(detail::make_poly({c}));
}

EntireFunction EntireFunction::variable() {
  return EntireFunction(detail::make_poly({0.0, 1.0}));
}

EntireFunction EntireFunction::exp_of(const EntireFunction& f) {
  return EntireFunction(detail::make_exp(f.state_->root));
}

EntireFunction EntireFunction::from_series(std::function<ScaledComplex(std::size_t)> gen,
                                           bool nonnegative_coefficients, std::string label) {
  return EntireFunction(std::make_shared<detail::SeriesNode>(
      std::move(gen), nonnegative_coefficients, std::move(label)));
}

EntireFunction operator+(const EntireFunction& a, const EntireFunction& b) {
  return EntireFunction(detail::make_sum({a.state_->root, b.state_->root}));
}

EntireFunction operator-(const EntireFunction& a, const EntireFunction& b) {
  return a + (-b);
}

EntireFunction operator*(const EntireFunction& a, const EntireFunction& b) {
  return EntireFunction(detail::make_prod({a.state_->root, b.state_->root}));
}

EntireFunction EntireFunction::operator-() const { return scaled(-1.0); }

EntireFunction EntireFunction::scaled(std::complex<double> c) const {
  return EntireFunction(detail::make_prod({detail::make_poly({c}), state_->root}));
}

EntireFunction EntireFunction::pow(int n) const {
  if (n < 0) throw std::invalid_argument("EntireFunction::pow: negative exponent");
  EntireFunction r = constant(1.0);
  for (int i = 0; i < n; ++i) r = r * *this;
  return r;
}

ScaledComplex EntireFunction::eval(std::complex<double> z) const {
  return state_->root->eval(z);
}

std::complex<double> EntireFunction::eval_complex(std::complex<double> z) const {
  return state_->root->eval_complex(z);
}

EntireFunction EntireFunction::derivative(int n) const {
  if (n < 0) throw std::invalid_argument("derivative: order must be nonnegative");
  if (n > depth_cap_) throw std::invalid_argument("derivative: depth cap exceeded");
  std::lock_guard<std::mutex> lk(state_->mu);
  while (static_cast<int>(state_->derivative_chain.size()) <= n)
    state_->derivative_chain.push_back(state_->derivative_chain.back()->derivative());
  EntireFunction d(state_->derivative_chain[n]);
  return d;
}

std::vector<ScaledComplex> EntireFunction::series_coefficients(std::size_t count) const {
  std::lock_guard<std::mutex> lk(state_->mu);
  if (state_->series_cache.size() < count) {
    std::size_t grow = std::max(count, state_->series_cache.size() * 2);
    state_->series_cache = state_->root->series(grow);
  }
  return {state_->series_cache.begin(), state_->series_cache.begin() + count};
}

bool EntireFunction::nonnegative_series() const { return state_->root->nonneg_series(); }
bool EntireFunction::is_transcendental() const { return state_->root->transcendental(); }
bool EntireFunction::is_identically_zero() const { return state_->root->zero(); }

std::string EntireFunction::to_string() const {
  std::ostringstream os;
  state_->root->print(os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Parser: expr := term (('+'|'-') term)*; term := unary ('*' unary)*;
// unary := '-' unary | postfix; postfix := primary ('^' integer)*;
// primary := number | 'z' | 'exp' '(' expr ')' | '(' expr ')'.

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  EntireFunction parse() {
    EntireFunction e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  EntireFunction expr() {
    EntireFunction acc = term();
    for (;;) {
      skip_ws();
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  EntireFunction term() {
    EntireFunction acc = unary();
    for (;;) {
      skip_ws();
      if (accept('*'))
        acc = acc * unary();
      else
        return acc;
    }
  }

  EntireFunction unary() {
    skip_ws();
    if (accept('-')) return -unary();
    return postfix();
  }

  EntireFunction postfix() {
    EntireFunction base = primary();
    for (;;) {
      skip_ws();
      if (!accept('^')) return base;
      skip_ws();
      std::size_t start = pos_;
      int n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        n = n * 10 + (text_[pos_++] - '0');
      if (pos_ == start) fail("expected integer exponent after '^'");
      base = base.pow(n);
    }
  }

  EntireFunction primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      EntireFunction e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      std::string word = text_.substr(start, pos_ - start);
      if (word == "z") return EntireFunction::variable();
      if (word == "i") return EntireFunction::constant({0.0, 1.0});
      if (word == "exp") {
        skip_ws();
        expect('(');
        EntireFunction e = expr();
        expect(')');
        return EntireFunction::exp_of(e);
      }
      pos_ = start;
      fail("unknown identifier '" + word + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
    return {};
  }

  EntireFunction number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
            text_[pos_] == 'e' || text_[pos_] == 'E' ||
            ((text_[pos_] == '+' || text_[pos_] == '-') && pos_ > start &&
             (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
      ++pos_;
    try {
      std::size_t used = 0;
      double v = std::stod(text_.substr(start, pos_ - start), &used);
      if (used != pos_ - start) throw std::invalid_argument("");
      return EntireFunction::constant(v);
    } catch (const std::exception&) {
      pos_ = start;
      fail("malformed numeric literal");
    }
    return {};
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "parse error at position " << pos_ << ": " << msg;
    throw ExprParseError(os.str(), pos_);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

EntireFunction parse_function(const std::string& text) { return Parser(text).parse(); }

}  // namespace growthlab
