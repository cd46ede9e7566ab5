#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "alexlab/cli.hpp"
#include "alexlab/error.hpp"

namespace alexlab::cli {

// ------------------------------------------------------------- expressions

struct Expression::Node {
  enum Kind { Constant, Variable, Negate, Binary, Call } kind = Constant;
  double value = 0.0;
  int index = -1;
  char op = 0;
  std::string function;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::Config, "expression '" + s_ + "': " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Expression::Node::Binary;
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (accept('+')) n = binary('+', n, product());
      else if (accept('-')) n = binary('-', n, product());
      else return n;
    }
  }

  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = binary('*', n, unary());
      else if (accept('/')) n = binary('/', n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Expression::Node>();
      n->kind = Expression::Node::Negate;
      n->args = {unary()};
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    // right associative, binds tighter than unary minus on its left
    if (accept('^')) return binary('^', base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end");
    if (accept('(')) {
      NodePtr n = sum();
      if (!accept(')')) error("missing ')'");
      return n;
    }
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        error("bad number");
      }
      pos_ += used;
      auto n = std::make_shared<Expression::Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (accept('(')) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Expression::Node::Call;
        n->function = name;
        if (!accept(')')) {
          do n->args.push_back(sum());
          while (accept(','));
          if (!accept(')')) error("missing ')' after arguments of " + name);
        }
        static const std::map<std::string, std::size_t> arity = {
            {"sin", 1}, {"cos", 1}, {"tan", 1}, {"exp", 1}, {"log", 1}, {"sqrt", 1},
            {"abs", 1}, {"atan2", 2}, {"min", 2}, {"max", 2}, {"pow", 2}};
        auto it = arity.find(name);
        if (it == arity.end()) error("unknown function " + name);
        if (it->second != n->args.size()) error(name + " takes " + std::to_string(it->second) + " arguments");
        return n;
      }
      auto n = std::make_shared<Expression::Node>();
      if (name == "pi") {
        n->value = std::numbers::pi;
        return n;
      }
      if (name == "e") {
        n->value = std::numbers::e;
        return n;
      }
      for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == name) {
          n->kind = Expression::Node::Variable;
          n->index = static_cast<int>(i);
          return n;
        }
      error("unknown name " + name);
    }
    error("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

double evaluate(const Expression::Node& n, const std::vector<double>& v) {
  switch (n.kind) {
    case Expression::Node::Constant:
      return n.value;
    case Expression::Node::Variable:
      return v.at(n.index);
    case Expression::Node::Negate:
      return -evaluate(*n.args[0], v);
    case Expression::Node::Binary: {
      double a = evaluate(*n.args[0], v), b = evaluate(*n.args[1], v);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        default: return std::pow(a, b);
      }
    }
    case Expression::Node::Call: {
      double a = evaluate(*n.args[0], v);
      double b = n.args.size() > 1 ? evaluate(*n.args[1], v) : 0.0;
      const std::string& f = n.function;
      if (f == "sin") return std::sin(a);
      if (f == "cos") return std::cos(a);
      if (f == "tan") return std::tan(a);
      if (f == "exp") return std::exp(a);
      if (f == "log") return std::log(a);
      if (f == "sqrt") return std::sqrt(a);
      if (f == "abs") return std::abs(a);
      if (f == "atan2") return std::atan2(a, b);
      if (f == "min") return std::min(a, b);
      if (f == "max") return std::max(a, b);
      return std::pow(a, b);
    }
  }
  return 0.0;
}

bool mentions(const Expression::Node& n, int variable) {
  if (n.kind == Expression::Node::Variable) return n.index == variable;
  for (const auto& a : n.args)
    if (mentions(*a, variable)) return true;
  return false;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(text, variables).parse();
  return e;
}

bool Expression::uses(int variable) const { return mentions(*root_, variable); }

double Expression::operator()(const std::vector<double>& values) const {
  return evaluate(*root_, values);
}

// ------------------------------------------------------------------ config

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.origin_ = origin;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  auto bad = [&](const std::string& what) {
    fail(ErrorCode::Config, origin + ":" + std::to_string(line) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') bad("unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty() || section.find_first_of(" .=") != std::string::npos) bad("invalid section name");
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) bad("expected 'key = value'");
    std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty() || key.find_first_of(" .[]") != std::string::npos) bad("invalid key '" + key + "'");
    if (section.empty()) bad("field '" + key + "' outside a section");
    if (value.empty()) bad("field '" + section + "." + key + "' has no value");
    std::string field = section + "." + key;
    if (c.entries_.count(field)) bad("field '" + field + "' given twice");
    c.entries_[field] = {value, line};
    c.order_.push_back(field);
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Config, path + ": cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

bool Config::has(const std::string& field) const { return entries_.count(field) > 0; }

const Config::Entry& Config::entry(const std::string& field) const {
  auto it = entries_.find(field);
  if (it == entries_.end()) fail(ErrorCode::Config, origin_ + ": missing field '" + field + "'");
  used_.insert(field);
  return it->second;
}

void Config::error(const std::string& field, const std::string& message) const {
  auto it = entries_.find(field);
  std::string where = it == entries_.end() ? origin_ : origin_ + ":" + std::to_string(it->second.line);
  fail(ErrorCode::Config, where + ": field '" + field + "': " + message);
}

std::string Config::text(const std::string& field) const { return entry(field).value; }

std::string Config::text(const std::string& field, const std::string& fallback) const {
  return has(field) ? text(field) : fallback;
}

double Config::number(const std::string& field) const {
  const Entry& e = entry(field);
  double v = 0;
  try {
    v = Expression::parse(e.value, {})();
  } catch (const Error& err) {
    error(field, err.what());
  }
  if (!std::isfinite(v)) error(field, "value is not finite");
  return v;
}

double Config::number(const std::string& field, double fallback) const {
  return has(field) ? number(field) : fallback;
}

int Config::integer(const std::string& field, int fallback) const {
  if (!has(field)) return fallback;
  double v = number(field);
  if (v != std::round(v) || std::abs(v) > 1e9) error(field, "expected an integer");
  return static_cast<int>(v);
}

bool Config::boolean(const std::string& field, bool fallback) const {
  if (!has(field)) return fallback;
  std::string v = text(field);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  error(field, "expected true or false");
}

std::vector<double> Config::numbers(const std::string& field) const {
  const Entry& e = entry(field);
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(Expression::parse(trim(item), {})());
    } catch (const Error& err) {
      error(field, err.what());
    }
    if (!std::isfinite(out.back())) error(field, "value is not finite");
  }
  if (out.empty()) error(field, "empty list");
  return out;
}

std::vector<double> Config::numbers(const std::string& field, const std::vector<double>& fallback) const {
  return has(field) ? numbers(field) : fallback;
}

Expression Config::expression(const std::string& field, const std::vector<std::string>& variables) const {
  const Entry& e = entry(field);
  try {
    return Expression::parse(e.value, variables);
  } catch (const Error& err) {
    error(field, err.what());
  }
}

double Config::positive(const std::string& field) const {
  double v = number(field);
  if (!(v > 0)) error(field, "must be positive");
  return v;
}

double Config::positive(const std::string& field, double fallback) const {
  return has(field) ? positive(field) : fallback;
}

void Config::reject_unused() const {
  for (const std::string& field : order_)
    if (!used_.count(field)) error(field, "unknown field");
}

nlohmann::ordered_json Config::dump() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const std::string& field : order_) j[field] = entries_.at(field).value;
  return j;
}

}  // namespace alexlab::cli
