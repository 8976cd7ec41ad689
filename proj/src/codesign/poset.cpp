#include "codei/codesign/poset.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace codei::codesign {

Elem Elem::number(double v) {
  Elem e;
  e.kind_ = Kind::number;
  e.v_ = v;
  return e;
}

Elem Elem::token(std::string t) {
  Elem e;
  e.kind_ = Kind::token;
  e.t_ = std::move(t);
  return e;
}

Elem Elem::set(std::vector<std::string> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  Elem e;
  e.kind_ = Kind::set;
  e.items_ = std::move(items);
  return e;
}

Elem Elem::tuple(std::vector<Elem> parts) {
  Elem e;
  e.kind_ = Kind::tuple;
  e.parts_ = std::move(parts);
  return e;
}

namespace {
void expect(bool ok, const char* what) {
  if (!ok) throw std::logic_error(std::string("Elem: not a ") + what);
}
}  // namespace

double Elem::num() const {
  expect(kind_ == Kind::number, "number");
  return v_;
}
const std::string& Elem::tok() const {
  expect(kind_ == Kind::token, "token");
  return t_;
}
const std::vector<std::string>& Elem::items() const {
  expect(kind_ == Kind::set, "set");
  return items_;
}
const std::vector<Elem>& Elem::parts() const {
  expect(kind_ == Kind::tuple, "tuple");
  return parts_;
}

std::string Elem::str() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::number:
      os.precision(12);
      os << v_;
      break;
    case Kind::token:
      os << (t_.empty() ? "_" : t_);
      break;
    case Kind::set:
      os << "{";
      for (std::size_t i = 0; i < items_.size(); ++i) os << (i ? "," : "") << items_[i];
      os << "}";
      break;
    case Kind::tuple:
      os << "(";
      for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? ", " : "") << parts_[i].str();
      os << ")";
      break;
  }
  return os.str();
}

bool operator==(const Elem& a, const Elem& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Elem::Kind::number: return a.v_ == b.v_;
    case Elem::Kind::token: return a.t_ == b.t_;
    case Elem::Kind::set: return a.items_ == b.items_;
    case Elem::Kind::tuple: return a.parts_ == b.parts_;
  }
  return false;
}

bool operator<(const Elem& a, const Elem& b) {
  if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
  switch (a.kind_) {
    case Elem::Kind::number: return a.v_ < b.v_;
    case Elem::Kind::token: return a.t_ < b.t_;
    case Elem::Kind::set: return a.items_ < b.items_;
    case Elem::Kind::tuple: return a.parts_ < b.parts_;
  }
  return false;
}

namespace {

class Numeric : public Poset {
 public:
  Numeric(std::string unit, double lo, double hi) : unit_(std::move(unit)), lo_(lo), hi_(hi) {}
  std::string name() const override { return "R[" + unit_ + "]"; }
  bool leq(const Elem& a, const Elem& b) const override { return a.num() <= b.num(); }
  std::optional<Elem> join(const Elem& a, const Elem& b) const override {
    return Elem::number(std::max(a.num(), b.num()));
  }
  std::optional<Elem> bottom() const override { return Elem::number(lo_); }
  std::optional<Elem> top() const override { return Elem::number(hi_); }

 private:
  std::string unit_;
  double lo_, hi_;
};

class Opposite : public Poset {
 public:
  explicit Opposite(PosetPtr p) : p_(std::move(p)) {}
  std::string name() const override { return "op(" + p_->name() + ")"; }
  bool leq(const Elem& a, const Elem& b) const override { return p_->leq(b, a); }
  std::optional<Elem> join(const Elem& a, const Elem& b) const override {
    // Join in the opposite order is the meet of the original; available for chains.
    if (p_->leq(a, b)) return a;
    if (p_->leq(b, a)) return b;
    return std::nullopt;
  }
  std::optional<Elem> bottom() const override { return p_->top(); }
  std::optional<Elem> top() const override { return p_->bottom(); }

 private:
  PosetPtr p_;
};

class SetInclusion : public Poset {
 public:
  SetInclusion(std::string name, std::optional<std::vector<std::string>> universe)
      : name_(std::move(name)) {
    if (universe) universe_ = Elem::set(*universe);
  }
  std::string name() const override { return "P(" + name_ + ")"; }
  bool leq(const Elem& a, const Elem& b) const override {
    return std::includes(b.items().begin(), b.items().end(), a.items().begin(), a.items().end());
  }
  std::optional<Elem> join(const Elem& a, const Elem& b) const override {
    std::vector<std::string> u;
    std::set_union(a.items().begin(), a.items().end(), b.items().begin(), b.items().end(),
                   std::back_inserter(u));
    return Elem::set(std::move(u));
  }
  std::optional<Elem> bottom() const override { return Elem::set({}); }
  std::optional<Elem> top() const override { return universe_; }

 private:
  std::string name_;
  std::optional<Elem> universe_;
};

class Discrete : public Poset {
 public:
  explicit Discrete(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return "D(" + name_ + ")"; }
  bool leq(const Elem& a, const Elem& b) const override { return a == b; }
  std::optional<Elem> join(const Elem& a, const Elem& b) const override {
    if (a == b) return a;
    return std::nullopt;
  }
  std::optional<Elem> bottom() const override { return std::nullopt; }

 private:
  std::string name_;
};

class Flat : public Poset {
 public:
  explicit Flat(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return "Flat(" + name_ + ")"; }
  bool leq(const Elem& a, const Elem& b) const override { return a.tok().empty() || a == b; }
  std::optional<Elem> join(const Elem& a, const Elem& b) const override {
    if (a.tok().empty()) return b;
    if (b.tok().empty() || a == b) return a;
    return std::nullopt;
  }
  std::optional<Elem> bottom() const override { return Elem::token(kFlatBottom); }

 private:
  std::string name_;
};

class Product : public Poset {
 public:
  explicit Product(std::vector<PosetPtr> parts) : parts_(std::move(parts)) {}
  std::string name() const override {
    std::string s = "(";
    for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? " x " : "") + parts_[i]->name();
    return s + ")";
  }
  bool leq(const Elem& a, const Elem& b) const override {
    const auto &pa = a.parts(), &pb = b.parts();
    if (pa.size() != parts_.size() || pb.size() != parts_.size())
      throw std::invalid_argument("product poset " + name() + ": arity mismatch comparing " + a.str() +
                                  " and " + b.str());
    for (std::size_t i = 0; i < parts_.size(); ++i)
      if (!parts_[i]->leq(pa[i], pb[i])) return false;
    return true;
  }
  std::optional<Elem> join(const Elem& a, const Elem& b) const override {
    std::vector<Elem> out;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      auto j = parts_[i]->join(a[i], b[i]);
      if (!j) return std::nullopt;
      out.push_back(*j);
    }
    return Elem::tuple(std::move(out));
  }
  std::optional<Elem> bottom() const override {
    std::vector<Elem> out;
    for (const auto& p : parts_) {
      auto b = p->bottom();
      if (!b) return std::nullopt;
      out.push_back(*b);
    }
    return Elem::tuple(std::move(out));
  }
  std::optional<Elem> top() const override {
    std::vector<Elem> out;
    for (const auto& p : parts_) {
      auto t = p->top();
      if (!t) return std::nullopt;
      out.push_back(*t);
    }
    return Elem::tuple(std::move(out));
  }
  const std::vector<PosetPtr>& parts() const { return parts_; }

 private:
  std::vector<PosetPtr> parts_;
};

class Custom : public Poset {
 public:
  Custom(std::string name, std::function<bool(const Elem&, const Elem&)> leq, Elem bottom)
      : name_(std::move(name)), leq_(std::move(leq)), bottom_(std::move(bottom)) {}
  std::string name() const override { return name_; }
  bool leq(const Elem& a, const Elem& b) const override {
    return a == b || a == bottom_ || leq_(a, b);
  }
  std::optional<Elem> join(const Elem& a, const Elem& b) const override {
    if (a == bottom_ || leq(a, b)) return b;
    if (b == bottom_ || leq(b, a)) return a;
    return std::nullopt;
  }
  std::optional<Elem> bottom() const override { return bottom_; }

 private:
  std::string name_;
  std::function<bool(const Elem&, const Elem&)> leq_;
  Elem bottom_;
};

}  // namespace

PosetPtr numeric(const std::string& unit, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("numeric poset: lo > hi");
  return std::make_shared<Numeric>(unit, lo, hi);
}
PosetPtr opposite(PosetPtr p) { return std::make_shared<Opposite>(std::move(p)); }
PosetPtr set_inclusion(const std::string& name, std::optional<std::vector<std::string>> universe) {
  return std::make_shared<SetInclusion>(name, std::move(universe));
}
PosetPtr discrete(const std::string& name) { return std::make_shared<Discrete>(name); }
PosetPtr flat(const std::string& name) { return std::make_shared<Flat>(name); }
PosetPtr product(std::vector<PosetPtr> parts) { return std::make_shared<Product>(std::move(parts)); }
PosetPtr custom(const std::string& name, std::function<bool(const Elem&, const Elem&)> leq,
                Elem bottom) {
  return std::make_shared<Custom>(name, std::move(leq), std::move(bottom));
}

bool same_poset(const PosetPtr& a, const PosetPtr& b) { return a == b || a->name() == b->name(); }

const std::vector<PosetPtr>& product_parts(const PosetPtr& p) {
  auto prod = dynamic_cast<const Product*>(p.get());
  if (!prod) throw std::invalid_argument("not a product poset: " + p->name());
  return prod->parts();
}

}  // namespace codei::codesign
