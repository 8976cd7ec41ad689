#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace codei::codesign {

// Element of some poset: a number, a token, a finite set of names, or a tuple.
class Elem {
 public:
  enum class Kind { number, token, set, tuple };

  Elem() = default;  // the number 0
  static Elem number(double v);
  static Elem token(std::string t);
  static Elem set(std::vector<std::string> items);  // sorted, deduplicated
  static Elem tuple(std::vector<Elem> parts);

  Kind kind() const { return kind_; }
  double num() const;
  const std::string& tok() const;
  const std::vector<std::string>& items() const;
  const std::vector<Elem>& parts() const;
  const Elem& operator[](std::size_t i) const { return parts().at(i); }

  std::string str() const;

  friend bool operator==(const Elem& a, const Elem& b);
  friend bool operator<(const Elem& a, const Elem& b);  // total order for canonical output

 private:
  Kind kind_ = Kind::number;
  double v_ = 0.0;
  std::string t_;
  std::vector<std::string> items_;
  std::vector<Elem> parts_;
};

class Poset {
 public:
  virtual ~Poset() = default;
  virtual std::string name() const = 0;
  virtual bool leq(const Elem& a, const Elem& b) const = 0;
  // Least upper bound; nullopt when a and b have no common upper bound.
  virtual std::optional<Elem> join(const Elem& a, const Elem& b) const = 0;
  virtual std::optional<Elem> bottom() const = 0;
  virtual std::optional<Elem> top() const { return std::nullopt; }
};

using PosetPtr = std::shared_ptr<const Poset>;

// [lo, hi] with the usual order; bottom lo, top hi.
PosetPtr numeric(const std::string& unit, double lo = 0.0,
                 double hi = std::numeric_limits<double>::infinity());
PosetPtr opposite(PosetPtr p);
// Finite subsets of an optional universe by inclusion.
PosetPtr set_inclusion(const std::string& name, std::optional<std::vector<std::string>> universe = {});
// Tokens with equality only.
PosetPtr discrete(const std::string& name);
// Tokens above a bottom token "" and otherwise incomparable.
PosetPtr flat(const std::string& name);
PosetPtr product(std::vector<PosetPtr> parts);
// Order supplied by a callback; joins only exist against the bottom or between equal elements.
PosetPtr custom(const std::string& name, std::function<bool(const Elem&, const Elem&)> leq,
                Elem bottom);

bool same_poset(const PosetPtr& a, const PosetPtr& b);
const std::vector<PosetPtr>& product_parts(const PosetPtr& p);  // throws unless a product

inline constexpr const char* kFlatBottom = "";

}  // namespace codei::codesign
