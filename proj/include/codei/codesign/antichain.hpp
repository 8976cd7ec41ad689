#pragma once

#include <string>
#include <vector>

#include "codei/codesign/poset.hpp"

namespace codei::codesign {

// One implementation: the catalog choice made in each block, in evaluation order.
using Impl = std::vector<std::string>;

struct Point {
  Elem value;
  std::vector<Impl> impls;
};

struct Antichain {
  PosetPtr poset;
  std::vector<Point> points;  // sorted by value

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  std::vector<Elem> values() const;
};

// Minimal elements; equal values pool their implementations. Idempotent.
Antichain antichain_merge(const PosetPtr& poset, std::vector<Point> points);
// Maximal elements.
Antichain antichain_merge_max(const PosetPtr& poset, std::vector<Point> points);

bool is_antichain(const Antichain& a);
// Upper-set order: every point of b lies above some point of a.
bool upper_leq(const Antichain& a, const Antichain& b);
bool same_values(const Antichain& a, const Antichain& b);
std::string to_string(const Antichain& a);

}  // namespace codei::codesign
