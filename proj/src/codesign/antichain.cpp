#include "codei/codesign/antichain.hpp"

#include <algorithm>

namespace codei::codesign {

std::vector<Elem> Antichain::values() const {
  std::vector<Elem> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.value);
  return out;
}

namespace {

void pool(std::vector<Impl>& into, std::vector<Impl>&& from) {
  for (auto& i : from) into.push_back(std::move(i));
  std::sort(into.begin(), into.end());
  into.erase(std::unique(into.begin(), into.end()), into.end());
}

template <class Below>
Antichain merge(const PosetPtr& poset, std::vector<Point> points, Below below) {
  std::sort(points.begin(), points.end(),
            [](const Point& a, const Point& b) { return a.value < b.value; });
  std::vector<Point> uniq;
  for (auto& p : points) {
    if (!uniq.empty() && uniq.back().value == p.value) {
      pool(uniq.back().impls, std::move(p.impls));
      continue;
    }
    uniq.push_back(std::move(p));
    std::sort(uniq.back().impls.begin(), uniq.back().impls.end());
    auto& im = uniq.back().impls;
    im.erase(std::unique(im.begin(), im.end()), im.end());
  }
  Antichain out{poset, {}};
  std::vector<char> keep(uniq.size(), 1);
  for (std::size_t i = 0; i < uniq.size(); ++i)
    for (std::size_t j = 0; j < uniq.size() && keep[i]; ++j)
      keep[i] = !(j != i && below(uniq[j].value, uniq[i].value));
  for (std::size_t i = 0; i < uniq.size(); ++i)
    if (keep[i]) out.points.push_back(std::move(uniq[i]));
  return out;
}

}  // namespace

Antichain antichain_merge(const PosetPtr& poset, std::vector<Point> points) {
  return merge(poset, std::move(points),
               [&](const Elem& a, const Elem& b) { return poset->leq(a, b); });
}

Antichain antichain_merge_max(const PosetPtr& poset, std::vector<Point> points) {
  return merge(poset, std::move(points),
               [&](const Elem& a, const Elem& b) { return poset->leq(b, a); });
}

bool is_antichain(const Antichain& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i != j && a.poset->leq(a.points[i].value, a.points[j].value)) return false;
  return true;
}

bool upper_leq(const Antichain& a, const Antichain& b) {
  for (const auto& q : b.points) {
    bool ok = false;
    for (const auto& p : a.points) ok = ok || a.poset->leq(p.value, q.value);
    if (!ok) return false;
  }
  return true;
}

bool same_values(const Antichain& a, const Antichain& b) { return a.values() == b.values(); }

std::string to_string(const Antichain& a) {
  std::string s = "{";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "; " : "") + a.points[i].value.str();
  return s + "}";
}

}  // namespace codei::codesign
