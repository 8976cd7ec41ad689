#include "codei/codesign/mdpi.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace codei::codesign {

namespace {

std::vector<Impl> cross(const std::vector<Impl>& a, const std::vector<Impl>& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<Impl> out;
  for (const auto& x : a)
    for (const auto& y : b) {
      Impl z = x;
      z.insert(z.end(), y.begin(), y.end());
      out.push_back(std::move(z));
    }
  return out;
}

}  // namespace

DivergenceError::DivergenceError(const std::string& l, int it)
    : std::runtime_error("loop '" + l + "' did not converge within " + std::to_string(it) +
                         " Kleene iterations"),
      loop(l),
      iterations(it) {}

Mdpi catalog_mdpi(const std::string& name, PosetPtr F, PosetPtr R, std::vector<CatalogEntry> entries) {
  auto e = std::make_shared<const std::vector<CatalogEntry>>(std::move(entries));
  Mdpi d{name, F, R, {}, {}, {}};
  d.h = [=](const Elem& f) {
    std::vector<Point> pts;
    for (const auto& c : *e)
      if (F->leq(f, c.f)) pts.push_back({c.r, {{name + "=" + c.impl}}});
    return antichain_merge(R, std::move(pts));
  };
  d.h_dual = [=](const Elem& r) {
    std::vector<Point> pts;
    for (const auto& c : *e)
      if (R->leq(c.r, r)) pts.push_back({c.f, {{name + "=" + c.impl}}});
    return antichain_merge_max(F, std::move(pts));
  };
  for (const auto& c : *e) d.f_universe.push_back(c.f);
  return d;
}

Mdpi identity_mdpi(const std::string& name, PosetPtr P) {
  Mdpi d{name, P, P, {}, {}, {}};
  d.h = [P](const Elem& f) { return Antichain{P, {{f, {}}}}; };
  d.h_dual = d.h;
  return d;
}

Mdpi function_mdpi(const std::string& name, PosetPtr F, PosetPtr R, std::function<Elem(const Elem&)> g,
                   std::function<std::vector<Elem>(const Elem&)> g_dual) {
  Mdpi d{name, F, R, {}, {}, {}};
  d.h = [R, g](const Elem& f) { return Antichain{R, {{g(f), {}}}}; };
  if (g_dual)
    d.h_dual = [F, g_dual](const Elem& r) {
      std::vector<Point> pts;
      for (auto& f : g_dual(r)) pts.push_back({std::move(f), {}});
      return antichain_merge_max(F, std::move(pts));
    };
  return d;
}

Mdpi memoized(Mdpi d) {
  struct Cache {
    std::mutex m;
    std::map<Elem, Antichain> h, hd;
  };
  auto cache = std::make_shared<Cache>();
  auto wrap = [cache](std::function<Antichain(const Elem&)> fn, bool dual) {
    return [cache, fn, dual](const Elem& x) {
      auto& tab = dual ? cache->hd : cache->h;
      {
        std::lock_guard<std::mutex> lock(cache->m);
        auto it = tab.find(x);
        if (it != tab.end()) return it->second;
      }
      Antichain v = fn(x);
      std::lock_guard<std::mutex> lock(cache->m);
      return tab.emplace(x, std::move(v)).first->second;
    };
  };
  if (d.h) d.h = wrap(d.h, false);
  if (d.h_dual) d.h_dual = wrap(d.h_dual, true);
  return d;
}

Mdpi compose_series(const Mdpi& a, const Mdpi& b) {
  if (!same_poset(a.R, b.F))
    throw PosetMismatch("series " + a.name + " ; " + b.name + ": " + a.R->name() + " vs " +
                        b.F->name());
  Mdpi d{a.name + ";" + b.name, a.F, b.R, {}, {}, a.f_universe};
  d.h = [a, b](const Elem& f) {
    std::vector<Point> pts;
    for (const auto& p : a.h(f).points)
      for (const auto& q : b.h(p.value).points) pts.push_back({q.value, cross(p.impls, q.impls)});
    return antichain_merge(b.R, std::move(pts));
  };
  if (a.h_dual && b.h_dual)
    d.h_dual = [a, b](const Elem& r) {
      std::vector<Point> pts;
      for (const auto& q : b.h_dual(r).points)
        for (const auto& p : a.h_dual(q.value).points)
          pts.push_back({p.value, cross(p.impls, q.impls)});
      return antichain_merge_max(a.F, std::move(pts));
    };
  return d;
}

Mdpi compose_parallel(const Mdpi& a, const Mdpi& b) {
  auto F = product({a.F, b.F}), R = product({a.R, b.R});
  Mdpi d{a.name + "|" + b.name, F, R, {}, {}, {}};
  auto pair = [](const std::function<Antichain(const Elem&)>& ha,
                 const std::function<Antichain(const Elem&)>& hb, const Elem& x, const PosetPtr& P,
                 bool max) {
    std::vector<Point> pts;
    auto A = ha(x[0]), B = hb(x[1]);
    for (const auto& p : A.points)
      for (const auto& q : B.points)
        pts.push_back({Elem::tuple({p.value, q.value}), cross(p.impls, q.impls)});
    return max ? antichain_merge_max(P, std::move(pts)) : antichain_merge(P, std::move(pts));
  };
  d.h = [a, b, R, pair](const Elem& f) { return pair(a.h, b.h, f, R, false); };
  if (a.h_dual && b.h_dual)
    d.h_dual = [a, b, F, pair](const Elem& r) { return pair(a.h_dual, b.h_dual, r, F, true); };
  for (const auto& x : a.f_universe)
    for (const auto& y : b.f_universe) d.f_universe.push_back(Elem::tuple({x, y}));
  return d;
}

KleeneResult kleene(const Mdpi& d, const Elem& f0, int cap) {
  const auto& fx = product_parts(d.F);
  const auto& rx = product_parts(d.R);
  if (fx.size() != 2 || rx.size() != 2 || !same_poset(fx[1], rx[1]))
    throw PosetMismatch("loop " + d.name + ": feedback posets differ");
  auto bottom = d.R->bottom();
  if (!bottom) throw PosetMismatch("loop " + d.name + ": resource poset has no bottom");

  Antichain S{d.R, {{*bottom, {}}}};
  for (int it = 1; it <= cap; ++it) {
    std::vector<Point> next;
    for (const auto& s : S.points)
      for (const auto& p : d.h(Elem::tuple({f0, s.value[1]})).points)
        if (auto j = d.R->join(p.value, s.value)) next.push_back({*j, {}});
    Antichain T = antichain_merge(d.R, std::move(next));
    if (same_values(T, S)) {
      // Every fixed-point element is above some design evaluated at its own feedback value.
      for (auto& s : T.points)
        for (const auto& p : d.h(Elem::tuple({f0, s.value[1]})).points)
          if (d.R->leq(p.value, s.value)) s.impls.insert(s.impls.end(), p.impls.begin(), p.impls.end());
      return {antichain_merge(d.R, std::move(T.points)), it};
    }
    S = std::move(T);
  }
  throw DivergenceError(d.name, cap);
}

Mdpi compose_loop(const Mdpi& d, int cap) {
  const auto F0 = product_parts(d.F).at(0), R0 = product_parts(d.R).at(0);
  Mdpi out{"loop(" + d.name + ")", F0, R0, {}, {}, {}};
  out.h = [d, R0, cap](const Elem& f) {
    std::vector<Point> pts;
    for (auto& s : kleene(d, f, cap).fixed_point.points) pts.push_back({s.value[0], std::move(s.impls)});
    return antichain_merge(R0, std::move(pts));
  };
  return out;
}

Antichain fix_fun_min_res(const Mdpi& d, const Elem& f) { return d.h(f); }

Antichain fix_res_max_fun(const Mdpi& d, const Elem& r) {
  if (d.h_dual) return d.h_dual(r);
  if (d.f_universe.empty())
    throw std::logic_error(d.name + ": no dual map and no functionality grid");
  std::vector<Point> pts;
  for (const auto& f : d.f_universe)
    for (const auto& p : d.h(f).points)
      if (d.R->leq(p.value, r)) pts.push_back({f, p.impls});
  return antichain_merge_max(d.F, std::move(pts));
}

}  // namespace codei::codesign
