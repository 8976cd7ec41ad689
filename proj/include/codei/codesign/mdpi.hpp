#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "codei/codesign/antichain.hpp"

namespace codei::codesign {

// Monotone design problem with implementations.
struct Mdpi {
  std::string name;
  PosetPtr F, R;
  std::function<Antichain(const Elem&)> h;       // functionality -> minimal resources
  std::function<Antichain(const Elem&)> h_dual;  // resources -> maximal functionality; may be empty
  std::vector<Elem> f_universe;                   // finite functionality grid, may be empty
};

struct CatalogEntry {
  Elem f;
  Elem r;
  std::string impl;
};

// h(f) = Min{ r_i : f <= f_i },  h'(r) = Max{ f_i : r_i <= r }.
Mdpi catalog_mdpi(const std::string& name, PosetPtr F, PosetPtr R, std::vector<CatalogEntry> entries);
Mdpi identity_mdpi(const std::string& name, PosetPtr P);
// h(f) = {g(f)} for a monotone g; g_dual(r) lists the maximal f with g(f) <= r.
Mdpi function_mdpi(const std::string& name, PosetPtr F, PosetPtr R, std::function<Elem(const Elem&)> g,
                   std::function<std::vector<Elem>(const Elem&)> g_dual = {});
// Caches h and h_dual per argument; thread-safe.
Mdpi memoized(Mdpi d);

class PosetMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& loop, int iterations);
  std::string loop;
  int iterations;
};

Mdpi compose_series(const Mdpi& a, const Mdpi& b);
Mdpi compose_parallel(const Mdpi& a, const Mdpi& b);

// d : F0 x X -> R0 x X. Kleene ascent from the bottom of R0 x X.
struct KleeneResult {
  Antichain fixed_point;  // over R0 x X
  int iterations = 0;
};
KleeneResult kleene(const Mdpi& d, const Elem& f0, int cap = 10000);
// Closes the X feedback of d, giving F0 -> R0.
Mdpi compose_loop(const Mdpi& d, int cap = 10000);

Antichain fix_fun_min_res(const Mdpi& d, const Elem& f);
// Uses h_dual when present, otherwise scans f_universe.
Antichain fix_res_max_fun(const Mdpi& d, const Elem& r);

}  // namespace codei::codesign
