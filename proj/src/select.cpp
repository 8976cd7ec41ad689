#include "codei/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace codei::select {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tol(double x) { return std::isfinite(x) ? 1e-12 * std::max(1.0, std::abs(x)) : 0.0; }

std::vector<int> first_primes(int n) {
  std::vector<int> p;
  for (int c = 2; static_cast<int>(p.size()) < n; ++c) {
    bool prime = true;
    for (int q : p) {
      if (q * q > c) break;
      if (c % q == 0) prime = false;
    }
    if (prime) p.push_back(c);
  }
  return p;
}

// Depth-first branch and bound over "which candidate covers this atom".
class Search {
 public:
  Search(const CoverInstance& inst, std::vector<double> wc)
      : inst_(inst), wc_(std::move(wc)), row_of_(inst.n_candidates(), 0) {
    for (std::size_t r = 0; r < inst.f_rows.size(); ++r)
      for (auto l = inst.f_rows[r].find_first(); l != Bits::npos; l = inst.f_rows[r].find_next(l))
        row_of_[l] = r;
    reset();
  }

  // Cheapest cover, seeded with the greedy cover as incumbent.
  std::optional<double> optimize() {
    reset();
    exists_mode_ = false;
    best_ = kInf;
    greedy();
    dfs(0.0);
    if (!std::isfinite(best_)) return std::nullopt;
    return best_;
  }

  // Is there a cover containing `in`, avoiding `out`, with cost <= limit?
  bool exists(const std::vector<std::size_t>& in, const Bits& out, double limit) {
    reset();
    exists_mode_ = true;
    found_ = false;
    limit_ = limit;
    excluded_ = out;
    double cost = 0.0;
    for (std::size_t l : in) {
      if (excluded_[l] || row_used_[row_of_[l]]) return false;
      take(l);
      cost += wc_[l];
    }
    dfs(cost);
    return found_;
  }

 private:
  void reset() {
    chosen_.assign(inst_.n_candidates(), false);
    excluded_ = Bits(inst_.n_candidates());
    covered_ = Bits(inst_.n_atoms());
    row_used_.assign(inst_.f_rows.size(), false);
  }

  bool available(std::size_t l) const {
    return !chosen_[l] && !excluded_[l] && !row_used_[row_of_[l]];
  }

  void take(std::size_t l) {
    chosen_[l] = true;
    row_used_[row_of_[l]] = true;
    covered_ |= inst_.covers[l];
  }

  void greedy() {
    double cost = 0.0;
    while (!covered_.all()) {
      std::size_t pick = inst_.n_candidates();
      double best_ratio = kInf;
      for (std::size_t l = 0; l < inst_.n_candidates(); ++l) {
        if (!available(l)) continue;
        auto gain = (inst_.covers[l] - covered_).count();
        if (gain == 0) continue;
        double r = wc_[l] / gain;
        if (r < best_ratio) best_ratio = r, pick = l;
      }
      if (pick == inst_.n_candidates()) break;
      take(pick);
      cost += wc_[pick];
    }
    if (covered_.all()) best_ = cost;
    reset();
  }

  void dfs(double cost) {
    if (covered_.all()) {
      if (exists_mode_) {
        found_ = cost <= limit_ + tol(limit_);
      } else if (cost < best_ - tol(best_)) {
        best_ = cost;
      }
      return;
    }
    const Bits uncovered = ~covered_;
    const std::size_t n_atoms = inst_.n_atoms();
    std::vector<double> min_ratio(n_atoms, kInf);
    std::vector<int> n_cover(n_atoms, 0);
    std::vector<double> ratio(inst_.n_candidates(), kInf);
    for (std::size_t l = 0; l < inst_.n_candidates(); ++l) {
      if (!available(l)) continue;
      Bits gain = inst_.covers[l] & uncovered;
      auto cnt = gain.count();
      if (cnt == 0) continue;
      ratio[l] = wc_[l] / cnt;
      for (auto n = gain.find_first(); n != Bits::npos; n = gain.find_next(n)) {
        min_ratio[n] = std::min(min_ratio[n], ratio[l]);
        ++n_cover[n];
      }
    }
    double lb = cost;
    std::size_t branch_atom = n_atoms;
    for (auto n = uncovered.find_first(); n != Bits::npos; n = uncovered.find_next(n)) {
      if (n_cover[n] == 0) return;
      lb += min_ratio[n];
      if (branch_atom == n_atoms || n_cover[n] < n_cover[branch_atom]) branch_atom = n;
    }
    if (exists_mode_ ? lb > limit_ + tol(limit_) : lb >= best_ - tol(best_)) return;

    std::vector<std::size_t> options;
    for (std::size_t l = 0; l < inst_.n_candidates(); ++l)
      if (std::isfinite(ratio[l]) && inst_.covers[l][branch_atom]) options.push_back(l);
    std::stable_sort(options.begin(), options.end(),
                     [&](std::size_t a, std::size_t b) { return ratio[a] < ratio[b]; });

    const Bits saved_cover = covered_;
    for (std::size_t l : options) {
      take(l);
      dfs(cost + wc_[l]);
      chosen_[l] = false;
      row_used_[row_of_[l]] = false;
      covered_ = saved_cover;
      if (found_ && exists_mode_) break;
      excluded_[l] = true;
    }
    for (std::size_t l : options) excluded_[l] = false;
  }

  const CoverInstance& inst_;
  std::vector<double> wc_;
  std::vector<std::size_t> row_of_;
  std::vector<bool> chosen_;
  Bits excluded_, covered_;
  std::vector<bool> row_used_;
  bool exists_mode_ = false, found_ = false;
  double best_ = kInf, limit_ = 0.0;
};

}  // namespace

bool CoverageSet::contains(const ReqKey& k, const Cell& c) const {
  auto it = entries.find(k);
  return it != entries.end() && it->second.contains(c);
}

std::size_t CoverInstance::n_costs() const {
  return candidates.empty() ? 0 : candidates.front().cost.size();
}

CoverInstance make_instance(std::vector<Atom> atoms, std::vector<Candidate> candidates,
                            std::vector<Bits> covers) {
  if (covers.size() != candidates.size())
    throw std::invalid_argument("make_instance: one coverage column per candidate");
  for (const auto& c : covers)
    if (c.size() != atoms.size()) throw std::invalid_argument("make_instance: column size");
  for (const auto& c : candidates)
    if (c.cost.size() != candidates.front().cost.size())
      throw std::invalid_argument("make_instance: candidates disagree on cost dimension");
  CoverInstance inst;
  inst.atoms = std::move(atoms);
  inst.candidates = std::move(candidates);
  inst.covers = std::move(covers);
  std::map<std::string, std::size_t> row;
  for (const auto& c : inst.candidates)
    if (!row.count(c.mount_group)) row.emplace(c.mount_group, 0);
  for (auto& [name, idx] : row) {
    idx = inst.f_row_names.size();
    inst.f_row_names.push_back(name);
  }
  inst.f_rows.assign(row.size(), Bits(inst.candidates.size()));
  for (std::size_t l = 0; l < inst.candidates.size(); ++l)
    inst.f_rows[row.at(inst.candidates[l].mount_group)].set(l);
  Bits any(inst.atoms.size());
  for (const auto& c : inst.covers) any |= c;
  for (std::size_t n = 0; n < inst.atoms.size(); ++n)
    if (!any[n]) inst.uncoverable.push_back(n);
  return inst;
}

CoverInstance build_instance(const RequirementSet& req, const std::vector<CoverageSet>& coverages,
                             std::vector<Candidate> candidates,
                             const std::vector<double>& normalizers) {
  if (coverages.size() != candidates.size())
    throw std::invalid_argument("build_instance: one coverage set per candidate");
  for (double n : normalizers)
    if (!(n > 0)) throw std::invalid_argument("build_instance: normalizers must be positive");
  std::vector<Atom> atoms;
  for (const auto& [k, cells] : req.entries())
    for (const auto& c : cells.cells()) atoms.push_back({k.class_id, k.env, c});
  std::sort(atoms.begin(), atoms.end());
  for (auto& c : candidates) {
    if (c.raw.size() != normalizers.size())
      throw std::invalid_argument("build_instance: raw resources vs normalizers");
    c.cost.resize(normalizers.size());
    for (std::size_t j = 0; j < normalizers.size(); ++j) c.cost[j] = c.raw[j] / normalizers[j];
  }
  std::vector<Bits> covers(candidates.size(), Bits(atoms.size()));
  for (std::size_t l = 0; l < candidates.size(); ++l) {
    if (!coverages[l].entries.empty() && !(coverages[l].entries.begin()->second.grid() == req.grid()))
      throw std::invalid_argument("build_instance: coverage on a different grid");
    for (std::size_t n = 0; n < atoms.size(); ++n)
      if (coverages[l].contains({atoms[n].class_id, atoms[n].env}, atoms[n].cell)) covers[l].set(n);
  }
  auto inst = make_instance(std::move(atoms), std::move(candidates), std::move(covers));
  inst.normalizers = normalizers;
  return inst;
}

double radical_inverse(std::uint64_t index, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

std::vector<std::vector<double>> halton_weights(int w, int n) {
  if (w < 1 || n < 1) throw std::invalid_argument("halton_weights: w and n must be >= 1");
  const auto primes = first_primes(w);
  std::vector<std::vector<double>> out;
  for (std::uint64_t i = 0; static_cast<int>(out.size()) < n; ++i) {
    std::vector<double> p(w);
    double s = 0.0;
    for (int j = 0; j < w; ++j) s += p[j] = radical_inverse(i, primes[j]);
    if (s == 0.0) continue;
    for (double& x : p) x /= s;
    out.push_back(std::move(p));
  }
  return out;
}

double weighted_cost(const CoverInstance& inst, std::size_t cand, const std::vector<double>& w) {
  const auto& c = inst.candidates[cand].cost;
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) s += w[j] * c[j];
  return s;
}

std::vector<double> raw_sum(const CoverInstance& inst, const std::vector<std::size_t>& chosen) {
  std::vector<double> r(inst.candidates.empty() ? 0 : inst.candidates.front().raw.size(), 0.0);
  for (std::size_t l : chosen)
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += inst.candidates[l].raw[j];
  return r;
}

bool is_valid_cover(const CoverInstance& inst, const std::vector<std::size_t>& chosen) {
  for (std::size_t n = 0; n < inst.n_atoms(); ++n) {
    bool hit = false;
    for (std::size_t l : chosen) hit = hit || inst.a(n, l);
    if (!hit) return false;
  }
  for (const auto& row : inst.f_rows) {
    int used = 0;
    for (std::size_t l : chosen) used += row[l];
    if (used > 1) return false;
  }
  return true;
}

CoverResult solve_cover(const CoverInstance& inst, const std::vector<double>& weights) {
  CoverResult res;
  if (!inst.uncoverable.empty()) {
    res.certificate.atoms = inst.uncoverable;
    res.certificate.message = std::to_string(inst.uncoverable.size()) + " atom(s) covered by no candidate";
    return res;
  }
  if (inst.n_candidates() > 0 && weights.size() != inst.n_costs())
    throw std::invalid_argument("solve_cover: weight vector size");
  std::vector<double> wc(inst.n_candidates());
  for (std::size_t l = 0; l < wc.size(); ++l) wc[l] = weighted_cost(inst, l, weights);

  Search search(inst, wc);
  auto best = search.optimize();
  if (!best) {
    for (std::size_t r = 0; r < inst.f_rows.size(); ++r)
      if (inst.f_rows[r].count() > 1) res.certificate.f_rows.push_back(r);
    res.certificate.message = "mount exclusivity leaves no cover";
    return res;
  }

  // Lexicographically smallest optimal index set: extend the prefix one index at a time.
  std::vector<std::size_t> in;
  Bits out(inst.n_candidates());
  auto cost_of = [&](const std::vector<std::size_t>& s) {
    double c = 0.0;
    for (std::size_t l : s) c += wc[l];
    return c;
  };
  while (!(is_valid_cover(inst, in) && cost_of(in) <= *best + tol(*best))) {
    std::size_t start = in.empty() ? 0 : in.back() + 1;
    Bits skipped = out;
    bool extended = false;
    for (std::size_t l = start; l < inst.n_candidates(); ++l) {
      if (out[l]) continue;
      auto next = in;
      next.push_back(l);
      if (search.exists(next, skipped, *best)) {
        in = std::move(next);
        out = skipped;
        extended = true;
        break;
      }
      skipped.set(l);
    }
    if (!extended) throw std::logic_error("solve_cover: optimum lost during tie-break");
  }
  Selection sel;
  sel.chosen = in;
  sel.cost = cost_of(in);
  sel.raw = raw_sum(inst, in);
  res.selection = std::move(sel);
  return res;
}

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

bool is_antichain(const ParetoFront& f) {
  for (const auto& p : f.points)
    for (const auto& q : f.points)
      if (&p != &q && (dominates(p.resources, q.resources) || p.resources == q.resources))
        return false;
  return true;
}

namespace {

ParetoFront sweep(const CoverInstance& inst, int n_weights, const RawExtractor& extract,
                  bool parallel) {
  const int w = std::max<int>(1, static_cast<int>(inst.n_costs()));
  const auto weights = halton_weights(w, n_weights);
  std::vector<CoverResult> results(weights.size());
  const long n = static_cast<long>(weights.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) {
    auto wv = inst.n_costs() == 0 ? std::vector<double>{} : weights[i];
    results[i] = solve_cover(inst, wv);
  }

  ParetoFront front;
  std::map<std::vector<double>, FrontPoint> by_res;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    if (!r.feasible()) {
      if (!front.infeasible) front.infeasible = r.certificate;
      continue;
    }
    Selection& s = *r.selection;
    auto res = extract ? extract(inst, s) : s.raw;
    auto& pt = by_res[res];
    pt.resources = res;
    pt.weights.push_back(weights[i]);
    bool seen = false;
    for (const auto& o : pt.selections) seen = seen || o.chosen == s.chosen;
    if (!seen) pt.selections.push_back(s);
  }
  for (auto& [res, pt] : by_res) {
    bool dominated = false;
    for (const auto& [other, _] : by_res) dominated = dominated || dominates(other, res);
    if (!dominated) front.points.push_back(std::move(pt));
  }
  if (!front.points.empty()) front.infeasible.reset();
  return front;
}

}  // namespace

ParetoFront pareto_sweep(const CoverInstance& inst, int n_weights, const RawExtractor& extract) {
  return sweep(inst, n_weights, extract, true);
}

ParetoFront pareto_sweep_serial(const CoverInstance& inst, int n_weights,
                                const RawExtractor& extract) {
  return sweep(inst, n_weights, extract, false);
}

}  // namespace codei::select
