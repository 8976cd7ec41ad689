#include "codei/codesign/diagram.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>

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

PosetPtr ports_poset(const std::vector<Port>& ports) {
  std::vector<PosetPtr> p;
  for (const auto& x : ports) p.push_back(x.poset);
  return product(std::move(p));
}

void Diagram::add_block(const std::string& name, std::vector<Port> fun, std::vector<Port> res, Mdpi mdpi) {
  for (const auto& b : blocks_)
    if (b.name == name) throw std::invalid_argument("duplicate block " + name);
  if (!same_poset(mdpi.F, ports_poset(fun)) || !same_poset(mdpi.R, ports_poset(res)))
    throw PosetMismatch("block " + name + ": ports do not match its design problem");
  blocks_.push_back({name, std::move(fun), std::move(res), std::move(mdpi)});
}

std::size_t Diagram::block_index(const std::string& name) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].name == name) return i;
  throw std::invalid_argument("unknown block " + name);
}

std::pair<std::size_t, std::size_t> Diagram::fun_port(const Endpoint& e) const {
  auto b = block_index(e.block);
  for (std::size_t k = 0; k < blocks_[b].fun.size(); ++k)
    if (blocks_[b].fun[k].name == e.port) return {b, k};
  throw std::invalid_argument("block " + e.block + " has no functionality " + e.port);
}

std::pair<std::size_t, std::size_t> Diagram::res_port(const Endpoint& e) const {
  auto b = block_index(e.block);
  for (std::size_t k = 0; k < blocks_[b].res.size(); ++k)
    if (blocks_[b].res[k].name == e.port) return {b, k};
  throw std::invalid_argument("block " + e.block + " has no resource " + e.port);
}

void Diagram::connect(const Endpoint& from, const Endpoint& to, bool loop) {
  auto [fb, fk] = res_port(from);
  auto [tb, tk] = fun_port(to);
  const auto &a = blocks_[fb].res[fk].poset, &b = blocks_[tb].fun[tk].poset;
  if (!same_poset(a, b))
    throw PosetMismatch("wire " + from.block + "." + from.port + " -> " + to.block + "." + to.port +
                        ": " + a->name() + " vs " + b->name());
  wires_.push_back({from, to, loop});
}

void Diagram::expose_functionality(const std::string& name, const Endpoint& to) {
  fun_port(to);
  fun_.push_back({name, to});
}

void Diagram::expose_resource(const std::string& name, const Endpoint& from) {
  res_port(from);
  res_.push_back({name, from});
}

PosetPtr Diagram::F() const {
  std::vector<PosetPtr> p;
  for (const auto& e : fun_) {
    auto [b, k] = fun_port(e.at);
    p.push_back(blocks_[b].fun[k].poset);
  }
  return product(std::move(p));
}

PosetPtr Diagram::R() const {
  std::vector<PosetPtr> p;
  for (const auto& e : res_) {
    auto [b, k] = res_port(e.at);
    p.push_back(blocks_[b].res[k].poset);
  }
  return product(std::move(p));
}

bool Diagram::has_loops() const {
  for (const auto& w : wires_)
    if (w.loop) return true;
  return false;
}

std::vector<std::string> Diagram::order() const {
  const std::size_t n = blocks_.size();
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<int> indeg(n, 0);
  for (const auto& w : wires_) {
    if (w.loop) continue;
    auto c = block_index(w.from.block), p = block_index(w.to.block);
    out[c].push_back(p);
    ++indeg[p];
  }
  std::vector<std::string> names;
  std::vector<bool> done(n, false);
  for (std::size_t round = 0; round < n; ++round) {
    std::size_t pick = n;
    for (std::size_t i = 0; i < n && pick == n; ++i)
      if (!done[i] && indeg[i] == 0) pick = i;
    if (pick == n) throw std::invalid_argument(name_ + ": cycle not broken by a loop wire");
    done[pick] = true;
    names.push_back(blocks_[pick].name);
    for (auto p : out[pick]) --indeg[p];
  }
  return names;
}

void Diagram::validate() const {
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (const auto& port : blocks_[b].res) {
      int uses = 0;
      for (const auto& w : wires_) uses += w.from.block == blocks_[b].name && w.from.port == port.name;
      for (const auto& e : res_) uses += e.at.block == blocks_[b].name && e.at.port == port.name;
      if (uses != 1)
        throw std::invalid_argument(name_ + ": resource " + blocks_[b].name + "." + port.name +
                                    " must be wired or exposed exactly once");
    }
  order();
}

namespace {

struct Target {
  enum Kind { wire, exposed, loop } kind;
  std::size_t block = 0, port = 0;  // for wire
  std::size_t index = 0;            // for exposed / loop
};

struct Plan {
  std::vector<Block> blocks;
  std::vector<std::size_t> order;
  std::vector<std::vector<Target>> targets;
  std::vector<std::pair<std::size_t, std::size_t>> fun_at, loop_to;
  std::vector<PosetPtr> out_posets;  // exposed resources then loop outputs
  std::size_t n_res = 0;
};

struct State {
  std::map<std::pair<std::size_t, std::size_t>, Elem> demand;
  std::vector<std::optional<Elem>> out;
  std::vector<Impl> impls;
};

// Keep the minimal states; all states of one stage share the same demand keys and outputs.
std::vector<State> prune(const Plan& plan, std::vector<State> states) {
  if (states.size() <= 1) return states;
  std::vector<std::pair<std::size_t, std::size_t>> keys;
  for (const auto& [k, v] : states[0].demand) keys.push_back(k);
  std::vector<std::size_t> outs;
  for (std::size_t i = 0; i < states[0].out.size(); ++i)
    if (states[0].out[i]) outs.push_back(i);
  std::vector<PosetPtr> posets;
  for (const auto& [b, k] : keys) posets.push_back(plan.blocks[b].fun[k].poset);
  for (auto i : outs) posets.push_back(plan.out_posets[i]);
  auto P = product(posets);

  std::vector<Point> pts;
  for (auto& s : states) {
    std::vector<Elem> v;
    for (const auto& k : keys) v.push_back(s.demand.at(k));
    for (auto i : outs) v.push_back(*s.out[i]);
    pts.push_back({Elem::tuple(std::move(v)), std::move(s.impls)});
  }
  auto merged = antichain_merge(P, std::move(pts));
  std::vector<State> out;
  for (auto& p : merged.points) {
    State s;
    s.out.assign(states[0].out.size(), std::nullopt);
    for (std::size_t i = 0; i < keys.size(); ++i) s.demand.emplace(keys[i], p.value[i]);
    for (std::size_t i = 0; i < outs.size(); ++i) s.out[outs[i]] = p.value[keys.size() + i];
    s.impls = std::move(p.impls);
    out.push_back(std::move(s));
  }
  return out;
}

Antichain evaluate(const Plan& plan, const PosetPtr& R, const Elem& f0, const Elem* x) {
  State init;
  init.out.assign(plan.out_posets.size(), std::nullopt);
  auto feed = [&](State& s, std::pair<std::size_t, std::size_t> at, const Elem& v) {
    auto it = s.demand.find(at);
    if (it == s.demand.end()) {
      s.demand.emplace(at, v);
      return true;
    }
    auto j = plan.blocks[at.first].fun[at.second].poset->join(it->second, v);
    if (!j) return false;
    it->second = *j;
    return true;
  };
  bool ok = true;
  for (std::size_t i = 0; i < plan.fun_at.size(); ++i) ok = ok && feed(init, plan.fun_at[i], f0[i]);
  for (std::size_t i = 0; i < plan.loop_to.size(); ++i) ok = ok && feed(init, plan.loop_to[i], (*x)[i]);
  if (!ok) return Antichain{R, {}};

  std::vector<State> states{init};
  for (auto b : plan.order) {
    const Block& blk = plan.blocks[b];
    std::vector<State> next;
    for (const auto& s : states) {
      std::vector<Elem> f;
      for (std::size_t k = 0; k < blk.fun.size(); ++k) {
        auto it = s.demand.find({b, k});
        if (it != s.demand.end()) {
          f.push_back(it->second);
        } else if (auto bot = blk.fun[k].poset->bottom()) {
          f.push_back(*bot);
        } else {
          throw std::invalid_argument("block " + blk.name + ": functionality " + blk.fun[k].name +
                                      " has no demand and no bottom");
        }
      }
      auto A = blk.mdpi.h(Elem::tuple(std::move(f)));
      for (const auto& p : A.points) {
        State t;
        t.out = s.out;
        for (const auto& [key, v] : s.demand)
          if (key.first != b) t.demand.emplace(key, v);
        bool good = true;
        for (std::size_t j = 0; j < blk.res.size() && good; ++j) {
          const auto& tg = plan.targets[b][j];
          const Elem& v = p.value[j];
          if (tg.kind == Target::wire) good = feed(t, {tg.block, tg.port}, v);
          else if (tg.kind == Target::exposed) t.out[tg.index] = v;
          else t.out[plan.n_res + tg.index] = v;
        }
        if (!good) continue;
        t.impls = cross(s.impls, p.impls);
        next.push_back(std::move(t));
      }
    }
    states = prune(plan, std::move(next));
  }

  std::vector<Point> pts;
  for (auto& s : states) {
    std::vector<Elem> r, xo;
    for (std::size_t i = 0; i < plan.n_res; ++i) r.push_back(*s.out[i]);
    for (std::size_t i = plan.n_res; i < s.out.size(); ++i) xo.push_back(*s.out[i]);
    Elem v = x ? Elem::tuple({Elem::tuple(std::move(r)), Elem::tuple(std::move(xo))})
               : Elem::tuple(std::move(r));
    pts.push_back({std::move(v), std::move(s.impls)});
  }
  return antichain_merge(R, std::move(pts));
}

}  // namespace

Mdpi Diagram::open_mdpi() const {
  validate();
  auto plan = std::make_shared<Plan>();
  plan->blocks = blocks_;
  for (const auto& n : order()) plan->order.push_back(block_index(n));
  plan->targets.resize(blocks_.size());
  for (std::size_t b = 0; b < blocks_.size(); ++b) plan->targets[b].resize(blocks_[b].res.size());
  for (std::size_t i = 0; i < res_.size(); ++i) {
    auto [b, k] = res_port(res_[i].at);
    plan->targets[b][k] = {Target::exposed, 0, 0, i};
    plan->out_posets.push_back(blocks_[b].res[k].poset);
  }
  plan->n_res = res_.size();
  std::vector<PosetPtr> xs;
  for (const auto& w : wires_) {
    auto [fb, fk] = res_port(w.from);
    auto to = fun_port(w.to);
    if (w.loop) {
      plan->targets[fb][fk] = {Target::loop, 0, 0, plan->loop_to.size()};
      plan->loop_to.push_back(to);
      plan->out_posets.push_back(blocks_[fb].res[fk].poset);
      xs.push_back(blocks_[fb].res[fk].poset);
    } else {
      plan->targets[fb][fk] = {Target::wire, to.first, to.second, 0};
    }
  }
  for (const auto& e : fun_) plan->fun_at.push_back(fun_port(e.at));

  const bool loops = !xs.empty();
  auto F0 = F(), R0 = R();
  auto X = product(xs);
  auto Fi = loops ? product({F0, X}) : F0;
  auto Ri = loops ? product({R0, X}) : R0;
  Mdpi m{name_, Fi, Ri, {}, {}, {}};
  m.h = [plan, Ri, loops](const Elem& f) {
    if (!loops) return evaluate(*plan, Ri, f, nullptr);
    return evaluate(*plan, Ri, f[0], &f[1]);
  };
  if (!loops) m.f_universe = grid_;
  return m;
}

Mdpi Diagram::as_mdpi(int kleene_cap) const {
  if (!has_loops()) return open_mdpi();
  Mdpi m = compose_loop(open_mdpi(), kleene_cap);
  m.name = name_;
  m.f_universe = grid_;
  return m;
}

Antichain solve_fix_fun_min_res(const Diagram& d, const Elem& demand, SolveStats* stats, int kleene_cap) {
  if (!d.has_loops()) return d.open_mdpi().h(demand);
  auto open = d.open_mdpi();
  auto k = kleene(open, demand, kleene_cap);
  if (stats) stats->kleene_iterations = k.iterations;
  std::vector<Point> pts;
  for (auto& s : k.fixed_point.points) pts.push_back({s.value[0], std::move(s.impls)});
  return antichain_merge(d.R(), std::move(pts));
}

Antichain solve_fix_res_max_fun(const Diagram& d, const Elem& budget) {
  return fix_res_max_fun(d.as_mdpi(), budget);
}

}  // namespace codei::codesign
