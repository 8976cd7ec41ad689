#pragma once

#include <string>
#include <vector>

#include "codei/codesign/mdpi.hpp"

namespace codei::codesign {

struct Port {
  std::string name;
  PosetPtr poset;
};

PosetPtr ports_poset(const std::vector<Port>& ports);

struct Block {
  std::string name;
  std::vector<Port> fun, res;
  Mdpi mdpi;  // F = product of fun ports, R = product of res ports
};

struct Endpoint {
  std::string block, port;
};

// The resource `from` of one block is provided by the functionality `to` of another.
struct Wire {
  Endpoint from, to;
  bool loop = false;
};

struct Exposed {
  std::string name;
  Endpoint at;
};

class Diagram {
 public:
  explicit Diagram(std::string name = "diagram") : name_(std::move(name)) {}

  void add_block(const std::string& name, std::vector<Port> fun, std::vector<Port> res, Mdpi mdpi);
  void connect(const Endpoint& from_res, const Endpoint& to_fun, bool loop = false);
  void expose_functionality(const std::string& name, const Endpoint& to_fun);
  void expose_resource(const std::string& name, const Endpoint& from_res);
  void set_functionality_grid(std::vector<Elem> grid) { grid_ = std::move(grid); }

  const std::string& name() const { return name_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<Wire>& wires() const { return wires_; }
  const std::vector<Exposed>& functionalities() const { return fun_; }
  const std::vector<Exposed>& resources() const { return res_; }

  PosetPtr F() const;  // product of exposed functionalities
  PosetPtr R() const;  // product of exposed resources
  // Blocks in evaluation order: every consumer before its providers, loop wires ignored.
  std::vector<std::string> order() const;
  // Throws on dangling resources, poset mismatches, or cycles not broken by loop wires.
  void validate() const;

  // The loop-free part as F x X -> R x X (X = loop wires), or F -> R without loops.
  Mdpi open_mdpi() const;
  Mdpi as_mdpi(int kleene_cap = 10000) const;
  bool has_loops() const;

 private:
  std::size_t block_index(const std::string& name) const;
  std::pair<std::size_t, std::size_t> fun_port(const Endpoint& e) const;
  std::pair<std::size_t, std::size_t> res_port(const Endpoint& e) const;

  std::string name_;
  std::vector<Block> blocks_;
  std::vector<Wire> wires_;
  std::vector<Exposed> fun_, res_;
  std::vector<Elem> grid_;
};

struct SolveStats {
  int kleene_iterations = 0;
};

Antichain solve_fix_fun_min_res(const Diagram& d, const Elem& demand, SolveStats* stats = nullptr,
                                int kleene_cap = 10000);
Antichain solve_fix_res_max_fun(const Diagram& d, const Elem& budget);

}  // namespace codei::codesign
