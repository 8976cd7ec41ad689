#pragma once

#include <boost/dynamic_bitset.hpp>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codei/geom.hpp"
#include "codei/percreq.hpp"

namespace codei::select {

using geom::Cell;
using geom::CellSet;
using percreq::ReqKey;
using percreq::RequirementSet;
using Bits = boost::dynamic_bitset<>;

// Cells a mounted pipeline covers, keyed like a RequirementSet (theta in the cell).
struct CoverageSet {
  std::string mpp_id;
  double epsilon = 0.0;
  std::map<ReqKey, CellSet> entries;

  bool contains(const ReqKey& k, const Cell& c) const;
};

struct Atom {
  std::string class_id;
  world::EnvCondition env;
  Cell cell;

  auto operator<=>(const Atom&) const = default;
};

struct Candidate {
  std::string id;
  std::string mount_group;  // candidates sharing a group are mutually exclusive
  std::vector<double> cost;  // normalized, one entry per cost function
  std::vector<double> raw;   // raw resources (price, mass, power, compute)
};

struct CoverInstance {
  std::vector<Atom> atoms;
  std::vector<Candidate> candidates;
  std::vector<Bits> covers;  // per candidate, over atoms: column l of A
  std::vector<Bits> f_rows;  // per mount group, over candidates
  std::vector<std::string> f_row_names;
  std::vector<std::size_t> uncoverable;  // atoms no candidate covers
  std::vector<double> normalizers;

  std::size_t n_atoms() const { return atoms.size(); }
  std::size_t n_candidates() const { return candidates.size(); }
  std::size_t n_costs() const;
  bool a(std::size_t atom, std::size_t cand) const { return covers[cand][atom]; }
};

// Groups F rows by mount_group and records uncoverable atoms. covers[l] must have n_atoms bits.
CoverInstance make_instance(std::vector<Atom> atoms, std::vector<Candidate> candidates,
                            std::vector<Bits> covers);

// Candidate costs are raw / normalizers; coverages[l] belongs to candidates[l].
CoverInstance build_instance(const RequirementSet& req, const std::vector<CoverageSet>& coverages,
                             std::vector<Candidate> candidates,
                             const std::vector<double>& normalizers);

std::vector<std::vector<double>> halton_weights(int w, int n);
double radical_inverse(std::uint64_t index, int base);

struct Selection {
  std::vector<std::size_t> chosen;  // ascending
  double cost = 0.0;                // weighted, normalized
  std::vector<double> raw;
};

struct Certificate {
  std::vector<std::size_t> atoms;   // uncoverable atoms
  std::vector<std::size_t> f_rows;  // mount groups whose exclusivity blocks every cover
  std::string message;
};

struct CoverResult {
  std::optional<Selection> selection;
  Certificate certificate;

  bool feasible() const { return selection.has_value(); }
};

double weighted_cost(const CoverInstance& inst, std::size_t cand, const std::vector<double>& w);
std::vector<double> raw_sum(const CoverInstance& inst, const std::vector<std::size_t>& chosen);
// A x >= 1 and F x <= 1, checked from scratch.
bool is_valid_cover(const CoverInstance& inst, const std::vector<std::size_t>& chosen);

// Exact minimum; ties within 1e-12 relative go to the lexicographically smallest index set.
CoverResult solve_cover(const CoverInstance& inst, const std::vector<double>& weights);

using RawExtractor = std::function<std::vector<double>(const CoverInstance&, const Selection&)>;

struct FrontPoint {
  std::vector<double> resources;
  std::vector<Selection> selections;  // distinct selections with these resources
  std::vector<std::vector<double>> weights;
};

struct ParetoFront {
  std::vector<FrontPoint> points;  // sorted by resources
  std::optional<Certificate> infeasible;
};

// Componentwise <= with at least one strict.
bool dominates(const std::vector<double>& a, const std::vector<double>& b);
bool is_antichain(const ParetoFront& f);

ParetoFront pareto_sweep(const CoverInstance& inst, int n_weights, const RawExtractor& extract = {});
ParetoFront pareto_sweep_serial(const CoverInstance& inst, int n_weights,
                                const RawExtractor& extract = {});

}  // namespace codei::select
