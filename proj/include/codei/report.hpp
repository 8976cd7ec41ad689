#pragma once

#include <string>
#include <utility>
#include <vector>

#include "codei/catalog.hpp"
#include "codei/codesign/antichain.hpp"
#include "codei/design.hpp"
#include "codei/select.hpp"

namespace codei::report {

// Numbers use %.10g; the header is the column names.
std::string csv(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows);

// One scatter panel per column pair, three panels per row, fixed layout.
std::string svg_pairs(const std::string& title, const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows,
                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t n);

// Per front point: the resources and a mount table of each selection.
std::string front_summary(const select::ParetoFront& f, const design::SelectionProblem& sp,
                          const catalog::Catalog& cat);
std::string solutions_summary(const codesign::Antichain& a, const catalog::Catalog& cat);

}  // namespace codei::report
