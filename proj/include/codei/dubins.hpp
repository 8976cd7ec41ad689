#pragma once

#include <array>
#include <optional>

#include "codei/geom.hpp"

namespace codei::planner {

enum class DubinsWord { LSL, RSR, LSR, RSL, RLR, LRL };

struct DubinsPath {
  geom::Pose2 start;
  double rho = 1.0;
  DubinsWord word = DubinsWord::LSL;
  std::array<double, 3> seg{};  // segment lengths normalized by rho

  double length() const { return rho * (seg[0] + seg[1] + seg[2]); }
  geom::Pose2 sample(double s) const;
  geom::Pose2 end() const { return sample(length()); }
};

// Shortest of the six words, or nullopt for coincident poses with rho <= 0.
std::optional<DubinsPath> dubins_shortest(const geom::Pose2& from, const geom::Pose2& to,
                                          double rho);
std::optional<DubinsPath> dubins_word(const geom::Pose2& from, const geom::Pose2& to, double rho,
                                      DubinsWord word);

}  // namespace codei::planner
