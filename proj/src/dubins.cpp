#include "codei/dubins.hpp"

#include <algorithm>
#include <cmath>

namespace codei::planner {

using geom::kPi;
using geom::kTwoPi;
using geom::Pose2;

namespace {
double mod2pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

enum class Seg { L, S, R };

std::array<Seg, 3> segments(DubinsWord w) {
  switch (w) {
    case DubinsWord::LSL: return {Seg::L, Seg::S, Seg::L};
    case DubinsWord::RSR: return {Seg::R, Seg::S, Seg::R};
    case DubinsWord::LSR: return {Seg::L, Seg::S, Seg::R};
    case DubinsWord::RSL: return {Seg::R, Seg::S, Seg::L};
    case DubinsWord::RLR: return {Seg::R, Seg::L, Seg::R};
    case DubinsWord::LRL: return {Seg::L, Seg::R, Seg::L};
  }
  return {Seg::S, Seg::S, Seg::S};
}

// Unit-radius motion along one segment from a normalized pose.
Pose2 advance(const Pose2& p, double len, Seg s) {
  switch (s) {
    case Seg::L:
      return {p.x + std::sin(p.theta + len) - std::sin(p.theta),
              p.y - std::cos(p.theta + len) + std::cos(p.theta), p.theta + len};
    case Seg::R:
      return {p.x - std::sin(p.theta - len) + std::sin(p.theta),
              p.y + std::cos(p.theta - len) - std::cos(p.theta), p.theta - len};
    case Seg::S:
      return {p.x + std::cos(p.theta) * len, p.y + std::sin(p.theta) * len, p.theta};
  }
  return p;
}
}  // namespace

Pose2 DubinsPath::sample(double s) const {
  double t = std::clamp(s, 0.0, length()) / rho;
  auto segs = segments(word);
  Pose2 p{0, 0, start.theta};
  for (int i = 0; i < 3; ++i) {
    double l = std::min(t, seg[i]);
    p = advance(p, l, segs[i]);
    t -= l;
    if (t <= 0) break;
  }
  return {start.x + p.x * rho, start.y + p.y * rho, geom::normalize_angle(p.theta)};
}

std::optional<DubinsPath> dubins_word(const Pose2& from, const Pose2& to, double rho,
                                      DubinsWord word) {
  if (!(rho > 0)) return std::nullopt;
  double dx = to.x - from.x, dy = to.y - from.y;
  double d = std::hypot(dx, dy) / rho;
  double th = d > 0 ? mod2pi(std::atan2(dy, dx)) : 0.0;
  double a = mod2pi(from.theta - th), b = mod2pi(to.theta - th);
  double sa = std::sin(a), sb = std::sin(b), ca = std::cos(a), cb = std::cos(b);
  double cab = std::cos(a - b);
  DubinsPath p;
  p.start = from;
  p.rho = rho;
  p.word = word;
  switch (word) {
    case DubinsWord::LSL: {
      double p2 = 2 + d * d - 2 * cab + 2 * d * (sa - sb);
      if (p2 < 0) return std::nullopt;
      double t1 = std::atan2(cb - ca, d + sa - sb);
      p.seg = {mod2pi(t1 - a), std::sqrt(p2), mod2pi(b - t1)};
      break;
    }
    case DubinsWord::RSR: {
      double p2 = 2 + d * d - 2 * cab + 2 * d * (sb - sa);
      if (p2 < 0) return std::nullopt;
      double t1 = std::atan2(ca - cb, d - sa + sb);
      p.seg = {mod2pi(a - t1), std::sqrt(p2), mod2pi(t1 - b)};
      break;
    }
    case DubinsWord::LSR: {
      double p2 = -2 + d * d + 2 * cab + 2 * d * (sa + sb);
      if (p2 < 0) return std::nullopt;
      double pl = std::sqrt(p2);
      double t0 = std::atan2(-ca - cb, d + sa + sb) - std::atan2(-2.0, pl);
      p.seg = {mod2pi(t0 - a), pl, mod2pi(t0 - b)};
      break;
    }
    case DubinsWord::RSL: {
      double p2 = -2 + d * d + 2 * cab - 2 * d * (sa + sb);
      if (p2 < 0) return std::nullopt;
      double pl = std::sqrt(p2);
      double t0 = std::atan2(ca + cb, d - sa - sb) - std::atan2(2.0, pl);
      p.seg = {mod2pi(a - t0), pl, mod2pi(b - t0)};
      break;
    }
    case DubinsWord::RLR: {
      double t0 = (6 - d * d + 2 * cab + 2 * d * (sa - sb)) / 8;
      if (std::abs(t0) > 1) return std::nullopt;
      double pl = mod2pi(kTwoPi - std::acos(t0));
      double t = mod2pi(a - std::atan2(ca - cb, d - sa + sb) + pl / 2);
      p.seg = {t, pl, mod2pi(a - b - t + pl)};
      break;
    }
    case DubinsWord::LRL: {
      double t0 = (6 - d * d + 2 * cab + 2 * d * (sb - sa)) / 8;
      if (std::abs(t0) > 1) return std::nullopt;
      double pl = mod2pi(kTwoPi - std::acos(t0));
      double t = mod2pi(-a - std::atan2(ca - cb, d + sa - sb) + pl / 2);
      p.seg = {t, pl, mod2pi(b - a - t + pl)};
      break;
    }
  }
  return p;
}

std::optional<DubinsPath> dubins_shortest(const Pose2& from, const Pose2& to, double rho) {
  std::optional<DubinsPath> best;
  for (DubinsWord w : {DubinsWord::LSL, DubinsWord::RSR, DubinsWord::LSR, DubinsWord::RSL,
                       DubinsWord::RLR, DubinsWord::LRL}) {
    auto p = dubins_word(from, to, rho, w);
    if (p && (!best || p->length() < best->length())) best = p;
  }
  return best;
}

}  // namespace codei::planner
