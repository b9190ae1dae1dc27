#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stieltjes/error.hpp"

namespace stieltjes {

/// A vertex of the graph of the continuous part g^C.
struct Breakpoint {
  double x;
  double y;
};

/// A discontinuity of g: abscissa and gap g(x+) - g(x) > 0.
struct Jump {
  double x;
  double gap;
};

/// Maximal interval on which the jump part g^B is constant.
///
/// Piece 0 is [a, x_1]; piece j > 0 is (x_j, x_{j+1}], where x_1 < x_2 < ...
/// are the jump abscissas and the last right end is b. When a is itself a
/// jump, piece 0 collapses to {a}.
struct Piece {
  double left;
  double right;
  bool left_closed;  // true only for the first piece
  double y_left;     // g^C(left)
  double y_right;    // g^C(right)
  double jump_sum;   // value of g^B on the piece

  bool degenerate_y() const { return y_right == y_left; }
  bool contains(double x) const {
    return (left_closed ? x >= left : x > left) && x <= right;
  }
};

/// Linear segment of g^C with constant g^B: the atomic unit for exact
/// integration. Covers (left, right], or [left, right] for the first one.
struct Segment {
  double left;
  double right;
  double gc_left;
  double slope;
  double jump_sum;
};

/// A nondecreasing, left-continuous function g on [a, b] whose continuous
/// part is piecewise linear and whose jump part has finitely many atoms.
///
/// The normalization g(a) = 0 is applied at construction by shifting the
/// ordinates of the continuous part. Instances are immutable.
class Derivator {
 public:
  Derivator(double a, double b, std::vector<Breakpoint> breakpoints,
            std::vector<Jump> jumps)
      : a_(a), b_(b), breakpoints_(std::move(breakpoints)), jumps_(std::move(jumps)) {
    validate();
    const double shift = breakpoints_.front().y;
    for (auto& bp : breakpoints_) bp.y -= shift;
    breakpoints_.front().y = 0.0;

    prefix_gaps_.reserve(jumps_.size() + 1);
    prefix_gaps_.push_back(0.0);
    for (const auto& j : jumps_) prefix_gaps_.push_back(prefix_gaps_.back() + j.gap);

    build_segments();
  }

  /// Identity-graph derivator g(x) = x - a on [a, b] with the given jumps.
  static Derivator identity(double a, double b, std::vector<Jump> jumps = {}) {
    return Derivator(a, b, {{a, 0.0}, {b, b - a}}, std::move(jumps));
  }

  double a() const { return a_; }
  double b() const { return b_; }
  std::span<const Breakpoint> breakpoints() const { return breakpoints_; }
  std::span<const Jump> jumps() const { return jumps_; }
  bool continuous() const { return jumps_.empty(); }

  /// g^C(x), linear interpolation of the breakpoints.
  double continuous_part(double x) const {
    check_domain(x);
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x,
                               [](double v, const Breakpoint& bp) { return v < bp.x; });
    if (it == breakpoints_.begin()) return breakpoints_.front().y;
    if (it == breakpoints_.end()) return breakpoints_.back().y;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (x == lo.x) return lo.y;
    return lo.y + (hi.y - lo.y) * ((x - lo.x) / (hi.x - lo.x));
  }

  /// g^B(x) = sum of gaps strictly left of x.
  double jump_part(double x) const {
    check_domain(x);
    return prefix_gaps_[jumps_before(x)];
  }

  /// g^B(x+) = sum of gaps at or left of x.
  double jump_part_right(double x) const {
    check_domain(x);
    return prefix_gaps_[jumps_at_or_before(x)];
  }

  double eval(double x) const { return continuous_part(x) + jump_part(x); }
  double operator()(double x) const { return eval(x); }

  /// Right limit g(x+); undefined at b.
  double eval_right(double x) const {
    if (x >= b_) throw spec_error("right limit undefined at the right endpoint b");
    return eval(x) + gap(x);
  }

  /// Delta g(x); zero off the jump set.
  double gap(double x) const {
    check_domain(x);
    auto idx = jumps_before(x);
    if (idx < jumps_.size() && jumps_[idx].x == x) return jumps_[idx].gap;
    return 0.0;
  }

  bool is_jump(double x) const { return x >= a_ && x <= b_ && gap(x) > 0.0; }

  /// mu_g([c, e)) = g(e) - g(c), evaluated as continuous increment plus atoms.
  double measure(double c, double e) const {
    check_domain(c);
    check_domain(e);
    if (c > e) throw spec_error("measure: left end exceeds right end");
    if (c == e) return 0.0;
    double atoms = 0.0;
    for (auto i = jumps_before(c); i < jumps_.size() && jumps_[i].x < e; ++i)
      atoms += jumps_[i].gap;
    return (continuous_part(e) - continuous_part(c)) + atoms;
  }

  double total_mass() const { return measure(a_, b_); }

  double pseudo_distance(double x, double y) const { return std::abs(eval(x) - eval(y)); }

  /// (g^C, g^B) as derivators in their own right.
  std::pair<Derivator, Derivator> split_parts() const {
    Derivator cont(a_, b_, breakpoints_, {});
    Derivator jump(a_, b_, {{a_, 0.0}, {b_, 0.0}}, jumps_);
    return {std::move(cont), std::move(jump)};
  }

  /// Maximal intervals of constancy of g^B, in order.
  std::vector<Piece> pieces() const {
    std::vector<double> xs;
    xs.reserve(jumps_.size() + 2);
    xs.push_back(a_);
    for (const auto& j : jumps_) xs.push_back(j.x);
    xs.push_back(b_);
    std::vector<Piece> out;
    out.reserve(xs.size() - 1);
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
      out.push_back(Piece{xs[j], xs[j + 1], j == 0, continuous_part(xs[j]),
                          continuous_part(xs[j + 1]), prefix_gaps_[j]});
    }
    return out;
  }

  /// Index of the piece containing x (left-continuous convention).
  std::size_t piece_index(double x) const {
    check_domain(x);
    if (x == a_) return 0;
    return jumps_before(x);
  }

  /// Index of the piece whose interior lies immediately right of x.
  std::size_t piece_index_right(double x) const {
    check_domain(x);
    return jumps_at_or_before(x);
  }

  std::span<const Segment> segments() const { return segments_; }

  /// Index of the segment (l, r] containing x; the first segment is closed.
  std::size_t segment_index(double x) const {
    check_domain(x);
    auto it = std::lower_bound(segments_.begin(), segments_.end(), x,
                               [](const Segment& s, double v) { return s.right < v; });
    if (it == segments_.end()) return segments_.size() - 1;
    return static_cast<std::size_t>(it - segments_.begin());
  }

  /// Index of the segment whose open interior lies immediately right of x.
  std::size_t segment_index_right(double x) const {
    if (x >= b_) throw spec_error("no segment to the right of b");
    check_domain(x);
    auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                               [](double v, const Segment& s) { return v < s.right; });
    return static_cast<std::size_t>(it - segments_.begin());
  }

  /// max{x in [lo, hi] : g^C(x) <= y}. Requires g^C(lo) <= y.
  double gc_inverse(double y, double lo, double hi) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y,
                               [](double v, const Breakpoint& bp) { return v < bp.y; });
    double x;
    if (it == breakpoints_.end()) {
      x = b_;
    } else if (it == breakpoints_.begin()) {
      x = a_;
    } else {
      const auto& lo_bp = *(it - 1);
      const auto& hi_bp = *it;
      x = lo_bp.x + (y - lo_bp.y) / (hi_bp.y - lo_bp.y) * (hi_bp.x - lo_bp.x);
      x = std::min(x, hi_bp.x);
    }
    return std::clamp(x, lo, hi);
  }

  /// max{z in [a, b] : g(z) <= level}; a when no point qualifies.
  double last_at_or_below(double level) const {
    double best = a_;
    for (const auto& p : pieces()) {
      // g(a), or g(left+) on later pieces, already above the level
      if (p.y_left + p.jump_sum > level) return best;
      if (p.y_right + p.jump_sum <= level) {
        best = p.right;
        continue;
      }
      // level - jump_sum can round below y_left even though the test above passed
      return gc_inverse(std::max(level - p.jump_sum, p.y_left), p.left, p.right);
    }
    return best;
  }

  /// beta = max g^{-1}({g(x0)}). Every later piece starts above g(x0) after a
  /// positive gap, so beta lies in the piece of x0 and only g^C has to be inverted.
  double level_set_max(double x0) const {
    const auto p = pieces()[piece_index(x0)];
    return gc_inverse(continuous_part(x0), x0, p.right);
  }

 private:
  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(a_) || !finite(b_) || !(a_ < b_))
      throw spec_error("interval must satisfy a < b with finite ends");
    if (breakpoints_.size() < 2)
      throw spec_error("continuous part needs at least two breakpoints");
    if (breakpoints_.front().x != a_ || breakpoints_.back().x != b_)
      throw spec_error("breakpoints must span [a, b]");
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
      if (!finite(breakpoints_[k].x) || !finite(breakpoints_[k].y))
        throw spec_error("non-finite breakpoint");
      if (k > 0 && !(breakpoints_[k].x > breakpoints_[k - 1].x))
        throw spec_error("breakpoint abscissas must be strictly increasing");
      if (k > 0 && breakpoints_[k].y < breakpoints_[k - 1].y)
        throw spec_error("non-monotone breakpoints: continuous part must be nondecreasing");
    }
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
      const auto& j = jumps_[i];
      if (!finite(j.x) || !finite(j.gap)) throw spec_error("non-finite jump");
      if (!(j.gap > 0.0)) throw spec_error("nonpositive gap at x = " + std::to_string(j.x));
      if (j.x < a_) throw spec_error("jump before a");
      if (j.x >= b_) throw spec_error("jump at or beyond b");
      if (i > 0 && !(j.x > jumps_[i - 1].x))
        throw spec_error("jump abscissas must be strictly increasing");
    }
  }

  void check_domain(double x) const {
    if (!(x >= a_ && x <= b_))
      throw spec_error("argument " + std::to_string(x) + " outside [a, b]");
  }

  // number of jumps with abscissa < x
  std::size_t jumps_before(double x) const {
    return static_cast<std::size_t>(
        std::lower_bound(jumps_.begin(), jumps_.end(), x,
                         [](const Jump& j, double v) { return j.x < v; }) -
        jumps_.begin());
  }

  std::size_t jumps_at_or_before(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(jumps_.begin(), jumps_.end(), x,
                         [](double v, const Jump& j) { return v < j.x; }) -
        jumps_.begin());
  }

  void build_segments() {
    std::vector<double> grid;
    grid.reserve(breakpoints_.size() + jumps_.size());
    for (const auto& bp : breakpoints_) grid.push_back(bp.x);
    for (const auto& j : jumps_) grid.push_back(j.x);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (!jumps_.empty() && jumps_.front().x == a_) grid.insert(grid.begin(), a_);

    segments_.clear();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double l = grid[i];
      const double r = grid[i + 1];
      const double gl = continuous_part(l);
      const double gr = continuous_part(r);
      const double slope = r > l ? (gr - gl) / (r - l) : 0.0;
      // g^B on (l, r]: jumps with abscissa <= l, except for the degenerate {a}
      const double jb = (r == l) ? 0.0 : prefix_gaps_[jumps_at_or_before(l)];
      segments_.push_back(Segment{l, r, gl, slope, jb});
    }
  }

  double a_;
  double b_;
  std::vector<Breakpoint> breakpoints_;
  std::vector<Jump> jumps_;
  std::vector<double> prefix_gaps_;
  std::vector<Segment> segments_;
};

}  // namespace stieltjes
