#pragma once

#include <string>
#include <vector>

#include "rgvi/linalg.hpp"

namespace rgvi {

enum class SetKind { whole_space, box, ball, simplex };

const char* to_string(SetKind kind);

// One factor of a product set, acting on coordinates [offset, offset + size).
struct SetBlock {
  SetKind kind = SetKind::whole_space;
  Index offset = 0;
  Index size = 0;
  Vector lower;   // box
  Vector upper;   // box
  Vector center;  // ball
  double radius = 0.0;
  double total = 1.0;  // simplex: sum of coordinates
};

struct SupportResult {
  double value = 0.0;
  Vector argmax;
};

// Closed convex set with a closed-form Euclidean projection: a product of
// boxes, Euclidean balls, scaled standard simplices and free blocks.
class SimpleSet {
 public:
  SimpleSet() = default;

  static SimpleSet whole_space(Index dim);
  static SimpleSet box(Vector lower, Vector upper);
  static SimpleSet ball(Vector center, double radius);
  static SimpleSet simplex(Index dim, double total = 1.0);
  static SimpleSet product(const std::vector<SimpleSet>& parts);

  Index dim() const { return dim_; }
  bool bounded() const;
  bool is_whole_space() const;
  const std::vector<SetBlock>& blocks() const { return blocks_; }

  bool contains(const Vector& x, double tol = 1e-10) const;

  // Euclidean projection.
  Vector project(const Vector& x) const;

  // An element of the generalized (Clarke) Jacobian of project() at u.
  Matrix projection_jacobian(const Vector& u) const;

  // max <s, x> over the set; throws Unsupported when the set is unbounded
  // in a direction where s is nonzero.
  SupportResult support(const Vector& s) const;

  // sup over the set of the Euclidean distance to x (+inf when unbounded).
  double max_distance(const Vector& x) const;
  // sup of ||x - y|| over pairs of points of the set.
  double diameter() const;

  std::string describe() const;

 private:
  Index dim_ = 0;
  std::vector<SetBlock> blocks_;
};

// Euclidean projection onto {x >= 0, sum x = total} by sort-and-threshold.
Vector project_simplex(const Vector& y, double total = 1.0);

}  // namespace rgvi
