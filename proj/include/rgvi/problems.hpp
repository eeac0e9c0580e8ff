#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rgvi/composite.hpp"
#include "rgvi/metric.hpp"
#include "rgvi/operator.hpp"

namespace rgvi {

enum class ProblemClass { variational_inequality, minimization };

const char* to_string(ProblemClass c);

// Operator + composite term + metric, with an optional known solution and the
// radii used by certificates and baseline bounds.
struct ProblemInstance {
  std::string name;
  ProblemClass problem_class = ProblemClass::variational_inequality;
  std::shared_ptr<const Operator> op;
  CompositeTerm psi;
  Metric metric;
  Vector x0;
  std::optional<Vector> x_star;
  std::optional<double> f_star;  // F(x*) for composite minimization
  std::optional<double> R0;      // sup ||x - x0|| over dom psi (bounded domains)
  std::optional<double> D;       // sup ||x - x*|| over dom psi (bounded domains)
  // Bilinear games keep their payoff matrix for exact merit evaluation.
  std::optional<Matrix> game_matrix;

  Index dim() const { return op->dim(); }
  const OperatorConstants& constants() const { return op->constants(); }

  // F(x) = f(x) + psi(x); requires a potential.
  double objective(const Vector& x) const;

  // Checks operator monotonicity, first-derivative accuracy, convexity of psi
  // and the strong-solution property of x* on sampled points. Throws InvalidInput.
  void validate(int samples = 200, std::uint64_t seed = 7) const;
};

// ---- instance zoo -------------------------------------------------------------

// VI on Delta_n x Delta_m with V(x, y) = (A^T y, -A x); x* from the LP solve.
ProblemInstance make_bilinear_game(const Matrix& a);
ProblemInstance make_matching_pennies();
ProblemInstance make_random_bilinear_game(Index m, Index n, std::uint64_t seed);

// f(x) = |x_1|^3 + sum |x_{i+1} - 2 x_i|^3, psi = 0, x* = 0, x0 = (1, ..., 1).
ProblemInstance make_chained_cubic(Index n);

// V(x) = (S + mu I)(x - x*), S skew with ||S + mu I|| = L.
ProblemInstance make_strongly_monotone_affine(Index n, double mu, double lipschitz, std::uint64_t seed,
                                              SetKind domain = SetKind::whole_space);

// f(x) = 0.5<Qx,x> - <c,x> with x* from the module's own solve.
ProblemInstance make_quadratic(const Matrix& q, const Vector& c, CompositeTerm psi);
ProblemInstance make_composite_quadratic(Index n, CompositeKind psi_kind, std::uint64_t seed,
                                         SetKind set_kind = SetKind::box);

// Bilinear game plus kappa (z - z*) .* |z - z*|: same equilibrium, M_2 = 2 kappa.
ProblemInstance make_curved_game(const Matrix& a, double kappa);
ProblemInstance make_random_curved_game(Index m, Index n, double kappa, std::uint64_t seed);

// V(x) = omega J x on a Euclidean ball of the plane, J the rotation generator.
ProblemInstance make_rotation_ball(double radius, double omega = 1.0);

// Descriptor used by experiment configs: zoo name + string parameters.
struct InstanceDescriptor {
  std::string name;
  std::map<std::string, std::string> params;
};

struct ZooEntry {
  std::string name;
  std::string parameters;
  std::string summary;
};

std::vector<ZooEntry> list_problems();

// Throws InvalidInput naming the offending field for unknown names/parameters.
ProblemInstance make_instance(const InstanceDescriptor& descriptor);

}  // namespace rgvi
