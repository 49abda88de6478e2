#pragma once

#include <string>
#include <vector>

#include "stargraph/graph.hpp"

namespace stargraph {

/// Bounded real function on a half-line edge with compact support.
/// Supported forms: piecewise-constant, polynomial on an interval, and
/// tabulated with linear interpolation. Short-range potentials are required
/// to vanish for tau > 1.
class EdgeFunction {
 public:
  enum class Kind { Zero, PiecewiseConstant, Polynomial, Tabulated };

  EdgeFunction() : kind_(Kind::Zero) {}

  static EdgeFunction zero() { return EdgeFunction(); }
  static EdgeFunction constant(double value, double support_end = 1.0);
  /// values[i] on (knots[i], knots[i+1]); zero outside [knots.front(), knots.back()].
  static EdgeFunction piecewise_constant(std::vector<double> knots,
                                         std::vector<double> values);
  /// sum coeffs[j] tau^j on [lo, hi]; zero outside.
  static EdgeFunction polynomial(std::vector<double> coeffs, double lo = 0.0,
                                 double hi = 1.0);
  /// Linear interpolation through (tau[i], value[i]); zero outside the table.
  static EdgeFunction tabulated(std::vector<double> tau,
                                std::vector<double> value);

  double operator()(double tau) const;
  double integral() const;
  /// Points where the function or its derivative may jump (support edges
  /// included). Sorted, positive.
  std::vector<double> breakpoints() const;
  double support_end() const;
  /// First positive breakpoint (radius of analyticity at 0); +inf if none.
  double first_breakpoint() const;
  /// Taylor coefficients at tau = 0+, valid on (0, first_breakpoint()).
  std::vector<double> taylor_at_zero(int order) const;

  bool is_zero() const { return kind_ == Kind::Zero; }
  bool is_piecewise_constant() const {
    return kind_ == Kind::Zero || kind_ == Kind::PiecewiseConstant;
  }
  Kind kind() const { return kind_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& piece_values() const { return values_; }

 private:
  Kind kind_;
  std::vector<double> knots_;   // pc knots / table abscissae
  std::vector<double> values_;  // pc piece values / table values / poly coeffs
  double lo_ = 0.0, hi_ = 0.0;  // polynomial support
};

/// Coulomb coupling constants q_1, ..., q_n: the potential is q_k / tau on
/// edge k.
struct CoulombSpec {
  Eigen::VectorXd q;

  CoulombSpec() = default;
  explicit CoulombSpec(Eigen::VectorXd q_) : q(std::move(q_)) {}
  static CoulombSpec zeros(int n) { return CoulombSpec(Eigen::VectorXd::Zero(n)); }
  int n() const { return static_cast<int>(q.size()); }
  bool is_zero() const { return q.size() == 0 || q.isZero(0.0); }
};

/// The short-range data (kappa, U, V), one function per edge, each supported
/// in tau <= 1.
struct ShortRangeSpec {
  int n = 0;
  std::vector<EdgeFunction> kappa, U, V;

  ShortRangeSpec() = default;
  /// Broadcasts single descriptors to all edges.
  ShortRangeSpec(int edge_count, EdgeFunction kappa_all, EdgeFunction U_all,
                 EdgeFunction V_all);
  ShortRangeSpec(std::vector<EdgeFunction> kappa_, std::vector<EdgeFunction> U_,
                 std::vector<EdgeFunction> V_);

  static ShortRangeSpec none(int edge_count) {
    return ShortRangeSpec(edge_count, EdgeFunction::zero(), EdgeFunction::zero(),
                          EdgeFunction::zero());
  }
  void validate() const;
};

/// The full regularized family W_eps = Q_eps + eps^-2 V(tau/eps) + eps^-1 U(tau/eps).
struct RegularizedPotential {
  CoulombSpec coulomb;
  ShortRangeSpec short_range;
  double epsilon = 0.0;

  RegularizedPotential(CoulombSpec c, ShortRangeSpec sr, double eps);
};

/// Q_k(tau) = q_k / tau. Throws on tau = 0 (non-integrable singularity).
double eval_Q(const CoulombSpec& spec, int edge, double tau);

/// Cut-off Coulomb potential: Q for tau > eps, (ln eps / eps) kappa(tau/eps)
/// for tau < eps. The value at tau = eps is assigned to the Q branch.
double eval_Qeps(const CoulombSpec& spec, const EdgeFunction& kappa, double eps,
                 int edge, double tau);

double eval_Weps(const RegularizedPotential& p, int edge, double tau);

}  // namespace stargraph
