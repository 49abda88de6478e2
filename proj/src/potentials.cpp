#include "stargraph/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stargraph {

EdgeFunction EdgeFunction::constant(double value, double support_end) {
  if (value == 0.0) return zero();
  return piecewise_constant({0.0, support_end}, {value});
}

EdgeFunction EdgeFunction::piecewise_constant(std::vector<double> knots,
                                              std::vector<double> values) {
  if (knots.size() < 2 || values.size() + 1 != knots.size())
    throw std::invalid_argument("piecewise_constant: sizes mismatch");
  if (!std::is_sorted(knots.begin(), knots.end()))
    throw std::invalid_argument("piecewise_constant: knots must be sorted");
  EdgeFunction f;
  f.kind_ = Kind::PiecewiseConstant;
  f.knots_ = std::move(knots);
  f.values_ = std::move(values);
  return f;
}

EdgeFunction EdgeFunction::polynomial(std::vector<double> coeffs, double lo,
                                      double hi) {
  if (coeffs.empty() || hi <= lo)
    throw std::invalid_argument("polynomial: bad descriptor");
  EdgeFunction f;
  f.kind_ = Kind::Polynomial;
  f.values_ = std::move(coeffs);
  f.lo_ = lo;
  f.hi_ = hi;
  return f;
}

EdgeFunction EdgeFunction::tabulated(std::vector<double> tau,
                                     std::vector<double> value) {
  if (tau.size() < 2 || tau.size() != value.size())
    throw std::invalid_argument("tabulated: need >= 2 matching samples");
  if (!std::is_sorted(tau.begin(), tau.end()))
    throw std::invalid_argument("tabulated: abscissae must be sorted");
  EdgeFunction f;
  f.kind_ = Kind::Tabulated;
  f.knots_ = std::move(tau);
  f.values_ = std::move(value);
  return f;
}

double EdgeFunction::operator()(double tau) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::PiecewiseConstant: {
      if (tau < knots_.front() || tau > knots_.back()) return 0.0;
      auto it = std::upper_bound(knots_.begin(), knots_.end(), tau);
      std::size_t i = static_cast<std::size_t>(it - knots_.begin());
      if (i == 0) i = 1;
      if (i > values_.size()) i = values_.size();
      return values_[i - 1];
    }
    case Kind::Polynomial: {
      if (tau < lo_ || tau > hi_) return 0.0;
      double acc = 0.0;
      for (std::size_t j = values_.size(); j-- > 0;) acc = acc * tau + values_[j];
      return acc;
    }
    case Kind::Tabulated: {
      if (tau < knots_.front() || tau > knots_.back()) return 0.0;
      auto it = std::upper_bound(knots_.begin(), knots_.end(), tau);
      std::size_t i = static_cast<std::size_t>(it - knots_.begin());
      if (i == 0) return values_.front();
      if (i == knots_.size()) return values_.back();
      const double w = (tau - knots_[i - 1]) / (knots_[i] - knots_[i - 1]);
      return (1.0 - w) * values_[i - 1] + w * values_[i];
    }
  }
  return 0.0;
}

double EdgeFunction::integral() const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::PiecewiseConstant: {
      double acc = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i)
        acc += values_[i] * (knots_[i + 1] - knots_[i]);
      return acc;
    }
    case Kind::Polynomial: {
      double acc = 0.0;
      for (std::size_t j = 0; j < values_.size(); ++j)
        acc += values_[j] / double(j + 1) *
               (std::pow(hi_, double(j + 1)) - std::pow(lo_, double(j + 1)));
      return acc;
    }
    case Kind::Tabulated: {
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
        acc += 0.5 * (values_[i] + values_[i + 1]) * (knots_[i + 1] - knots_[i]);
      return acc;
    }
  }
  return 0.0;
}

std::vector<double> EdgeFunction::breakpoints() const {
  std::vector<double> bp;
  switch (kind_) {
    case Kind::Zero:
      break;
    case Kind::PiecewiseConstant:
    case Kind::Tabulated:
      bp = knots_;
      break;
    case Kind::Polynomial:
      bp = {lo_, hi_};
      break;
  }
  bp.erase(std::remove_if(bp.begin(), bp.end(),
                          [](double t) { return t <= 0.0; }),
           bp.end());
  return bp;
}

double EdgeFunction::support_end() const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::PiecewiseConstant:
    case Kind::Tabulated:
      return knots_.back();
    case Kind::Polynomial:
      return hi_;
  }
  return 0.0;
}

double EdgeFunction::first_breakpoint() const {
  auto bp = breakpoints();
  return bp.empty() ? std::numeric_limits<double>::infinity() : bp.front();
}

std::vector<double> EdgeFunction::taylor_at_zero(int order) const {
  std::vector<double> c(order + 1, 0.0);
  switch (kind_) {
    case Kind::Zero:
      break;
    case Kind::PiecewiseConstant:
      if (knots_.front() <= 0.0) c[0] = values_.front();
      break;
    case Kind::Polynomial:
      if (lo_ <= 0.0)
        for (std::size_t j = 0; j < values_.size() && j <= std::size_t(order); ++j)
          c[j] = values_[j];
      break;
    case Kind::Tabulated:
      if (knots_.front() <= 0.0) {
        const double slope =
            (values_[1] - values_[0]) / (knots_[1] - knots_[0]);
        c[0] = values_[0] - slope * knots_[0];
        if (order >= 1) c[1] = slope;
      }
      break;
  }
  return c;
}

ShortRangeSpec::ShortRangeSpec(int edge_count, EdgeFunction kappa_all,
                               EdgeFunction U_all, EdgeFunction V_all)
    : n(edge_count),
      kappa(edge_count, kappa_all),
      U(edge_count, U_all),
      V(edge_count, V_all) {
  validate();
}

ShortRangeSpec::ShortRangeSpec(std::vector<EdgeFunction> kappa_,
                               std::vector<EdgeFunction> U_,
                               std::vector<EdgeFunction> V_)
    : n(static_cast<int>(kappa_.size())),
      kappa(std::move(kappa_)),
      U(std::move(U_)),
      V(std::move(V_)) {
  if (static_cast<int>(U.size()) != n || static_cast<int>(V.size()) != n)
    throw std::invalid_argument("ShortRangeSpec: per-edge lists disagree");
  validate();
}

void ShortRangeSpec::validate() const {
  if (n < 1) throw std::invalid_argument("ShortRangeSpec: empty");
  auto check = [](const EdgeFunction& f, const char* name) {
    if (f.support_end() > 1.0 + 1e-14)
      throw std::invalid_argument(std::string(name) +
                                  ": support must lie in tau <= 1");
  };
  for (const auto& f : kappa) check(f, "kappa");
  for (const auto& f : U) check(f, "U");
  for (const auto& f : V) check(f, "V");
}

RegularizedPotential::RegularizedPotential(CoulombSpec c, ShortRangeSpec sr,
                                           double eps)
    : coulomb(std::move(c)), short_range(std::move(sr)), epsilon(eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("RegularizedPotential: eps must be in (0,1)");
  if (coulomb.n() != short_range.n)
    throw std::invalid_argument("RegularizedPotential: edge counts disagree");
}

double eval_Q(const CoulombSpec& spec, int edge, double tau) {
  if (tau <= 0.0)
    throw std::domain_error("eval_Q: non-integrable singularity at tau = 0");
  return spec.q(edge) / tau;
}

double eval_Qeps(const CoulombSpec& spec, const EdgeFunction& kappa, double eps,
                 int edge, double tau) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("eval_Qeps: eps must be in (0,1)");
  if (tau >= eps) return eval_Q(spec, edge, tau);
  return std::log(eps) / eps * kappa(tau / eps);
}

double eval_Weps(const RegularizedPotential& p, int edge, double tau) {
  const double eps = p.epsilon;
  double w = eval_Qeps(p.coulomb, p.short_range.kappa[edge], eps, edge, tau);
  const double t = tau / eps;
  w += p.short_range.V[edge](t) / (eps * eps);
  w += p.short_range.U[edge](t) / eps;
  return w;
}

}  // namespace stargraph
