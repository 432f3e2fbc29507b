#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nuspec/geometry.hpp"

namespace nuspec {

inline constexpr double kCriticalTolerance = 1e-12;

// A self-map of S^1 = [0,1) given by a lift F on [0,1] with f = F mod 1.
// F is continuous on [0,1] and monotone between consecutive turning points.
class CircleMap {
 public:
  virtual ~CircleMap() = default;

  virtual double lift(double x) const = 0;
  virtual double derivative(double x) const = 0;
  double evaluate(double x) const { return wrap_unit(lift(x)); }

  // Interior points of (0,1) where F changes monotonicity.
  virtual std::vector<double> turning_points() const { return {}; }

  // Branches partition [0,1) into intervals each mapped onto S^1 once.
  virtual int branch_count() const = 0;
  virtual int branch_of(double x) const = 0;
  // Continuous inverse of branch j on [0,1]; inverse_branch(j, f(x)) = x for x in branch j.
  virtual double inverse_branch(int branch, double y) const = 0;

  // The t with F(x + t) - F(x) = image_offset on the monotone piece containing x.
  // nullopt when no such t exists without crossing a turning point or fold.
  virtual std::optional<double> pull_back_offset(double x, double image_offset) const = 0;

  // Base b for x -> b x mod 1, which admits exact digit coding.
  virtual std::optional<int> digit_base() const { return std::nullopt; }
  virtual double lipschitz() const = 0;
};

class LinearCircleMap final : public CircleMap {
 public:
  explicit LinearCircleMap(int base) : base_(base) {}
  double lift(double x) const override { return base_ * x; }
  double derivative(double) const override { return base_; }
  int branch_count() const override { return base_; }
  int branch_of(double x) const override;
  double inverse_branch(int branch, double y) const override { return (branch + y) / base_; }
  std::optional<double> pull_back_offset(double, double off) const override { return off / base_; }
  std::optional<int> digit_base() const override { return base_; }
  double lipschitz() const override { return base_; }

 private:
  int base_;
};

class ChebyshevMap final : public CircleMap {
 public:
  double lift(double x) const override { return 4.0 * x * (1.0 - x); }
  double derivative(double x) const override { return 4.0 - 8.0 * x; }
  std::vector<double> turning_points() const override { return {0.5}; }
  int branch_count() const override { return 2; }
  int branch_of(double x) const override { return x < 0.5 ? 0 : 1; }
  double inverse_branch(int branch, double y) const override;
  std::optional<double> pull_back_offset(double x, double off) const override;
  double lipschitz() const override { return 4.0; }
};

// x -> x (1 + x^alpha) mod 1; neutral fixed point at 0.
class MannevillePomeauMap final : public CircleMap {
 public:
  explicit MannevillePomeauMap(double alpha);
  double alpha() const { return alpha_; }
  double lift(double x) const override { return x + std::pow(x, 1.0 + alpha_); }
  double derivative(double x) const override { return 1.0 + (1.0 + alpha_) * std::pow(x, alpha_); }
  int branch_count() const override { return 2; }
  int branch_of(double x) const override { return x < split_ ? 0 : 1; }
  double inverse_branch(int branch, double y) const override;
  std::optional<double> pull_back_offset(double x, double off) const override;
  double lipschitz() const override { return 2.0 + alpha_; }
  double split() const { return split_; }

 private:
  double alpha_;
  double split_;  // solves x + x^(1+alpha) = 1
};

struct CriticalSetSpec {
  std::vector<double> points;  // circle coordinates
  double beta = 0.0;
  double bound_B = 1.0;
  double bound_K = 1.0;
};

enum class MeasureKind { lebesgue, chebyshev_arcsine, acip_empirical };

struct ReferenceMeasure {
  MeasureKind kind = MeasureKind::lebesgue;
  std::function<double(Point)> density;        // empty unless analytic
  std::optional<std::vector<double>> exponents;  // ascending; nullopt = unknown
};

std::string_view to_string(MeasureKind kind);

class DynamicalMap {
 public:
  DynamicalMap(std::string id, std::vector<std::shared_ptr<const CircleMap>> factors,
               CriticalSetSpec critical, ReferenceMeasure reference, double lipschitz_bound);

  const std::string& id() const { return id_; }
  PhaseSpace phase_space() const { return factors_.size() == 1 ? PhaseSpace::circle : PhaseSpace::torus; }
  int dimension() const { return static_cast<int>(factors_.size()); }
  const CircleMap& factor(int i) const { return *factors_[static_cast<std::size_t>(i)]; }
  const CriticalSetSpec& critical_set() const { return critical_; }
  const ReferenceMeasure& reference() const { return reference_; }
  double lipschitz_bound() const { return lipschitz_; }

  Point evaluate(Point p) const;
  Jacobian jacobian(Point p) const;
  double distance(Point a, Point b) const { return nuspec::distance(phase_space(), a, b); }

  // All factors are x -> b x mod 1, so digit coding is exact.
  bool exactly_coded() const;
  double critical_distance(Point p) const;  // +inf when the critical set is empty
  bool is_critical(Point p) const { return critical_distance(p) <= kCriticalTolerance; }

 private:
  std::string id_;
  std::vector<std::shared_ptr<const CircleMap>> factors_;
  CriticalSetSpec critical_;
  ReferenceMeasure reference_;
  double lipschitz_;
};

using MapPtr = std::shared_ptr<const DynamicalMap>;

std::vector<std::string> catalog_ids();
// Throws std::invalid_argument for unknown ids or alpha outside (0,1).
MapPtr make_map(std::string_view id, double mp_alpha = 0.5);

Point evaluate(const DynamicalMap& map, Point x);
// log ||Df(x)^{-1}||. +inf at critical points; callers check is_critical first.
double log_inverse_norm(const DynamicalMap& map, Point x);
double truncated_critical_distance(const DynamicalMap& map, Point x, double delta);

struct ConditionResult {
  bool passed = true;
  std::size_t checked = 0;
  double worst_margin = 0.0;  // min over samples of rhs/lhs - 1 (negative on failure)
  std::optional<Point> witness;
};

struct NondegeneracyReport {
  bool vacuous = false;
  std::array<ConditionResult, 4> conditions{};
  bool all_passed() const;
};

NondegeneracyReport check_nondegenerate_critical(const DynamicalMap& map, std::size_t sample_count);
NondegeneracyReport check_nondegenerate_critical(const DynamicalMap& map, const CriticalSetSpec& constants,
                                                 double lipschitz_bound, std::size_t sample_count);

struct Observable {
  std::string name;
  std::function<double(Point)> f;
};

std::vector<Observable> observable_library(PhaseSpace space);

// Integral of an observable against the reference measure. ACIP integrals use a
// long orbit from a fixed internal seed, so repeated calls agree exactly.
double reference_integral(const DynamicalMap& map, const Observable& obs);

}  // namespace nuspec
