#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "shadowlab/flow.hpp"
#include "shadowlab/space.hpp"
#include "shadowlab/suspension.hpp"

namespace shadowlab {

/// phi(x, t) = x + t (mod 1) on the circle.
std::shared_ptr<FlowSystem> rotation_flow();
/// theta' = sin^2(theta) with theta = 2 pi x, solved through cot.
std::shared_ptr<FlowSystem> sin_squared_flow();
/// theta' = sin(theta): source at x = 0, sink at x = 1/2.
std::shared_ptr<FlowSystem> north_south_flow();
/// The rotation on both factors of T^2.
std::shared_ptr<FlowSystem> product_rotation_flow();
/// phi((x, y), t) = (x + t, y + alpha t) on T^2.
std::shared_ptr<FlowSystem> irrational_linear_flow(double alpha = 0.6180339887498949);
/// The identity flow on {0, gap}.
std::shared_ptr<FlowSystem> two_point_identity_flow(double gap = 1.0);
/// Classical Lorenz equations, integrated (exploration only).
std::shared_ptr<FlowSystem> lorenz_ode(double sigma = 10.0, double rho = 28.0,
                                       double beta = 8.0 / 3.0);

struct GeometricLorenzParams {
  double lambda_u = 1.0;   // x' = lambda_u x in the saddle box
  double lambda_s = 1.2;   // y' = -lambda_s y
  double lambda_c = 0.6;   // z' = -lambda_c z, weaker than lambda_u
  double c = 1.8;          // return map f(x) = -1 + c x^(lambda_c/lambda_u) for x > 0
  double y_contract = 0.4;
  double y_offset = 0.55;
  double return_time = 6.0;
};

/// Geometric Lorenz template: a linear saddle on [-1,1]^2 x [0,1] entered
/// through the top face z = 1 and left through x = +-1, closed up by two
/// return loops of fixed duration that land back on the top face. It is a
/// forward semiflow: the stable manifold x = 0 never returns.
///
/// Points are (x, y, z, region) with region 0 for the box, 1 and 2 for the
/// right and left loops; the metric is Euclidean on (x, y, z).
class GeometricLorenz final : public FlowSystem {
 public:
  explicit GeometricLorenz(GeometricLorenzParams params = {});
  std::string name() const override { return "geometric-lorenz"; }
  const MetricSpace& space() const override;
  FlowKind kind() const override { return FlowKind::kAnalytic; }
  double speed_bound() const override;
  double lipschitz(double span) const override;
  bool invertible() const override { return false; }
  double horizon() const override { return 1e5; }
  std::optional<Point> adversarial_direction(const Point& x, const Point& anchor) const override;
  std::vector<Point> orbit(const Point& y, double t0, double dt, std::size_t n) const override;

  const GeometricLorenzParams& params() const { return p_; }
  /// Point of the top face at (x, y).
  Point section_point(double x, double y = 0.0) const;
  /// Closed-form return map on the top face (x != 0).
  double return_map(double x) const;
  /// Return map obtained by flowing a top-face point until it lands on the
  /// top face again.
  double computed_return_map(double x) const;
  /// Mean first-return time over `samples` points of the top face.
  double mean_return_time(std::size_t samples = 64) const;
  /// Points spread over the attractor: top-face samples flowed for a while.
  std::vector<Point> attractor_samples(std::size_t n, std::uint64_t seed) const;

 protected:
  Point flow_impl(const Point& x, double t) const override;

 private:
  GeometricLorenzParams p_;
  std::shared_ptr<MetricSpace> space_;
};

/// Throws std::runtime_error unless the normalised return map F(u) =
/// (f(2u - 1) + 1) / 2 satisfies F(0) != 0 or F(1) != 1.
struct ReturnMapCheck {
  double f_left = 0.0;   // F(0)
  double f_right = 0.0;  // F(1)
  double min_slope = 0.0;
  bool ok = false;
};
ReturnMapCheck check_return_map(const GeometricLorenz& model, std::size_t samples = 200);

// ---- base systems

/// Identity on C_n u [1, 2].
std::shared_ptr<BaseSystem> cantor_interval_identity(int level = 6);
/// f = swap on a two-point space of diameter 1.
std::shared_ptr<BaseSystem> two_point_swap();

// ---- registry

using ModelParams = std::map<std::string, double>;

struct ModelInfo {
  std::string name;
  std::string space;
  std::string kind;  // analytic | integrated | suspension-derived | base-map
  std::string claim;
  ModelParams defaults;
  std::function<std::shared_ptr<FlowSystem>(const ModelParams&)> make_flow;
  std::function<std::shared_ptr<BaseSystem>(const ModelParams&)> make_base;
};

class UnknownModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

const std::vector<ModelInfo>& model_registry();
const ModelInfo& find_model(const std::string& name);
/// Flow for a registered model; base-map models are returned as their
/// suspension flow.
std::shared_ptr<FlowSystem> make_flow(const std::string& name, const ModelParams& params = {});
std::shared_ptr<BaseSystem> make_base(const std::string& name, const ModelParams& params = {});

}  // namespace shadowlab
