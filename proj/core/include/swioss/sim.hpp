#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "swioss/conditions.hpp"
#include "swioss/family.hpp"
#include "swioss/signals.hpp"

namespace swioss {

// Exogenous input v(t).
struct InputSignal {
  enum class Kind { Zero, Uniform, Expression };

  Kind kind = Kind::Zero;
  double lo = 0.0;
  double hi = 0.0;
  double period = 0.0;  // resampling period; 0 means "every step"
  std::uint64_t seed = 0;
  std::vector<swioss::Expression> components;  // functions of t, one per input

  static InputSignal zero() { return {}; }
  // Piecewise constant, each component drawn uniformly from [lo, hi) once per period.
  static InputSignal uniform(double lo, double hi, std::uint64_t seed, double period = 0.0);
  static InputSignal expression(std::vector<swioss::Expression> components);
};

// Samples on the uniform grid t_k = k h, k = 0..K.  A diverged run is
// truncated just before its first bad node.
struct Trajectory {
  double h = 0.0;
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> y;
  std::vector<Eigen::VectorXd> v;
  std::vector<int> sigma;
  std::vector<double> z;        // optional channels (empty when absent)
  std::vector<double> w;
  std::vector<int> zeta;
  std::vector<int> upsilon;
  bool diverged = false;
  std::size_t first_bad_index = 0;

  std::size_t size() const { return t.size(); }
};

// Constant-step classical Runge-Kutta for x' = f_sigma(x, v).  Every switching
// instant in [0, T] must lie within 1e-9 of a grid node; the new subsystem is
// used from that node on.  The input is held over each step (or evaluated at
// the stage times for expression inputs).  A node with a non-finite state or
// |x| > 1e9 marks the run as diverged.
// Throws SimulationError on misalignment, an empty grid or T beyond the
// signal horizon; DomainError on bad arguments.
Trajectory integrate_switched(const SystemFamily& family, const SwitchingSignal& signal,
                              const InputSignal& input, const Eigen::VectorXd& x0, double h,
                              double T);

// Periodic estimator schedule: 0 on ]kP, kP + dt], 1 on ]kP + dt, (k+1)P] with
// P = dt + Dt, and 0 at t = 0.
int zeta_schedule(double delta_tilde, double Delta_tilde, double t);

struct ScalarChannel {
  std::vector<double> values;  // per node
  std::vector<int> modes;      // per node
  bool diverged = false;
  std::size_t first_bad_index = 0;
};

// Integrates z' = -decay z + g_k (mode 0) or z' = growth z + g_k (mode 1) with
// step_modes[k] and forcing[k] held on [t_k, t_{k+1}).
ScalarChannel integrate_scalar_modes(std::span<const int> step_modes,
                                     std::span<const double> forcing, double decay, double growth,
                                     double z0, double h);

// gamma1(|v_k|) + gamma2(|y_k|) at every node of the trajectory.
std::vector<double> estimator_forcing(const SystemFamily& family, const Trajectory& traj);

// Schedule-driven estimator along a simulated trajectory; step k uses the mode
// at the step midpoint.
ScalarChannel integrate_estimator(const EstimatorCandidate& params, const SystemFamily& family,
                                  const Trajectory& traj, double z0);

// Reference estimator whose mode follows the class of sigma (0 on stable).
ScalarChannel integrate_reference_estimator(const EstimatorCandidate& params,
                                            const SystemFamily& family, const Trajectory& traj,
                                            double w0);

// Runs both estimators and stores z, zeta, w, upsilon in the trajectory.
void attach_estimators(Trajectory& traj, const EstimatorCandidate& params,
                       const SystemFamily& family, double z0, double w0);

}  // namespace swioss
