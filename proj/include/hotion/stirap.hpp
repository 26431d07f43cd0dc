#pragma once

#include <cstdint>
#include <vector>

#include "hotion/hilbert.hpp"
#include "hotion/operators.hpp"

namespace hotion {

enum class PulseShape { Sin2, Gaussian };

/// Rabi-frequency envelope. For sin^2 pulses `width` is the full support,
/// Omega(t) = peak sin^2(pi (t - center + width/2) / width) inside it and 0
/// outside. For Gaussian pulses `width` is the standard deviation.
struct PulseEnvelope {
  PulseShape shape = PulseShape::Sin2;
  double peak_rabi = 0.0;  // rad/s
  double center = 0.0;     // s
  double width = 1.0;      // s

  double operator()(double t) const;
  void validate() const;
};

enum class Direction { Up, Down };

/// Pump/Stokes pair driving the Lambda system of the control ion:
/// pump couples |1,n> <-> |3,n> (carrier) and Stokes couples
/// |2,n+1> <-> |3,n> (red sideband, Rabi rate eta sqrt(n+1) Omega_S(t)).
/// The one-photon detuning comes from PhysicalParams::delta_stirap_rad_per_s.
struct StirapSchedule {
  PulseEnvelope pump;
  PulseEnvelope stokes;
  double duration = 0.0;  // s
  std::int64_t steps = 1;
  Direction direction = Direction::Up;

  double dt() const { return duration / static_cast<double>(steps); }

  /// Up needs the Stokes pulse first, Down needs the pump first.
  void validate() const;

  /// Time-mirrored schedule (t -> T - t) with the opposite direction: the
  /// pump and Stokes exchange their order.
  StirapSchedule reversed() const;

  /// Counter-intuitive layout on [0, T]: Stokes on [0, 2T/3], pump on [T/3, T].
  /// `stokes_peak` is the bare Stokes Rabi rate before the eta sqrt(n+1) factor.
  static StirapSchedule counter_intuitive(double duration, std::int64_t steps, double pump_peak,
                                          double stokes_peak, PulseShape shape = PulseShape::Sin2);
};

/// Effective sideband Rabi rate eta sqrt(n+1) * Omega_S(t).
double stokes_rabi(const StirapSchedule& schedule, const PhysicalParams& params, int n, double t);

/// Rotating-frame block over {|1,n>, |3,n>, |2,n+1>}: diag(0, Delta, 0) with
/// Omega_p/2 and Omega_S,n/2 off-diagonals. Throws IndexError when n >= n_max.
Eigen::Matrix3d hamiltonian_block(int n, double t, const StirapSchedule& schedule,
                                  const PhysicalParams& params, int n_max);

/// Time-ordered product of exact step exponentials exp(-i H(t_k + dt/2) dt).
Eigen::Matrix3cd block_propagator(int n, const StirapSchedule& schedule, const PhysicalParams& params);

struct PropagateOptions {
  bool enforce_domain = true;
  double leak_tol = kLeakTol;
  double support_tol = kSupportTol;
  double norm_tol = 1e-9;
};

/// Per-n block propagators for one schedule, reusable across many states.
class StirapPropagator {
 public:
  StirapPropagator(const StirapSchedule& schedule, const PhysicalParams& params, int n_max);

  const StirapSchedule& schedule() const { return schedule_; }
  int n_max() const { return static_cast<int>(blocks_.size()); }
  const Eigen::Matrix3cd& block(int n) const { return blocks_.at(n); }

  /// Amplitude of the intended transfer in block n: <2,n+1|U|1,n> for Up,
  /// <1,n|U|2,n+1> for Down.
  cplx transfer_amplitude(int n) const;

  CompositeState apply(const CompositeState& state, int control, const PropagateOptions& opts = {}) const;
  /// In-place application on a raw amplitude vector (no domain checks).
  void apply_in_place(const CompositeSpace& space, int control, Eigen::Ref<Vector> amplitudes) const;

 private:
  StirapSchedule schedule_;
  std::vector<Eigen::Matrix3cd> blocks_;
};

/// Full-state propagation. Components with the control ion in |0> are
/// untouched; blocks for different n are independent.
CompositeState propagate(const CompositeState& state, int control, const StirapSchedule& schedule,
                         const PhysicalParams& params, const PropagateOptions& opts = {});

double transfer_efficiency(int n, const StirapSchedule& schedule, const PhysicalParams& params);
/// arg of the transfer amplitude in (-pi, pi]; UndefinedPhase below 50 % transfer.
double residual_phase(int n, const StirapSchedule& schedule, const PhysicalParams& params);
/// min(T Omega_p,peak, T Omega_S,n,peak).
double adiabaticity_margin(const StirapSchedule& schedule, const PhysicalParams& params, int n);
/// Largest |3,n> population seen at the step boundaries.
double max_intermediate_population(int n, const StirapSchedule& schedule, const PhysicalParams& params);

struct TracePoint {
  double t = 0.0;
  double omega_pump = 0.0;
  double omega_stokes = 0.0;  // sideband rate for the selected n
  double pop_excited = 0.0;   // |1,n>
  double pop_intermediate = 0.0;  // |3,n>
  double pop_shelf = 0.0;     // |2,n+1>
};

/// Populations of block n sampled every `stride` steps (the last step is
/// always included). Starts in |1,n> for Up and |2,n+1> for Down.
std::vector<TracePoint> trace_block(int n, const StirapSchedule& schedule, const PhysicalParams& params,
                                    std::int64_t stride = 1);

struct MarginSearchResult {
  bool found = false;
  double margin = 0.0;  // M*: smallest sampled margin meeting the threshold
  StirapSchedule schedule;
  std::vector<double> efficiencies;  // per n at M*
  std::vector<double> sampled_margins;
  std::vector<double> sampled_min_efficiency;
};

/// Scans counter-intuitive sin^2 schedules with pump and Stokes peaks chosen so
/// that T Omega_p = T eta Omega_S = margin, and returns the first margin (on
/// the sampled grid) whose transfer efficiency reaches `threshold` for every
/// n in [0, n_hi].
MarginSearchResult find_minimal_margin(const PhysicalParams& params, double pump_peak, int n_hi,
                                       double threshold, const std::vector<double>& margins,
                                       double steps_per_margin);

}  // namespace hotion
