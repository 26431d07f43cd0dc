#include "hotion/stirap.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hotion {

double PulseEnvelope::operator()(double t) const {
  if (shape == PulseShape::Gaussian) {
    const double x = (t - center) / width;
    return peak_rabi * std::exp(-0.5 * x * x);
  }
  const double x = (t - center) / width + 0.5;
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double s = std::sin(std::numbers::pi * x);
  return peak_rabi * s * s;
}

void PulseEnvelope::validate() const {
  if (!(peak_rabi >= 0.0) || !std::isfinite(peak_rabi))
    throw DomainError("PulseEnvelope: peak Rabi rate must be finite and >= 0");
  if (!(width > 0.0) || !std::isfinite(width)) throw DomainError("PulseEnvelope: width must be > 0");
  if (!std::isfinite(center)) throw DomainError("PulseEnvelope: center must be finite");
}

void StirapSchedule::validate() const {
  pump.validate();
  stokes.validate();
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw DomainError("StirapSchedule: duration must be > 0");
  if (steps < 1) throw DomainError("StirapSchedule: need at least one integration step");
  if (direction == Direction::Up && !(stokes.center < pump.center))
    throw DomainError("StirapSchedule: up-passage needs the Stokes pulse before the pump "
                      "(counter-intuitive ordering)");
  if (direction == Direction::Down && !(pump.center < stokes.center))
    throw DomainError("StirapSchedule: down-passage needs the pump pulse before the Stokes pulse");
}

StirapSchedule StirapSchedule::reversed() const {
  StirapSchedule r = *this;
  r.pump.center = duration - pump.center;
  r.stokes.center = duration - stokes.center;
  r.direction = direction == Direction::Up ? Direction::Down : Direction::Up;
  return r;
}

StirapSchedule StirapSchedule::counter_intuitive(double duration, std::int64_t steps, double pump_peak,
                                                 double stokes_peak, PulseShape shape) {
  StirapSchedule s;
  s.duration = duration;
  s.steps = steps;
  s.direction = Direction::Up;
  // sin^2 pulses of support 2T/3; Gaussians with the same centres and sigma T/6.
  const double width = shape == PulseShape::Sin2 ? 2.0 * duration / 3.0 : duration / 6.0;
  s.stokes = {shape, stokes_peak, duration / 3.0, width};
  s.pump = {shape, pump_peak, 2.0 * duration / 3.0, width};
  return s;
}

double stokes_rabi(const StirapSchedule& schedule, const PhysicalParams& params, int n, double t) {
  return params.eta * std::sqrt(static_cast<double>(n) + 1.0) * schedule.stokes(t);
}

namespace {

Eigen::Matrix3d block_at(int n, double t, const StirapSchedule& s, const PhysicalParams& p) {
  const double wp = 0.5 * s.pump(t);
  const double ws = 0.5 * stokes_rabi(s, p, n, t);
  Eigen::Matrix3d h;
  h << 0.0, wp, 0.0,
       wp, p.delta_stirap_rad_per_s, ws,
       0.0, ws, 0.0;
  return h;
}

Eigen::Matrix3cd step_unitary(const Eigen::Matrix3d& h, double dt) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
  const Eigen::Matrix3d& v = es.eigenvectors();
  Eigen::Vector3cd phases;
  for (int k = 0; k < 3; ++k) phases(k) = std::polar(1.0, -es.eigenvalues()(k) * dt);
  return v.cast<cplx>() * phases.asDiagonal() * v.transpose().cast<cplx>();
}

}  // namespace

Eigen::Matrix3d hamiltonian_block(int n, double t, const StirapSchedule& schedule,
                                  const PhysicalParams& params, int n_max) {
  if (n < 0 || n >= n_max)
    throw IndexError("hamiltonian_block: n = " + std::to_string(n) + " has no |n+1> partner below n_max = " +
                     std::to_string(n_max));
  return block_at(n, t, schedule, params);
}

Eigen::Matrix3cd block_propagator(int n, const StirapSchedule& schedule, const PhysicalParams& params) {
  schedule.validate();
  const double dt = schedule.dt();
  Eigen::Matrix3cd u = Eigen::Matrix3cd::Identity();
  for (std::int64_t k = 0; k < schedule.steps; ++k) {
    const double t_mid = (static_cast<double>(k) + 0.5) * dt;
    u = step_unitary(block_at(n, t_mid, schedule, params), dt) * u;
  }
  return u;
}

// ---------------------------------------------------------------------------

StirapPropagator::StirapPropagator(const StirapSchedule& schedule, const PhysicalParams& params, int n_max)
    : schedule_(schedule) {
  schedule.validate();
  blocks_.reserve(n_max);
  for (int n = 0; n < n_max; ++n) blocks_.push_back(block_propagator(n, schedule, params));
}

cplx StirapPropagator::transfer_amplitude(int n) const {
  const auto& u = blocks_.at(n);
  return schedule_.direction == Direction::Up ? u(2, 0) : u(0, 2);
}

void StirapPropagator::apply_in_place(const CompositeSpace& space, int control,
                                      Eigen::Ref<Vector> amps) const {
  if (space.n_max() > n_max())
    throw ShapeError("StirapPropagator: built for n_max = " + std::to_string(n_max()) +
                     ", state has n_max = " + std::to_string(space.n_max()));
  for (Index i = 0; i < space.dim(); ++i) {
    if (space.level_of(i, control) != Level::Excited) continue;
    const int n = space.phonon_of(i);
    if (n >= space.n_max()) continue;
    const Index i3 = space.with(i, control, Level::Intermediate, n);
    const Index i2 = space.with(i, control, Level::Shelf, n + 1);
    const Eigen::Vector3cd in(amps(i), amps(i3), amps(i2));
    const Eigen::Vector3cd out = blocks_[n] * in;
    amps(i) = out(0);
    amps(i3) = out(1);
    amps(i2) = out(2);
  }
}

CompositeState StirapPropagator::apply(const CompositeState& state, int control,
                                       const PropagateOptions& opts) const {
  const CompositeSpace& space = state.space();
  if (control < 0 || control >= space.n_ions()) throw IndexError("propagate: control ion out of range");
  if (opts.enforce_domain) {
    const bool up = schedule_.direction == Direction::Up;
    for (Index i = 0; i < space.dim(); ++i) {
      const double w = std::norm(state.amplitudes()(i));
      if (w == 0.0) continue;
      const Level l = space.level_of(i, control);
      const bool allowed = l == Level::Ground || l == (up ? Level::Excited : Level::Shelf);
      if (!allowed && w > opts.support_tol)
        throw DomainError(std::string("propagate: control ion has weight ") + std::to_string(w) +
                          " on level " + std::to_string(static_cast<int>(l)) + "; " +
                          (up ? "up-passage accepts |0> and |1> only" : "down-passage accepts |0> and |2> only"));
      if (up && l == Level::Excited && space.phonon_of(i) == space.n_max() && w > opts.leak_tol)
        throw TruncationLeakage("propagate: weight " + std::to_string(w) +
                                " on |1, n_max> has no sideband partner");
    }
  }
  CompositeState out = state;
  apply_in_place(space, control, out.amplitudes());
  const double drift = std::abs(out.norm() - state.norm());
  if (drift > opts.norm_tol) throw NormDrift("propagate: norm drifted by " + std::to_string(drift));
  return out;
}

CompositeState propagate(const CompositeState& state, int control, const StirapSchedule& schedule,
                         const PhysicalParams& params, const PropagateOptions& opts) {
  return StirapPropagator(schedule, params, state.space().n_max()).apply(state, control, opts);
}

// ---------------------------------------------------------------------------

namespace {

cplx transfer_amp(int n, const StirapSchedule& schedule, const PhysicalParams& params) {
  if (n < 0) throw IndexError("transfer: negative phonon number");
  const Eigen::Matrix3cd u = block_propagator(n, schedule, params);
  return schedule.direction == Direction::Up ? u(2, 0) : u(0, 2);
}

}  // namespace

double transfer_efficiency(int n, const StirapSchedule& schedule, const PhysicalParams& params) {
  return std::clamp(std::norm(transfer_amp(n, schedule, params)), 0.0, 1.0);
}

double residual_phase(int n, const StirapSchedule& schedule, const PhysicalParams& params) {
  const cplx a = transfer_amp(n, schedule, params);
  if (std::norm(a) < 0.5)
    throw UndefinedPhase("residual_phase: transfer efficiency " + std::to_string(std::norm(a)) +
                         " < 0.5 at n = " + std::to_string(n));
  double phase = std::arg(a);
  if (phase <= -std::numbers::pi) phase += 2.0 * std::numbers::pi;
  return phase;
}

double adiabaticity_margin(const StirapSchedule& schedule, const PhysicalParams& params, int n) {
  const double pump = schedule.duration * schedule.pump.peak_rabi;
  const double stokes =
      schedule.duration * params.eta * std::sqrt(static_cast<double>(n) + 1.0) * schedule.stokes.peak_rabi;
  return std::min(pump, stokes);
}

std::vector<TracePoint> trace_block(int n, const StirapSchedule& schedule, const PhysicalParams& params,
                                    std::int64_t stride) {
  schedule.validate();
  if (n < 0) throw IndexError("trace_block: negative phonon number");
  if (stride < 1) throw DomainError("trace_block: stride must be >= 1");
  const double dt = schedule.dt();
  Eigen::Vector3cd psi = Eigen::Vector3cd::Zero();
  psi(schedule.direction == Direction::Up ? 0 : 2) = 1.0;

  std::vector<TracePoint> out;
  out.reserve(static_cast<std::size_t>(schedule.steps / stride + 2));
  auto record = [&](std::int64_t k) {
    const double t = static_cast<double>(k) * dt;
    out.push_back({t, schedule.pump(t), stokes_rabi(schedule, params, n, t), std::norm(psi(0)),
                   std::norm(psi(1)), std::norm(psi(2))});
  };
  record(0);
  for (std::int64_t k = 0; k < schedule.steps; ++k) {
    const double t_mid = (static_cast<double>(k) + 0.5) * dt;
    psi = step_unitary(block_at(n, t_mid, schedule, params), dt) * psi;
    if ((k + 1) % stride == 0 || k + 1 == schedule.steps) record(k + 1);
  }
  return out;
}

double max_intermediate_population(int n, const StirapSchedule& schedule, const PhysicalParams& params) {
  double worst = 0.0;
  for (const auto& p : trace_block(n, schedule, params, 1)) worst = std::max(worst, p.pop_intermediate);
  return worst;
}

MarginSearchResult find_minimal_margin(const PhysicalParams& params, double pump_peak, int n_hi,
                                       double threshold, const std::vector<double>& margins,
                                       double steps_per_margin) {
  if (!(pump_peak > 0.0)) throw DomainError("find_minimal_margin: pump peak must be > 0");
  MarginSearchResult result;
  for (double m : margins) {
    const double duration = m / pump_peak;
    const auto steps = static_cast<std::int64_t>(std::ceil(steps_per_margin * m));
    StirapSchedule s = StirapSchedule::counter_intuitive(duration, steps, pump_peak, pump_peak / params.eta);
    std::vector<double> eff;
    eff.reserve(n_hi + 1);
    for (int n = 0; n <= n_hi; ++n) eff.push_back(transfer_efficiency(n, s, params));
    const double worst = *std::min_element(eff.begin(), eff.end());
    result.sampled_margins.push_back(m);
    result.sampled_min_efficiency.push_back(worst);
    if (worst >= threshold) {
      result.found = true;
      result.margin = adiabaticity_margin(s, params, 0);
      result.schedule = s;
      result.efficiencies = std::move(eff);
      break;
    }
  }
  return result;
}

}  // namespace hotion
