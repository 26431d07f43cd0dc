#include "hotion/gate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hotion {

void GateConfig::validate() const {
  if (register_ions < 2) throw ConfigError("GateConfig: register needs at least two ions");
  if (control < 0 || control >= register_ions || target < 0 || target >= register_ions)
    throw ConfigError("GateConfig: control/target index outside the register");
  if (control == target) throw ConfigError("GateConfig: control and target must differ");
  if (headroom < 0) throw ConfigError("GateConfig: headroom must be >= 0");
  if (!std::isfinite(epsilon)) throw ConfigError("GateConfig: epsilon must be finite");
  params.validate();
  if (mode == GateMode::Stirap) {
    if (!schedule) throw ConfigError("GateConfig: schedule required in stirap mode");
    if (schedule->direction != Direction::Up)
      throw ConfigError("GateConfig: the configured schedule is the up-passage; the return is derived");
    schedule->validate();
  }
}

namespace {

Index ion_index(const GateConfig& config, int q) {
  std::vector<Level> levels(config.register_ions, Level::Ground);
  levels[config.control] = (q & 2) ? Level::Excited : Level::Ground;
  levels[config.target] = (q & 1) ? Level::Excited : Level::Ground;
  return CompositeSpace(config.register_ions, 0).encode(levels, 0);
}

}  // namespace

CompositeSpace gate_space(const GateConfig& config, Index phonon_dim) {
  if (phonon_dim < 2) throw ShapeError("gate_space: phonon input needs at least two Fock levels");
  return CompositeSpace(config.register_ions, static_cast<int>(phonon_dim - 1) + config.headroom);
}

Vector embed_qubits(const GateConfig& config, const Eigen::Vector4cd& q) {
  Vector ion = Vector::Zero(CompositeSpace(config.register_ions, 0).dim());
  for (int k = 0; k < 4; ++k) ion(ion_index(config, k)) += q(k);
  return ion;
}

Eigen::Matrix4cd qubit_block(const GateConfig& config, const DensityOperator& ion_rho) {
  Eigen::Matrix4cd b;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) b(x, y) = ion_rho.matrix()(ion_index(config, x), ion_index(config, y));
  return b;
}

Eigen::Matrix4cd ideal_crot() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
  m(3, 3) = -1.0;
  return m;
}

Eigen::Matrix4cd ideal_cnot() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(1, 1) = 1.0;
  m(3, 2) = m(2, 3) = 1.0;
  return m;
}

// ---------------------------------------------------------------------------

namespace {

GateConfig validated(GateConfig c) {
  c.validate();
  return c;
}

}  // namespace

CrotGate::CrotGate(GateConfig config, CompositeSpace space)
    : config_(validated(std::move(config))),
      space_(space),
      phase_(conditional_phase(space, config_.target, config_.epsilon)) {
  if (space_.n_ions() != config_.register_ions)
    throw ShapeError("CrotGate: space has " + std::to_string(space_.n_ions()) + " ions, config expects " +
                     std::to_string(config_.register_ions));
  if (config_.mode == GateMode::Ideal) {
    up_ideal_.emplace(adiabatic_up(space_, config_.control));
    down_ideal_.emplace(adiabatic_down(space_, config_.control));
  } else {
    up_.emplace(*config_.schedule, config_.params, space_.n_max());
    down_.emplace(config_.schedule->reversed(), config_.params, space_.n_max());
  }
}

void CrotGate::check_input(const Matrix& source, bool is_density) const {
  for (Index i = 0; i < space_.dim(); ++i) {
    const double w = is_density ? std::abs(source(i, i)) : std::norm(source(i, 0));
    if (w <= kSupportTol) continue;
    for (int ion : {config_.control, config_.target}) {
      const Level l = space_.level_of(i, ion);
      if (l != Level::Ground && l != Level::Excited)
        throw DomainError("crot: ion " + std::to_string(ion) + " has weight " + std::to_string(w) +
                          " outside its qubit subspace");
    }
  }
}

void CrotGate::pulse_in_place(int pulse, Eigen::Ref<Vector> v) const {
  switch (pulse) {
    case 0:
    case 2: {
      Vector tmp = phase_.matrix() * v;
      v = tmp;
      break;
    }
    case 1:
      if (up_ideal_) {
        Vector tmp = up_ideal_->matrix() * v;
        v = tmp;
      } else {
        up_->apply_in_place(space_, config_.control, v);
      }
      break;
    case 3:
      if (down_ideal_) {
        Vector tmp = down_ideal_->matrix() * v;
        v = tmp;
      } else {
        down_->apply_in_place(space_, config_.control, v);
      }
      break;
    default:
      throw IndexError("CrotGate: pulse index out of range");
  }
}

CompositeState CrotGate::apply(const CompositeState& state, int pulses) const {
  if (!(state.space() == space_)) throw ShapeError("CrotGate: state lives on a different space");
  if (pulses < 0 || pulses > 4) throw IndexError("CrotGate: pulses must be in [0, 4]");
  check_input(state.amplitudes(), false);
  CompositeState s = state;
  for (int p = 0; p < pulses; ++p) {
    switch (p) {
      case 0:
      case 2:
        s = phase_.apply(s);
        break;
      case 1:
        s = up_ideal_ ? up_ideal_->apply(s) : up_->apply(s, config_.control);
        break;
      case 3: {
        // The return passage acts on whatever the forward passage left behind.
        PropagateOptions opts;
        opts.enforce_domain = false;
        s = down_ideal_ ? down_ideal_->apply(s) : down_->apply(s, config_.control, opts);
        break;
      }
    }
  }
  return s;
}

DensityOperator CrotGate::apply(const DensityOperator& rho) const {
  if (!(rho.space() == space_)) throw ShapeError("CrotGate: density lives on a different space");
  check_input(rho.matrix(), true);
  if (config_.mode == GateMode::Ideal) {
    DensityOperator r = phase_.apply(rho);
    r = up_ideal_->apply(r);
    r = phase_.apply(r);
    return down_ideal_->apply(r);
  }
  // Forward passage domain, as in the pure-state path.
  for (Index i = 0; i < space_.dim(); ++i) {
    const Level l = space_.level_of(i, config_.control);
    const double w = std::abs(rho.matrix()(i, i));
    if (l == Level::Excited && space_.phonon_of(i) == space_.n_max() && w > kLeakTol)
      throw TruncationLeakage("crot: weight on |1, n_max> of the control ion has no sideband partner");
  }
  const Matrix left = apply_left(rho.matrix());
  const Matrix both = apply_left(left.adjoint()).adjoint();
  const double drift = std::abs(both.trace().real() - rho.trace());
  if (drift > 1e-9) throw NormDrift("crot: trace drifted by " + std::to_string(drift));
  return DensityOperator(space_, both);
}

Matrix CrotGate::apply_left(const Matrix& m) const {
  if (m.rows() != space_.dim()) throw ShapeError("CrotGate::apply_left: row count mismatch");
  Matrix out = m;
  for (int p = 0; p < 4; ++p) {
    if (p == 1 && up_ideal_) {
      out = up_ideal_->matrix() * out;
    } else if (p == 3 && down_ideal_) {
      out = down_ideal_->matrix() * out;
    } else if (p == 0 || p == 2) {
      out = phase_.matrix() * out;
    } else {
      for (Index c = 0; c < out.cols(); ++c) pulse_in_place(p, out.col(c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

CompositeState crot(const CompositeState& input, const GateConfig& config) {
  return CrotGate(config, input.space()).apply(input);
}

DensityOperator crot(const DensityOperator& input, const GateConfig& config) {
  return CrotGate(config, input.space()).apply(input);
}

CompositeState cnot(const CompositeState& input, const GateConfig& config) {
  const CrotGate gate(config, input.space());
  const auto pre = carrier_rotation(input.space(), config.target, std::numbers::pi / 2, kCnotPrePhase);
  const auto post = carrier_rotation(input.space(), config.target, std::numbers::pi / 2, kCnotPostPhase);
  return post.apply(gate.apply(pre.apply(input)));
}

DensityOperator cnot(const DensityOperator& input, const GateConfig& config) {
  const CrotGate gate(config, input.space());
  const auto pre = carrier_rotation(input.space(), config.target, std::numbers::pi / 2, kCnotPrePhase);
  const auto post = carrier_rotation(input.space(), config.target, std::numbers::pi / 2, kCnotPostPhase);
  return post.apply(gate.apply(pre.apply(input)));
}

std::array<Eigen::Vector4cd, 8> fidelity_probes() {
  const double h = 1.0 / std::sqrt(2.0);
  const Eigen::Vector2cd zero(1.0, 0.0), one(0.0, 1.0), plus(h, h);
  auto kron = [](const Eigen::Vector2cd& c, const Eigen::Vector2cd& t) {
    Eigen::Vector4cd v;
    v << c(0) * t(0), c(0) * t(1), c(1) * t(0), c(1) * t(1);
    return v;
  };
  return {kron(zero, zero), kron(zero, one), kron(one, zero), kron(one, one),
          kron(plus, plus), kron(plus, zero), kron(zero, plus), kron(one, plus)};
}

// ---------------------------------------------------------------------------

namespace {

struct ProbeResult {
  Eigen::Matrix4cd qubit;
  double out_of_subspace = 0.0;
  double phonon_fidelity = 0.0;
};

class Evaluator {
 public:
  Evaluator(const GateConfig& config, const PhononInput& phonon)
      : config_(config), space_(gate_space(config, phonon_dim(phonon))), gate_(config, space_) {
    const Index p = space_.phonon_dim();
    if (const auto* v = std::get_if<Vector>(&phonon)) {
      phi_ = Vector::Zero(p);
      phi_->head(v->size()) = *v;
      rho_ = *phi_ * phi_->adjoint();
    } else {
      const Matrix& m = std::get<DensityOperator>(phonon).matrix();
      rho_ = Matrix::Zero(p, p);
      rho_.topLeftCorner(m.rows(), m.cols()) = m;
    }
    input_dim_ = phonon_dim(phonon);
  }

  const CrotGate& gate() const { return gate_; }
  Index input_dim() const { return input_dim_; }

  ProbeResult run(const Eigen::Vector4cd& q) const {
    const Vector ion = embed_qubits(config_, q);
    auto reduce = [](const auto& out) {
      return std::pair{partial_trace_phonon(out), partial_trace_ions(out)};
    };
    const auto [ion_rho, phonon_rho] =
        phi_ ? reduce(gate_.apply(CompositeState::product(space_, ion, *phi_)))
             : reduce(gate_.apply(DensityOperator::product(space_, ion * ion.adjoint(), rho_)));
    ProbeResult r;
    r.qubit = qubit_block(config_, ion_rho);
    r.out_of_subspace = std::max(0.0, ion_rho.trace() - r.qubit.trace().real());
    r.phonon_fidelity = phi_ ? fidelity(*phi_, phonon_rho.matrix()) : fidelity(rho_, phonon_rho.matrix());
    return r;
  }

  Eigen::Matrix4cd table() const {
    const Index p = space_.phonon_dim();
    Eigen::Matrix4cd m;
    for (int a = 0; a < 4; ++a) {
      const Index ia = ion_index(config_, a);
      Matrix x = Matrix::Zero(space_.dim(), p);
      x.block(ia * p, 0, p, p) = rho_;
      const Matrix z = gate_.apply_left(x);
      for (int b = 0; b < 4; ++b) m(b, a) = z.block(ion_index(config_, b) * p, 0, p, p).trace();
    }
    return m;
  }

 private:
  GateConfig config_;
  CompositeSpace space_;
  CrotGate gate_;
  std::optional<Vector> phi_;
  Matrix rho_;
  Index input_dim_ = 0;
};

double probe_fidelity(const Eigen::Matrix4cd& block, const Eigen::Vector4cd& ideal) {
  return std::clamp(ideal.dot(block * ideal).real(), 0.0, 1.0);
}

double wrap_phase(double x) {
  double y = std::remainder(x, 2.0 * std::numbers::pi);
  if (y <= -std::numbers::pi) y += 2.0 * std::numbers::pi;
  return y;
}

}  // namespace

GateReport evaluate_gate(const GateConfig& config, const PhononInput& phonon) {
  config.validate();
  const Evaluator ev(config, phonon);
  const auto probes = fidelity_probes();
  const Eigen::Matrix4cd ideal = ideal_crot();

  GateReport rep;
  std::array<ProbeResult, 8> results;
  for (std::size_t k = 0; k < probes.size(); ++k) results[k] = ev.run(probes[k]);

  rep.phonon_restoration_fidelity = 1.0;
  for (std::size_t k = 0; k < 4; ++k)
    rep.phonon_restoration_fidelity = std::min(rep.phonon_restoration_fidelity, results[k].phonon_fidelity);
  rep.table_extracted = config.mode == GateMode::Ideal || rep.phonon_restoration_fidelity > 0.9;

  rep.truth_table = ev.table();
  rep.table_deviation = (rep.truth_table - ideal).cwiseAbs().maxCoeff();

  Eigen::Vector4cd correction = Eigen::Vector4cd::Ones();
  if (rep.table_extracted && std::abs(rep.truth_table(0, 0)) > 0.0) {
    const double theta_t = std::arg(rep.truth_table(1, 1) / rep.truth_table(0, 0));
    const double theta_c = std::arg(rep.truth_table(2, 2) / rep.truth_table(0, 0));
    rep.frame_correction = {theta_c, theta_t};
    correction << 1.0, std::polar(1.0, -theta_t), std::polar(1.0, -theta_c),
        std::polar(1.0, -theta_c - theta_t);
  }

  double raw = 0.0, compensated = 0.0;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const Eigen::Vector4cd target = ideal * probes[k];
    const Eigen::Matrix4cd& b = results[k].qubit;
    raw += probe_fidelity(b, target);
    const Eigen::Matrix4cd corrected = correction.asDiagonal() * b * correction.conjugate().asDiagonal();
    compensated += probe_fidelity(corrected, target);
    rep.leakage = std::max(rep.leakage, results[k].out_of_subspace);
    const double tr = b.trace().real();
    if (tr > 0.0) {
      const double purity = (b * b).trace().real() / (tr * tr);
      rep.entanglement_residue = std::max(rep.entanglement_residue, std::max(0.0, 1.0 - purity));
    }
  }
  rep.qubit_fidelity_raw = raw / probes.size();
  rep.qubit_fidelity_compensated = compensated / probes.size();
  rep.qubit_fidelity = config.phase_compensation ? rep.qubit_fidelity_compensated : rep.qubit_fidelity_raw;

  if (config.mode == GateMode::Stirap) {
    const auto* up = ev.gate().up_passage();
    const auto* down = ev.gate().down_passage();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int n = 0; n < static_cast<int>(ev.input_dim()); ++n) {
      const cplx au = up->transfer_amplitude(n);
      const cplx ad = down->transfer_amplitude(n);
      rep.efficiency_up.push_back(std::norm(au));
      rep.efficiency_down.push_back(std::norm(ad));
      rep.residual_phase_up.push_back(std::norm(au) >= 0.5 ? wrap_phase(std::arg(au)) : nan);
      rep.residual_phase_down.push_back(std::norm(ad) >= 0.5 ? wrap_phase(std::arg(ad)) : nan);
    }
    rep.adiabaticity_margin = adiabaticity_margin(*config.schedule, config.params, 0);
  }
  return rep;
}

Eigen::Matrix4cd truth_table(const GateConfig& config, const PhononInput& phonon) {
  const GateReport rep = evaluate_gate(config, phonon);
  if (!rep.table_extracted)
    throw AmbiguousExtraction("truth_table: phonon factor restored with fidelity " +
                              std::to_string(rep.phonon_restoration_fidelity) +
                              " <= 0.9; qubit action is entangled with the phonon mode");
  return rep.truth_table;
}

double gate_fidelity(const GateConfig& config, const PhononInput& phonon) {
  return evaluate_gate(config, phonon).qubit_fidelity;
}

MixedStateEquivalence mixed_state_equivalence(const GateConfig& config, ThermalSpec thermal, int n_max,
                                              double max_discarded) {
  config.validate();
  const TruncatedDensity th = thermal_state(thermal, n_max, max_discarded);
  const CompositeSpace space = gate_space(config, n_max + 1);
  const CrotGate gate(config, space);

  MixedStateEquivalence result;
  result.discarded_weight = th.discarded_weight;
  for (const auto& q : fidelity_probes()) {
    const Vector ion = embed_qubits(config, q);
    const DensityOperator direct =
        gate.apply(DensityOperator::product(space, ion * ion.adjoint(), th.rho.matrix()));

    Matrix ensemble = Matrix::Zero(space.dim(), space.dim());
    for (int n = 0; n <= n_max; ++n) {
      const double p = th.rho.matrix()(n, n).real();
      if (p == 0.0) continue;
      const CompositeState out = gate.apply(CompositeState::product(space, ion, fock_state(n, n_max)));
      ensemble += p * out.amplitudes() * out.amplitudes().adjoint();
    }
    result.max_deviation = std::max(result.max_deviation, (direct.matrix() - ensemble).cwiseAbs().maxCoeff());
  }
  return result;
}

}  // namespace hotion
