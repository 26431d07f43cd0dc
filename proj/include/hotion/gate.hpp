#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hotion/hilbert.hpp"
#include "hotion/operators.hpp"
#include "hotion/states.hpp"
#include "hotion/stirap.hpp"

namespace hotion {

enum class GateMode { Ideal, Stirap };

struct GateConfig {
  int control = 0;
  int target = 1;
  int register_ions = 2;  // ions simulated explicitly; spectators stay in |0>
  GateMode mode = GateMode::Ideal;
  PhysicalParams params;
  /// Up-passage schedule (stirap mode). The return passage uses its
  /// time-mirrored counterpart.
  std::optional<StirapSchedule> schedule;
  double epsilon = 0.0;  // relative duration error of both conditional-phase pulses
  bool phase_compensation = false;
  int headroom = 1;  // Fock levels added above the input cutoff for the extra phonon

  void validate() const;
};

/// Wrapper phases of the CNOT construction R_t(pi/2, post) CROT R_t(pi/2, pre).
inline constexpr double kCnotPrePhase = -1.5707963267948966;
inline constexpr double kCnotPostPhase = 1.5707963267948966;

/// The four-pulse sequence S_t, A+_c, S_t, A-_c on a fixed composite space.
/// Operators (and STIRAP block propagators) are built once and reused.
class CrotGate {
 public:
  CrotGate(GateConfig config, CompositeSpace space);

  const GateConfig& config() const { return config_; }
  const CompositeSpace& space() const { return space_; }

  /// Applies the first `pulses` pulses (1..4) with every domain check.
  CompositeState apply(const CompositeState& state, int pulses = 4) const;
  DensityOperator apply(const DensityOperator& rho) const;
  /// Linear action on the columns of `m` (no domain checks).
  Matrix apply_left(const Matrix& m) const;

  const StirapPropagator* up_passage() const { return up_ ? &*up_ : nullptr; }
  const StirapPropagator* down_passage() const { return down_ ? &*down_ : nullptr; }

 private:
  void check_input(const Matrix& diag_source, bool is_density) const;
  void pulse_in_place(int pulse, Eigen::Ref<Vector> v) const;

  GateConfig config_;
  CompositeSpace space_;
  IdealUnitary phase_;
  std::optional<IdealUnitary> up_ideal_;
  std::optional<IdealUnitary> down_ideal_;
  std::optional<StirapPropagator> up_;
  std::optional<StirapPropagator> down_;
};

/// Working space for a phonon input of dimension `phonon_dim`: the configured
/// register with cutoff raised by `headroom`.
CompositeSpace gate_space(const GateConfig& config, Index phonon_dim);

/// Ion-register vector with (control, target) in the two-qubit state `q`
/// (ordering |c t> = 00, 01, 10, 11) and spectators in |0>.
Vector embed_qubits(const GateConfig& config, const Eigen::Vector4cd& q);
/// 4x4 (control, target) qubit block of an ion-space density (spectators in |0>).
Eigen::Matrix4cd qubit_block(const GateConfig& config, const DensityOperator& ion_rho);

CompositeState crot(const CompositeState& input, const GateConfig& config);
DensityOperator crot(const DensityOperator& input, const GateConfig& config);
CompositeState cnot(const CompositeState& input, const GateConfig& config);
DensityOperator cnot(const DensityOperator& input, const GateConfig& config);

/// The ideal CROT diag(1, 1, 1, -1) and CNOT permutation on |c t>.
Eigen::Matrix4cd ideal_crot();
Eigen::Matrix4cd ideal_cnot();

/// M[b, a] = Tr[(<b| (x) 1) G (|a> (x) 1) rho_phonon]; for a pure phonon input
/// this is <b, phi| G |a, phi>. In stirap mode throws AmbiguousExtraction when
/// the phonon factor is restored with fidelity <= 0.9.
Eigen::Matrix4cd truth_table(const GateConfig& config, const PhononInput& phonon);

/// Mean qubit fidelity against ideal CROT over the probe inputs
/// |00>, |01>, |10>, |11>, |++>, |+0>, |0+>, |1+>.
double gate_fidelity(const GateConfig& config, const PhononInput& phonon);

std::array<Eigen::Vector4cd, 8> fidelity_probes();

struct GateReport {
  Eigen::Matrix4cd truth_table = Eigen::Matrix4cd::Zero();
  bool table_extracted = true;     // false: phonon factor not restored, table unreliable
  double table_deviation = 0.0;    // max |M - diag(1,1,1,-1)|
  double qubit_fidelity = 0.0;     // compensated when phase_compensation is on
  double qubit_fidelity_raw = 0.0;
  double qubit_fidelity_compensated = 0.0;
  Eigen::Vector2d frame_correction = Eigen::Vector2d::Zero();  // (control, target) Z phases
  double phonon_restoration_fidelity = 0.0;
  double leakage = 0.0;             // weight outside the qubit subspace, worst probe
  double entanglement_residue = 0.0;  // 1 - purity of the traced qubit state, worst probe
  // stirap mode only, indexed by n
  std::vector<double> efficiency_up;
  std::vector<double> efficiency_down;
  std::vector<double> residual_phase_up;    // NaN where efficiency < 0.5
  std::vector<double> residual_phase_down;
  double adiabaticity_margin = 0.0;
};

GateReport evaluate_gate(const GateConfig& config, const PhononInput& phonon);

struct MixedStateEquivalence {
  double max_deviation = 0.0;  // over every probe input and matrix element
  double discarded_weight = 0.0;
};

/// Runs the gate on a thermal phonon density directly and as the p_n-weighted
/// ensemble of Fock-state runs, and compares the output density operators.
MixedStateEquivalence mixed_state_equivalence(const GateConfig& config, ThermalSpec thermal, int n_max,
                                              double max_discarded = kLeakTol);

}  // namespace hotion
