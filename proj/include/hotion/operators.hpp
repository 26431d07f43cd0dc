#pragma once

#include <Eigen/SparseCore>

#include <string>
#include <vector>

#include "hotion/hilbert.hpp"

namespace hotion {

/// Physical inputs of the protocol. hbar = 1; frequencies are angular (rad/s)
/// and durations are in seconds.
///
/// Conventions (normative):
///  * qubit |0> is Ground, |1> is Excited;
///  * sigma_z has eigenvalue +1/2 on |1> and -1/2 on |0>, so (sigma_z + 1/2)
///    projects onto |1>.
struct PhysicalParams {
  double eta = 0.1;                      // Lamb-Dicke parameter
  double omega_rad_per_s = 2.0e5 * 3.141592653589793;  // carrier Rabi frequency of the standing wave
  int n_ions = 2;                        // ions sharing the CM mode
  double delta_rad_per_s = 2.0e7 * 3.141592653589793;  // standing-wave detuning
  double delta_stirap_rad_per_s = 0.0;   // one-photon detuning of pump/Stokes from |3>

  void validate() const;
};

/// Conditional-phase coupling eta^2 Omega^2 / (N delta), in rad/s.
double chi(const PhysicalParams& params);
/// Conditional-phase pulse duration pi / chi, in s.
double tau(const PhysicalParams& params);

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

/// A unitary of the ideal (instantaneous) model together with the set of
/// basis states on which it is defined. Applying it to a state with support
/// outside that set raises DomainError, or TruncationLeakage when the
/// offending component sits on the top Fock level.
class IdealUnitary {
 public:
  enum class Exclusion : unsigned char { None, Domain, Truncation };

  IdealUnitary(std::string label, CompositeSpace space, SparseMatrix matrix,
               std::vector<Exclusion> excluded, std::string domain_note);

  const std::string& label() const { return label_; }
  const CompositeSpace& space() const { return space_; }
  const SparseMatrix& matrix() const { return matrix_; }
  const std::vector<Exclusion>& excluded() const { return excluded_; }

  void check(const Vector& amplitudes, double leak_tol = kLeakTol,
             double support_tol = kSupportTol) const;
  void check(const Matrix& rho, double leak_tol = kLeakTol, double support_tol = kSupportTol) const;

  CompositeState apply(const CompositeState& state) const;
  DensityOperator apply(const DensityOperator& rho) const;
  /// U * m without domain checks; used for operator-valued propagation.
  Matrix apply_left(const Matrix& m) const { return matrix_ * m; }
  Vector apply_unchecked(const Vector& v) const { return matrix_ * v; }

  /// max |(U^dagger U - I)_{ij}| over i, j in the declared domain.
  double unitarity_defect() const;

 private:
  std::string label_;
  CompositeSpace space_;
  SparseMatrix matrix_;
  std::vector<Exclusion> excluded_;
  std::string domain_note_;
};

/// S_j: |1>_j|n> -> exp(-i pi (1+epsilon) n) |1>_j|n>, |0>_j|n> unchanged.
/// Defined only where ion j is in its qubit subspace.
IdealUnitary conditional_phase(const CompositeSpace& space, int target_ion, double epsilon = 0.0);

/// hbar chi (a^dagger a) (sigma_z^(j) + 1/2) as a dense matrix. Levels 2 and 3
/// of ion j carry zero energy (the two-level Hamiltonian does not act there).
Matrix hamiltonian_dhelon(const CompositeSpace& space, int target_ion, const PhysicalParams& params);

/// A+_j: |1>_j|n> -> |2>_j|n+1>, identity on |0>_j.
IdealUnitary adiabatic_up(const CompositeSpace& space, int control_ion);
/// A-_j: |2>_j|n+1> -> |1>_j|n>, identity on |0>_j.
IdealUnitary adiabatic_down(const CompositeSpace& space, int control_ion);

/// R(theta, phi) = exp(-i theta/2 (cos(phi) sigma_x + sin(phi) sigma_y)) on
/// {|0>, |1>}, with sigma_x = |0><1| + |1><0| and sigma_y = -i|0><1| + i|1><0|.
Eigen::Matrix2cd rotation_matrix(double theta, double phi);
IdealUnitary carrier_rotation(const CompositeSpace& space, int ion, double theta, double phi);

}  // namespace hotion
