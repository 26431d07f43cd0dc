#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "hotion/errors.hpp"

namespace hotion {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Largest probability allowed on the top Fock level before an operation
/// that adds a phonon refuses to run.
inline constexpr double kLeakTol = 1e-8;
/// Probability below which a basis component counts as "no support".
inline constexpr double kSupportTol = 1e-12;
inline constexpr int kDefaultNMax = 32;

/// Internal levels of one ion. Only Ground/Excited form the qubit; Shelf is
/// the auxiliary state reached by adiabatic passage and Intermediate is the
/// detuned level the Raman pair couples through.
enum class Level : int { Ground = 0, Excited = 1, Shelf = 2, Intermediate = 3 };
inline constexpr int kIonLevels = 4;

/// Truncated Fock space {|0>, ..., |n_max>}.
struct FockSpace {
  int n_max = kDefaultNMax;

  explicit FockSpace(int n_max_);
  int dim() const { return n_max + 1; }
};

/// Tensor product of `n_ions` four-level ions and one truncated bosonic mode.
///
/// Flat index layout (normative): ion 0 is the most significant digit, the
/// phonon number is the least significant,
///
///   index = ((l_0 * 4 + l_1) * 4 + ... + l_{k-1}) * (n_max + 1) + n.
///
/// A space with zero ions is a bare phonon space; `n_max == 0` is used for
/// ion-only spaces (e.g. after tracing out the phonon mode).
class CompositeSpace {
 public:
  CompositeSpace(int n_ions, int n_max);

  int n_ions() const { return n_ions_; }
  int n_max() const { return n_max_; }
  Index phonon_dim() const { return n_max_ + 1; }
  Index ion_dim() const { return ion_dim_; }
  Index dim() const { return ion_dim_ * phonon_dim(); }

  Index encode(std::span<const Level> levels, int n) const;

  struct Label {
    std::vector<Level> levels;
    int n = 0;
    bool operator==(const Label&) const = default;
  };
  Label decode(Index index) const;

  Level level_of(Index index, int ion) const;
  int phonon_of(Index index) const { return static_cast<int>(index % phonon_dim()); }
  Index ion_block_of(Index index) const { return index / phonon_dim(); }
  /// Index with ion `ion` replaced by `level` and phonon number replaced by `n`.
  Index with(Index index, int ion, Level level, int n) const;

  CompositeSpace ion_space() const { return CompositeSpace(n_ions_, 0); }
  CompositeSpace phonon_space() const { return CompositeSpace(0, n_max_); }

  bool operator==(const CompositeSpace& other) const = default;

 private:
  Index stride_of(int ion) const;

  int n_ions_;
  int n_max_;
  Index ion_dim_;
};

/// Pure state on a composite space.
class CompositeState {
 public:
  CompositeState(CompositeSpace space, Vector amplitudes);

  /// |ion> (x) |phonon>. The phonon vector may be shorter than the space's
  /// phonon dimension; missing top levels are zero-filled.
  static CompositeState product(const CompositeSpace& space, const Vector& ion_state,
                                const Vector& phonon);
  static CompositeState basis(const CompositeSpace& space, std::span<const Level> levels,
                              const Vector& phonon);

  const CompositeSpace& space() const { return space_; }
  const Vector& amplitudes() const { return amplitudes_; }
  Vector& amplitudes() { return amplitudes_; }

  double norm() const { return amplitudes_.norm(); }
  void normalize();

 private:
  CompositeSpace space_;
  Vector amplitudes_;
};

/// Density operator on a composite space.
class DensityOperator {
 public:
  DensityOperator(CompositeSpace space, Matrix matrix);

  static DensityOperator pure(const CompositeState& state);
  static DensityOperator pure(const CompositeSpace& space, const Vector& amplitudes);
  /// rho_ion (x) rho_phonon. `phonon` may be smaller than the target phonon
  /// dimension and is zero-padded.
  static DensityOperator product(const CompositeSpace& space, const Matrix& ion,
                                 const Matrix& phonon);

  const CompositeSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }
  Matrix& matrix() { return matrix_; }

  double trace() const { return matrix_.trace().real(); }
  double hermiticity_defect() const;
  double min_eigenvalue() const;
  /// Hermitian within 1e-12, unit trace within 1e-12, eigenvalues >= -1e-10.
  bool is_valid(double herm_tol = 1e-12, double trace_tol = 1e-12,
                double eig_tol = 1e-10) const;

 private:
  CompositeSpace space_;
  Matrix matrix_;
};

struct ParityParts {
  Vector even;
  Vector odd;
};

/// Splits phonon amplitudes into even- and odd-occupation parts.
ParityParts parity_decompose(const Vector& phonon);

/// Adds one quantum: out[n+1] = in[n], out[0] = 0. Throws TruncationLeakage
/// if |in[n_max]|^2 exceeds `leak_tol`.
Vector shift_up(const Vector& phonon, double leak_tol = kLeakTol);
/// Removes one quantum: out[n] = in[n+1]. Throws DomainError if the vacuum
/// carries support (there is no phonon to remove).
Vector shift_down(const Vector& phonon, double support_tol = kSupportTol);

/// Expectation of the number operator for a phonon vector or phonon-only density.
double mean_occupation(const Vector& phonon);
double mean_occupation(const DensityOperator& phonon_rho);

DensityOperator partial_trace_phonon(const DensityOperator& rho);
DensityOperator partial_trace_ions(const DensityOperator& rho);
/// Ion-space reduced density of a pure composite state.
DensityOperator partial_trace_phonon(const CompositeState& state);
DensityOperator partial_trace_ions(const CompositeState& state);

/// |<a|b>|^2 for pure states, <a|rho|a> for mixed/pure and the Uhlmann
/// fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 for two mixed states.
double fidelity(const Vector& a, const Vector& b);
double fidelity(const Vector& a, const Matrix& rho);
double fidelity(const Matrix& rho, const Vector& a);
double fidelity(const Matrix& rho, const Matrix& sigma);

double fidelity(const CompositeState& a, const CompositeState& b);
double fidelity(const CompositeState& a, const DensityOperator& rho);
double fidelity(const DensityOperator& rho, const CompositeState& a);
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

}  // namespace hotion
