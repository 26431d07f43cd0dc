#include "hotion/operators.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hotion {

void PhysicalParams::validate() const {
  if (!(eta > 0.0)) throw DomainError("PhysicalParams: eta must be > 0");
  if (!(omega_rad_per_s > 0.0)) throw DomainError("PhysicalParams: omega must be > 0");
  if (n_ions < 1) throw DomainError("PhysicalParams: n_ions must be >= 1");
  if (delta_rad_per_s == 0.0) throw DivisionByZero("PhysicalParams: delta must be non-zero");
  if (!std::isfinite(delta_stirap_rad_per_s))
    throw DomainError("PhysicalParams: STIRAP detuning must be finite");
}

double chi(const PhysicalParams& p) {
  if (p.delta_rad_per_s == 0.0) throw DivisionByZero("chi: detuning delta is zero");
  if (p.n_ions == 0) throw DivisionByZero("chi: ion count N is zero");
  return p.eta * p.eta * p.omega_rad_per_s * p.omega_rad_per_s /
         (static_cast<double>(p.n_ions) * p.delta_rad_per_s);
}

double tau(const PhysicalParams& p) {
  const double c = chi(p);
  if (!(c > 0.0)) throw NonPositiveChi("tau: chi = " + std::to_string(c) + " is not positive");
  return std::numbers::pi / c;
}

// ---------------------------------------------------------------------------

IdealUnitary::IdealUnitary(std::string label, CompositeSpace space, SparseMatrix matrix,
                           std::vector<Exclusion> excluded, std::string domain_note)
    : label_(std::move(label)),
      space_(space),
      matrix_(std::move(matrix)),
      excluded_(std::move(excluded)),
      domain_note_(std::move(domain_note)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim() ||
      static_cast<Index>(excluded_.size()) != space_.dim())
    throw ShapeError("IdealUnitary: shape does not match its space");
}

namespace {

void report_violation(const std::string& label, const std::string& note, const CompositeSpace& s,
                      IdealUnitary::Exclusion kind, Index idx, double weight) {
  const auto lab = s.decode(idx);
  std::string where = "|";
  for (std::size_t i = 0; i < lab.levels.size(); ++i)
    where += (i ? "," : "") + std::to_string(static_cast<int>(lab.levels[i]));
  where += "; n=" + std::to_string(lab.n) + ">";
  const std::string msg = label + ": weight " + std::to_string(weight) + " on " + where;
  if (kind == IdealUnitary::Exclusion::Truncation)
    throw TruncationLeakage(msg + " would be pushed past n_max = " + std::to_string(s.n_max()));
  throw DomainError(msg + " outside the operator domain (" + note + ")");
}

}  // namespace

void IdealUnitary::check(const Vector& amplitudes, double leak_tol, double support_tol) const {
  if (amplitudes.size() != space_.dim()) throw ShapeError(label_ + ": state dimension mismatch");
  for (Index i = 0; i < amplitudes.size(); ++i) {
    const Exclusion e = excluded_[i];
    if (e == Exclusion::None) continue;
    const double w = std::norm(amplitudes(i));
    if (w > (e == Exclusion::Truncation ? leak_tol : support_tol))
      report_violation(label_, domain_note_, space_, e, i, w);
  }
}

void IdealUnitary::check(const Matrix& rho, double leak_tol, double support_tol) const {
  if (rho.rows() != space_.dim() || rho.cols() != space_.dim())
    throw ShapeError(label_ + ": density dimension mismatch");
  // For a positive operator a zero diagonal entry forces the whole row and column to vanish.
  for (Index i = 0; i < rho.rows(); ++i) {
    const Exclusion e = excluded_[i];
    if (e == Exclusion::None) continue;
    const double w = std::abs(rho(i, i));
    if (w > (e == Exclusion::Truncation ? leak_tol : support_tol))
      report_violation(label_, domain_note_, space_, e, i, w);
  }
}

CompositeState IdealUnitary::apply(const CompositeState& state) const {
  if (!(state.space() == space_)) throw ShapeError(label_ + ": state lives on a different space");
  check(state.amplitudes());
  return CompositeState(space_, matrix_ * state.amplitudes());
}

DensityOperator IdealUnitary::apply(const DensityOperator& rho) const {
  if (!(rho.space() == space_)) throw ShapeError(label_ + ": density lives on a different space");
  check(rho.matrix());
  const Matrix left = matrix_ * rho.matrix();
  Matrix out = (matrix_ * left.adjoint()).adjoint();
  return DensityOperator(space_, std::move(out));
}

double IdealUnitary::unitarity_defect() const {
  const SparseMatrix gram = matrix_.adjoint() * matrix_;
  double worst = 0.0;
  const Matrix dense(gram);
  for (Index j = 0; j < dense.cols(); ++j) {
    if (excluded_[j] != Exclusion::None) continue;
    for (Index i = 0; i < dense.rows(); ++i) {
      if (excluded_[i] != Exclusion::None) continue;
      worst = std::max(worst, std::abs(dense(i, j) - (i == j ? cplx(1.0) : cplx(0.0))));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

void check_ion(const CompositeSpace& space, int ion, const char* what) {
  if (ion < 0 || ion >= space.n_ions())
    throw IndexError(std::string(what) + ": ion index " + std::to_string(ion) + " outside register of " +
                     std::to_string(space.n_ions()));
}

using Triplet = Eigen::Triplet<cplx>;

SparseMatrix from_triplets(const CompositeSpace& space, const std::vector<Triplet>& t) {
  SparseMatrix m(space.dim(), space.dim());
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

bool in_qubit(Level l) { return l == Level::Ground || l == Level::Excited; }

}  // namespace

IdealUnitary conditional_phase(const CompositeSpace& space, int target, double epsilon) {
  check_ion(space, target, "conditional_phase");
  std::vector<Triplet> t;
  std::vector<IdealUnitary::Exclusion> excl(space.dim(), IdealUnitary::Exclusion::None);
  t.reserve(space.dim());
  for (Index i = 0; i < space.dim(); ++i) {
    const Level l = space.level_of(i, target);
    if (!in_qubit(l)) {
      excl[i] = IdealUnitary::Exclusion::Domain;
      t.emplace_back(i, i, 1.0);
      continue;
    }
    const int n = space.phonon_of(i);
    cplx phase = 1.0;
    if (l == Level::Excited) {
      phase = epsilon == 0.0 ? cplx(n % 2 == 0 ? 1.0 : -1.0)
                             : std::polar(1.0, -std::numbers::pi * (1.0 + epsilon) * n);
    }
    t.emplace_back(i, i, phase);
  }
  return IdealUnitary("S_" + std::to_string(target), space, from_triplets(space, t), std::move(excl),
                      "target ion must stay in its qubit subspace");
}

Matrix hamiltonian_dhelon(const CompositeSpace& space, int target, const PhysicalParams& params) {
  check_ion(space, target, "hamiltonian_dhelon");
  const double c = chi(params);
  Matrix h = Matrix::Zero(space.dim(), space.dim());
  for (Index i = 0; i < space.dim(); ++i)
    if (space.level_of(i, target) == Level::Excited) h(i, i) = c * space.phonon_of(i);
  return h;
}

IdealUnitary adiabatic_up(const CompositeSpace& space, int control) {
  check_ion(space, control, "adiabatic_up");
  std::vector<Triplet> t;
  std::vector<IdealUnitary::Exclusion> excl(space.dim(), IdealUnitary::Exclusion::None);
  for (Index i = 0; i < space.dim(); ++i) {
    const int n = space.phonon_of(i);
    switch (space.level_of(i, control)) {
      case Level::Ground:
        t.emplace_back(i, i, 1.0);
        break;
      case Level::Excited:
        if (n == space.n_max())
          excl[i] = IdealUnitary::Exclusion::Truncation;
        else
          t.emplace_back(space.with(i, control, Level::Shelf, n + 1), i, 1.0);
        break;
      default:
        excl[i] = IdealUnitary::Exclusion::Domain;
    }
  }
  return IdealUnitary("A+_" + std::to_string(control), space, from_triplets(space, t), std::move(excl),
                      "control ion must be in |0> or |1>");
}

IdealUnitary adiabatic_down(const CompositeSpace& space, int control) {
  check_ion(space, control, "adiabatic_down");
  std::vector<Triplet> t;
  std::vector<IdealUnitary::Exclusion> excl(space.dim(), IdealUnitary::Exclusion::None);
  for (Index i = 0; i < space.dim(); ++i) {
    const int n = space.phonon_of(i);
    switch (space.level_of(i, control)) {
      case Level::Ground:
        t.emplace_back(i, i, 1.0);
        break;
      case Level::Shelf:
        if (n == 0)
          excl[i] = IdealUnitary::Exclusion::Domain;
        else
          t.emplace_back(space.with(i, control, Level::Excited, n - 1), i, 1.0);
        break;
      default:
        excl[i] = IdealUnitary::Exclusion::Domain;
    }
  }
  return IdealUnitary("A-_" + std::to_string(control), space, from_triplets(space, t), std::move(excl),
                      "control ion must be in |0> or in |2> with at least one phonon");
}

Eigen::Matrix2cd rotation_matrix(double theta, double phi) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd r;
  r << c, -i * std::polar(1.0, -phi) * s,
       -i * std::polar(1.0, phi) * s, c;
  return r;
}

IdealUnitary carrier_rotation(const CompositeSpace& space, int ion, double theta, double phi) {
  check_ion(space, ion, "carrier_rotation");
  const Eigen::Matrix2cd r = rotation_matrix(theta, phi);
  std::vector<Triplet> t;
  std::vector<IdealUnitary::Exclusion> excl(space.dim(), IdealUnitary::Exclusion::None);
  for (Index i = 0; i < space.dim(); ++i) {
    const Level l = space.level_of(i, ion);
    if (!in_qubit(l)) {
      excl[i] = IdealUnitary::Exclusion::Domain;
      t.emplace_back(i, i, 1.0);
      continue;
    }
    const int col = static_cast<int>(l);
    const int n = space.phonon_of(i);
    for (int row = 0; row < 2; ++row) {
      const cplx v = r(row, col);
      if (v != cplx(0.0)) t.emplace_back(space.with(i, ion, static_cast<Level>(row), n), i, v);
    }
  }
  return IdealUnitary("R_" + std::to_string(ion), space, from_triplets(space, t), std::move(excl),
                      "rotated ion must stay in its qubit subspace");
}

}  // namespace hotion
