#include "hotion/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hotion {

FockSpace::FockSpace(int n_max_) : n_max(n_max_) {
  if (n_max < 1) throw IndexError("FockSpace: n_max must be >= 1, got " + std::to_string(n_max));
}

CompositeSpace::CompositeSpace(int n_ions, int n_max) : n_ions_(n_ions), n_max_(n_max), ion_dim_(1) {
  if (n_ions < 0) throw IndexError("CompositeSpace: negative ion count");
  if (n_max < 0) throw IndexError("CompositeSpace: negative n_max");
  for (int i = 0; i < n_ions; ++i) ion_dim_ *= kIonLevels;
}

Index CompositeSpace::stride_of(int ion) const {
  Index stride = phonon_dim();
  for (int i = n_ions_ - 1; i > ion; --i) stride *= kIonLevels;
  return stride;
}

Index CompositeSpace::encode(std::span<const Level> levels, int n) const {
  if (static_cast<int>(levels.size()) != n_ions_)
    throw IndexError("encode: expected " + std::to_string(n_ions_) + " ion levels, got " +
                     std::to_string(levels.size()));
  if (n < 0 || n > n_max_)
    throw IndexError("encode: phonon number " + std::to_string(n) + " outside [0, " +
                     std::to_string(n_max_) + "]");
  Index block = 0;
  for (Level l : levels) {
    const int v = static_cast<int>(l);
    if (v < 0 || v >= kIonLevels) throw IndexError("encode: ion level out of range");
    block = block * kIonLevels + v;
  }
  return block * phonon_dim() + n;
}

CompositeSpace::Label CompositeSpace::decode(Index index) const {
  if (index < 0 || index >= dim()) throw IndexError("decode: index out of range");
  Label label;
  label.n = phonon_of(index);
  label.levels.resize(n_ions_);
  Index block = ion_block_of(index);
  for (int i = n_ions_ - 1; i >= 0; --i) {
    label.levels[i] = static_cast<Level>(block % kIonLevels);
    block /= kIonLevels;
  }
  return label;
}

Level CompositeSpace::level_of(Index index, int ion) const {
  return static_cast<Level>((index / stride_of(ion)) % kIonLevels);
}

Index CompositeSpace::with(Index index, int ion, Level level, int n) const {
  const Index stride = stride_of(ion);
  const Index current = (index / stride) % kIonLevels;
  Index out = index + (static_cast<Index>(level) - current) * stride;
  return out - phonon_of(out) + n;
}

// ---------------------------------------------------------------------------

CompositeState::CompositeState(CompositeSpace space, Vector amplitudes)
    : space_(space), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_.dim())
    throw ShapeError("CompositeState: amplitude vector has length " +
                     std::to_string(amplitudes_.size()) + ", space dimension is " +
                     std::to_string(space_.dim()));
}

namespace {

Vector pad_phonon(const Vector& phonon, Index dim) {
  if (phonon.size() > dim)
    throw ShapeError("phonon vector longer than the space's phonon dimension");
  Vector out = Vector::Zero(dim);
  out.head(phonon.size()) = phonon;
  return out;
}

Matrix pad_phonon(const Matrix& phonon, Index dim) {
  if (phonon.rows() != phonon.cols() || phonon.rows() > dim)
    throw ShapeError("phonon density does not fit the space's phonon dimension");
  Matrix out = Matrix::Zero(dim, dim);
  out.topLeftCorner(phonon.rows(), phonon.cols()) = phonon;
  return out;
}

}  // namespace

CompositeState CompositeState::product(const CompositeSpace& space, const Vector& ion_state,
                                       const Vector& phonon) {
  if (ion_state.size() != space.ion_dim()) throw ShapeError("product: ion state dimension mismatch");
  const Vector ph = pad_phonon(phonon, space.phonon_dim());
  Vector amps(space.dim());
  for (Index b = 0; b < space.ion_dim(); ++b) amps.segment(b * space.phonon_dim(), space.phonon_dim()) = ion_state(b) * ph;
  return CompositeState(space, std::move(amps));
}

CompositeState CompositeState::basis(const CompositeSpace& space, std::span<const Level> levels,
                                     const Vector& phonon) {
  Vector ion = Vector::Zero(space.ion_dim());
  ion(space.encode(levels, 0) / space.phonon_dim()) = 1.0;
  return product(space, ion, phonon);
}

void CompositeState::normalize() {
  const double n = amplitudes_.norm();
  if (n == 0.0) throw DomainError("normalize: zero vector");
  amplitudes_ /= n;
}

// ---------------------------------------------------------------------------

DensityOperator::DensityOperator(CompositeSpace space, Matrix matrix)
    : space_(space), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim())
    throw ShapeError("DensityOperator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                     std::to_string(matrix_.cols()) + ", space dimension is " +
                     std::to_string(space_.dim()));
}

DensityOperator DensityOperator::pure(const CompositeState& state) {
  return pure(state.space(), state.amplitudes());
}

DensityOperator DensityOperator::pure(const CompositeSpace& space, const Vector& amplitudes) {
  return DensityOperator(space, amplitudes * amplitudes.adjoint());
}

DensityOperator DensityOperator::product(const CompositeSpace& space, const Matrix& ion,
                                         const Matrix& phonon) {
  if (ion.rows() != space.ion_dim() || ion.cols() != space.ion_dim())
    throw ShapeError("product: ion density dimension mismatch");
  const Matrix ph = pad_phonon(phonon, space.phonon_dim());
  const Index p = space.phonon_dim();
  Matrix m(space.dim(), space.dim());
  for (Index i = 0; i < ion.rows(); ++i)
    for (Index j = 0; j < ion.cols(); ++j) m.block(i * p, j * p, p, p) = ion(i, j) * ph;
  return DensityOperator(space, std::move(m));
}

double DensityOperator::hermiticity_defect() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityOperator::min_eigenvalue() const {
  const Matrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool DensityOperator::is_valid(double herm_tol, double trace_tol, double eig_tol) const {
  if (hermiticity_defect() > herm_tol) return false;
  if (std::abs(matrix_.trace() - cplx(1.0)) > trace_tol) return false;
  return min_eigenvalue() >= -eig_tol;
}

// ---------------------------------------------------------------------------

ParityParts parity_decompose(const Vector& phonon) {
  ParityParts parts{Vector::Zero(phonon.size()), Vector::Zero(phonon.size())};
  for (Index n = 0; n < phonon.size(); ++n) (n % 2 == 0 ? parts.even : parts.odd)(n) = phonon(n);
  return parts;
}

Vector shift_up(const Vector& phonon, double leak_tol) {
  const Index top = phonon.size() - 1;
  if (top < 0) throw ShapeError("shift_up: empty phonon vector");
  if (std::norm(phonon(top)) > leak_tol)
    throw TruncationLeakage("shift_up: population " + std::to_string(std::norm(phonon(top))) +
                            " on the top Fock level would be pushed past n_max");
  Vector out = Vector::Zero(phonon.size());
  out.tail(top) = phonon.head(top);
  return out;
}

Vector shift_down(const Vector& phonon, double support_tol) {
  if (phonon.size() == 0) throw ShapeError("shift_down: empty phonon vector");
  if (std::norm(phonon(0)) > support_tol)
    throw DomainError("shift_down: vacuum component has no phonon to remove");
  Vector out = Vector::Zero(phonon.size());
  out.head(phonon.size() - 1) = phonon.tail(phonon.size() - 1);
  return out;
}

double mean_occupation(const Vector& phonon) {
  double acc = 0.0;
  for (Index n = 0; n < phonon.size(); ++n) acc += static_cast<double>(n) * std::norm(phonon(n));
  return acc;
}

double mean_occupation(const DensityOperator& phonon_rho) {
  const Matrix& m = phonon_rho.matrix();
  const Index p = phonon_rho.space().phonon_dim();
  double acc = 0.0;
  for (Index i = 0; i < m.rows(); ++i) acc += static_cast<double>(i % p) * m(i, i).real();
  return acc;
}

DensityOperator partial_trace_phonon(const DensityOperator& rho) {
  const CompositeSpace& s = rho.space();
  const Index p = s.phonon_dim();
  const Matrix& m = rho.matrix();
  Matrix out(s.ion_dim(), s.ion_dim());
  for (Index i = 0; i < s.ion_dim(); ++i)
    for (Index j = 0; j < s.ion_dim(); ++j) out(i, j) = m.block(i * p, j * p, p, p).trace();
  return DensityOperator(s.ion_space(), std::move(out));
}

DensityOperator partial_trace_ions(const DensityOperator& rho) {
  const CompositeSpace& s = rho.space();
  const Index p = s.phonon_dim();
  const Matrix& m = rho.matrix();
  Matrix out = Matrix::Zero(p, p);
  for (Index b = 0; b < s.ion_dim(); ++b) out += m.block(b * p, b * p, p, p);
  return DensityOperator(s.phonon_space(), std::move(out));
}

DensityOperator partial_trace_phonon(const CompositeState& state) {
  const CompositeSpace& s = state.space();
  // Rows index the ion block, columns the phonon number.
  const Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(
      state.amplitudes().data(), s.ion_dim(), s.phonon_dim());
  return DensityOperator(s.ion_space(), psi * psi.adjoint());
}

DensityOperator partial_trace_ions(const CompositeState& state) {
  const CompositeSpace& s = state.space();
  const Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(
      state.amplitudes().data(), s.ion_dim(), s.phonon_dim());
  return DensityOperator(s.phonon_space(), (psi.adjoint() * psi).transpose());
}

// ---------------------------------------------------------------------------

namespace {

void require_same_dim(Index a, Index b) {
  if (a != b)
    throw ShapeError("fidelity: dimension mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Eigenvalues below the numerical-rank threshold are treated as zero; their
// rounding noise would otherwise enter every square root at sqrt(eps).
Eigen::VectorXd rank_clean(Eigen::VectorXd ev) {
  const double cut = 8.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(ev.size()) *
                     std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (auto& x : ev)
    if (x < cut) x = 0.0;
  return ev;
}

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  const Eigen::VectorXd roots = rank_clean(es.eigenvalues()).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const Vector& a, const Vector& b) {
  require_same_dim(a.size(), b.size());
  return clamp01(std::norm(a.dot(b)));
}

double fidelity(const Vector& a, const Matrix& rho) {
  require_same_dim(a.size(), rho.rows());
  require_same_dim(rho.rows(), rho.cols());
  return clamp01(a.dot(rho * a).real());
}

double fidelity(const Matrix& rho, const Vector& a) { return fidelity(a, rho); }

double fidelity(const Matrix& rho, const Matrix& sigma) {
  require_same_dim(rho.rows(), sigma.rows());
  require_same_dim(rho.cols(), sigma.cols());
  // (Tr |sqrt(rho) sqrt(sigma)|)^2; singular values avoid a second square root
  const Matrix prod = psd_sqrt(rho) * psd_sqrt(sigma);
  const double t = Eigen::JacobiSVD<Matrix>(prod).singularValues().sum();
  return clamp01(t * t);
}

double fidelity(const CompositeState& a, const CompositeState& b) {
  return fidelity(a.amplitudes(), b.amplitudes());
}
double fidelity(const CompositeState& a, const DensityOperator& rho) {
  return fidelity(a.amplitudes(), rho.matrix());
}
double fidelity(const DensityOperator& rho, const CompositeState& a) { return fidelity(a, rho); }
double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  return fidelity(rho.matrix(), sigma.matrix());
}

}  // namespace hotion
