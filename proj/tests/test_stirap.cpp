#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hotion/stirap.hpp"
#include "test_support.hpp"

using namespace hotion;

namespace {

constexpr double kPump = 1.0e5;  // rad/s

PhysicalParams params(double delta = 0.0) {
  PhysicalParams p;
  p.eta = 0.1;
  p.delta_stirap_rad_per_s = delta;
  return p;
}

/// Counter-intuitive sin^2 pair with T Omega_p = T eta Omega_S = margin.
StirapSchedule at_margin(double margin, double steps_per_margin = 100.0) {
  const auto steps = static_cast<std::int64_t>(std::ceil(margin * steps_per_margin));
  return StirapSchedule::counter_intuitive(margin / kPump, steps, kPump, kPump / 0.1);
}

std::vector<Level> levels(std::initializer_list<int> l) {
  std::vector<Level> out;
  for (int v : l) out.push_back(static_cast<Level>(v));
  return out;
}

/// Dense Hamiltonian of the Lambda system on a single-ion composite space,
/// built from operator products rather than per-n blocks.
Matrix full_hamiltonian(const CompositeSpace& s, const StirapSchedule& sched, const PhysicalParams& p,
                        double t) {
  const int n_max = s.n_max();
  const Matrix I = test::identity(n_max + 1);
  const Matrix pump = test::ketbra(4, 1, 3) + test::ketbra(4, 3, 1);
  const Matrix stokes_up = test::embed(1, 0, test::ketbra(4, 2, 3), test::creation_op(n_max));
  return p.delta_stirap_rad_per_s * test::embed(1, 0, test::ketbra(4, 3, 3), I) +
         0.5 * sched.pump(t) * test::embed(1, 0, pump, I) +
         0.5 * p.eta * sched.stokes(t) * (stokes_up + Matrix(stokes_up.adjoint()));
}

Matrix full_propagator(const CompositeSpace& s, const StirapSchedule& sched, const PhysicalParams& p) {
  Matrix u = test::identity(s.dim());
  const double dt = sched.dt();
  for (std::int64_t k = 0; k < sched.steps; ++k) {
    const Matrix h = full_hamiltonian(s, sched, p, (static_cast<double>(k) + 0.5) * dt);
    u = (cplx(0, -dt) * h).exp() * u;
  }
  return u;
}

}  // namespace

TEST(Stirap, EnvelopeShapes) {
  PulseEnvelope e{PulseShape::Sin2, 2.0, 5.0, 4.0};
  EXPECT_DOUBLE_EQ(e(5.0), 2.0);
  EXPECT_EQ(e(3.0), 0.0);
  EXPECT_EQ(e(7.0), 0.0);
  EXPECT_EQ(e(-1.0), 0.0);
  EXPECT_NEAR(e(4.0), 1.0, 1e-15);
  PulseEnvelope g{PulseShape::Gaussian, 2.0, 5.0, 1.0};
  EXPECT_DOUBLE_EQ(g(5.0), 2.0);
  EXPECT_NEAR(g(6.0), 2.0 * std::exp(-0.5), 1e-15);
  for (double t = -2; t < 12; t += 0.37) {
    EXPECT_GE(e(t), 0.0);
    EXPECT_LE(e(t), 2.0);
  }
  EXPECT_THROW((PulseEnvelope{PulseShape::Sin2, -1.0, 0.0, 1.0}.validate()), DomainError);
  EXPECT_THROW((PulseEnvelope{PulseShape::Sin2, 1.0, 0.0, 0.0}.validate()), DomainError);
}

TEST(Stirap, ScheduleOrderingAndReversal) {
  const auto s = at_margin(30);
  EXPECT_NO_THROW(s.validate());
  EXPECT_LT(s.stokes.center, s.pump.center);
  const auto r = s.reversed();
  EXPECT_EQ(r.direction, Direction::Down);
  EXPECT_NO_THROW(r.validate());
  EXPECT_NEAR(r.pump.center, s.duration - s.pump.center, 1e-18);
  for (double t = 0; t <= s.duration; t += s.duration / 17) {
    EXPECT_NEAR(r.pump(t), s.pump(s.duration - t), 1e-9);
    EXPECT_NEAR(r.stokes(t), s.stokes(s.duration - t), 1e-8);
  }
  StirapSchedule bad = s;
  std::swap(bad.pump.center, bad.stokes.center);
  EXPECT_THROW(bad.validate(), DomainError);
  bad = s;
  bad.steps = 0;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Stirap, UndrivenBlockIsDetuningOnly) {
  StirapSchedule s = at_margin(10);
  s.pump.peak_rabi = 0.0;
  s.stokes.peak_rabi = 0.0;
  const auto h = hamiltonian_block(2, 0.3 * s.duration, s, params(7.0), 8);
  Eigen::Matrix3d expected = Eigen::Matrix3d::Zero();
  expected(1, 1) = 7.0;
  EXPECT_EQ(h, expected);
}

TEST(Stirap, BlockIsHermitianAndHasDarkState) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto s = at_margin(50);
  const auto p = params(3.0e4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(u(rng) * 10);
    const double t = (0.2 + 0.6 * u(rng)) * s.duration;  // both pulses on
    const auto h = hamiltonian_block(n, t, s, p, 12);
    EXPECT_EQ(h, h.transpose());
    const double wp = s.pump(t);
    const double ws = stokes_rabi(s, p, n, t);
    EXPECT_NEAR(h(0, 1), wp / 2, 1e-9);
    EXPECT_NEAR(h(1, 2), ws / 2, 1e-9);
    // cos(theta) |1,n> - sin(theta) |2,n+1>, tan(theta) = Omega_p / Omega_S,n
    const double theta = std::atan2(wp, ws);
    const Eigen::Vector3d dark(std::cos(theta), 0.0, -std::sin(theta));
    EXPECT_NEAR((h * dark)(1) / std::max(wp, ws), 0.0, 1e-12);
  }
  EXPECT_THROW(hamiltonian_block(12, 0.0, s, p, 12), IndexError);
}

TEST(Stirap, StepPropagatorsAreUnitary) {
  const auto s = at_margin(40, 50);
  for (int n : {0, 3, 9}) {
    const Eigen::Matrix3cd u = block_propagator(n, s, params(2.0e4));
    EXPECT_LT((u.adjoint() * u - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
  StirapSchedule one = s;
  one.steps = 1;
  const Eigen::Matrix3cd u1 = block_propagator(4, one, params(2.0e4));
  EXPECT_LT((u1.adjoint() * u1 - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Stirap, GroundControlIsUntouched) {
  CompositeSpace space(2, 6);
  std::mt19937_64 rng(2);
  Vector v = Vector::Zero(space.dim());
  for (int n = 0; n <= 6; ++n) {
    v(space.encode(levels({0, 0}), n)) = cplx(rng() % 7, rng() % 5);
    v(space.encode(levels({0, 1}), n)) = cplx(rng() % 3, 1.0);
  }
  v.normalize();
  const auto out = propagate(CompositeState(space, v), 0, at_margin(20), params());
  EXPECT_EQ(out.amplitudes(), v);
  // the identity branch carries no phase
  EXPECT_EQ(std::arg(out.amplitudes()(space.encode(levels({0, 1}), 3))),
            std::arg(v(space.encode(levels({0, 1}), 3))));
}

TEST(Stirap, BlockPathMatchesFullMatrixPath) {
  for (double delta : {0.0, 4.0e4}) {
    const PhysicalParams p = params(delta);
    const auto s = at_margin(30, 10);
    for (int n_max : {3, 8}) {
      CompositeSpace space(1, n_max);
      const Matrix U = full_propagator(space, s, p);
      std::mt19937_64 rng(3 + n_max);
      Vector v = test::random_vector(rng, space.dim());
      for (Index i = 0; i < space.dim(); ++i) {
        const auto lab = space.decode(i);
        if (lab.levels[0] == Level::Shelf || lab.levels[0] == Level::Intermediate || lab.n == n_max) v(i) = 0.0;
      }
      v.normalize();
      const auto block = propagate(CompositeState(space, v), 0, s, p);
      EXPECT_LT((block.amplitudes() - U * v).cwiseAbs().maxCoeff(), 1e-12)
          << "delta=" << delta << " n_max=" << n_max;
    }
  }
}

TEST(Stirap, PropagateDomainChecks) {
  CompositeSpace space(1, 4);
  Vector v = Vector::Zero(space.dim());
  v(space.encode(levels({2}), 1)) = 1.0;
  EXPECT_THROW(propagate(CompositeState(space, v), 0, at_margin(10), params()), DomainError);
  EXPECT_NO_THROW(propagate(CompositeState(space, v), 0, at_margin(10).reversed(), params()));
  Vector top = Vector::Zero(space.dim());
  top(space.encode(levels({1}), 4)) = 1.0;
  EXPECT_THROW(propagate(CompositeState(space, top), 0, at_margin(10), params()), TruncationLeakage);
  Vector excited = Vector::Zero(space.dim());
  excited(space.encode(levels({1}), 0)) = 1.0;
  EXPECT_THROW(propagate(CompositeState(space, excited), 0, at_margin(10).reversed(), params()), DomainError);
}

TEST(Stirap, ZeroPulsesTransferNothing) {
  StirapSchedule s = at_margin(20);
  s.pump.peak_rabi = 0.0;
  s.stokes.peak_rabi = 0.0;
  EXPECT_EQ(transfer_efficiency(0, s, params()), 0.0);
  EXPECT_THROW(residual_phase(0, s, params()), UndefinedPhase);
}

TEST(Stirap, SlowPassageTransfersVacuumBranch) {
  CompositeSpace space(1, 4);
  Vector v = Vector::Zero(space.dim());
  v(space.encode(levels({1}), 0)) = 1.0;
  const auto out = propagate(CompositeState(space, v), 0, at_margin(200), params());
  EXPECT_GE(std::norm(out.amplitudes()(space.encode(levels({2}), 1))), 0.999);
}

TEST(Stirap, DtHalvingConverges) {
  // reported populations are those evolved from the passage's initial state:
  // column 0 of the block for up, column 2 for down
  const auto p = params();
  for (const auto& coarse : {at_margin(200, 100), at_margin(200, 100).reversed()}) {
    StirapSchedule fine = coarse;
    fine.steps *= 2;
    const int col = coarse.direction == Direction::Up ? 0 : 2;
    for (int n : {0, 4, 10}) {
      const Eigen::Matrix3cd a = block_propagator(n, coarse, p);
      const Eigen::Matrix3cd b = block_propagator(n, fine, p);
      EXPECT_LT((a.col(col).cwiseAbs2() - b.col(col).cwiseAbs2()).cwiseAbs().maxCoeff(), 1e-8) << "n=" << n;
      const double d = residual_phase(n, coarse, p) - residual_phase(n, fine, p);
      EXPECT_LT(std::abs(std::remainder(d, 2 * std::numbers::pi)), 1e-6) << "n=" << n;
    }
  }
}

TEST(Stirap, EfficiencyNonDecreasingInDuration) {
  // same envelopes, durations T, 2T, 4T
  const auto p = params();
  for (int n : {0, 5}) {
    double prev = -1.0;
    for (double m : {25.0, 50.0, 100.0}) {
      const double e = transfer_efficiency(n, at_margin(m), p);
      EXPECT_GE(e, prev) << "n=" << n << " margin=" << m;
      prev = e;
    }
  }
}

TEST(Stirap, EfficientAcrossPhononNumbers) {
  const auto s = at_margin(200);
  EXPECT_GE(transfer_efficiency(0, s, params()), 0.999);
  EXPECT_GE(transfer_efficiency(5, s, params()), 0.999);
}

TEST(Stirap, RoundTripRestoresExcitedState) {
  const auto p = params();
  const auto up = at_margin(200);
  const StirapPropagator fwd(up, p, 11), back(up.reversed(), p, 11);
  CompositeSpace space(1, 11);
  PropagateOptions relaxed;
  relaxed.enforce_domain = false;
  for (int n = 0; n <= 10; ++n) {
    Vector v = Vector::Zero(space.dim());
    v(space.encode(levels({1}), n)) = 1.0;
    const auto out = back.apply(fwd.apply(CompositeState(space, v), 0), 0, relaxed);
    EXPECT_GE(std::norm(out.amplitudes()(space.encode(levels({1}), n))), 0.998) << "n=" << n;
  }
}

TEST(Stirap, ResidualPhaseAtResonance) {
  // on two-photon and one-photon resonance the dark-state transfer amplitude
  // is real and negative: cos(theta)|1> - sin(theta)|2> ends on -|2>
  const auto s = at_margin(200);
  for (int n : {0, 3})
    EXPECT_NEAR(std::abs(residual_phase(n, s, params())), std::numbers::pi, 1e-3) << "n=" << n;
}

TEST(Stirap, MarginFormula) {
  StirapSchedule s = at_margin(10);
  s.stokes.peak_rabi = kPump / 0.1;
  EXPECT_NEAR(adiabaticity_margin(s, params(), 0), 10.0, 1e-12);
  StirapSchedule dt_changed = s;
  dt_changed.steps *= 3;
  EXPECT_EQ(adiabaticity_margin(dt_changed, params(), 0), adiabaticity_margin(s, params(), 0));
  // strong pump: the sideband limits the margin, which then grows as sqrt(n+1)
  s.pump.peak_rabi = 100 * kPump;
  double prev = 0.0;
  for (int n = 0; n <= 5; ++n) {
    const double m = adiabaticity_margin(s, params(), n);
    EXPECT_GT(m, prev);
    EXPECT_NEAR(m, 10.0 * std::sqrt(n + 1.0), 1e-9);
    prev = m;
  }
}

TEST(Stirap, IntermediatePopulationShrinksWithMargin) {
  const auto p = params();
  double prev = 1.0;
  for (double m : {10.0, 30.0, 100.0}) {
    const double peak = max_intermediate_population(0, at_margin(m), p);
    EXPECT_LT(peak, prev) << "margin=" << m;
    prev = peak;
  }
}

TEST(Stirap, TraceIsClosedAndOrdered) {
  const auto s = at_margin(80);
  const auto p = params();
  const auto tr = trace_block(2, s, p, 7);
  ASSERT_FALSE(tr.empty());
  EXPECT_EQ(tr.front().t, 0.0);
  EXPECT_NEAR(tr.back().t, s.duration, 1e-15);
  std::size_t ip = 0, is = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_NEAR(tr[i].pop_excited + tr[i].pop_intermediate + tr[i].pop_shelf, 1.0, 1e-9);
    if (tr[i].omega_pump > tr[ip].omega_pump) ip = i;
    if (tr[i].omega_stokes > tr[is].omega_stokes) is = i;
  }
  EXPECT_LT(tr[is].t, tr[ip].t);
  EXPECT_NEAR(tr.back().pop_shelf, transfer_efficiency(2, s, p), 1e-12);
}

TEST(Stirap, MarginSearchFindsThreshold) {
  const auto r = find_minimal_margin(params(), kPump, 3, 0.99, {5.0, 10.0, 40.0, 80.0, 160.0}, 40.0);
  ASSERT_TRUE(r.found);
  EXPECT_GT(r.margin, 5.0);
  for (double e : r.efficiencies) EXPECT_GE(e, 0.99);
  EXPECT_LT(r.sampled_min_efficiency.front(), 0.99);
  EXPECT_EQ(r.sampled_margins.back(), r.margin);
}
