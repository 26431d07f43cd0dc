#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "hotion/hilbert.hpp"

namespace hotion {

struct ThermalSpec {
  double n_bar = 0.0;
};

/// A phonon amplitude vector together with the weight that fell outside the
/// Fock cutoff before renormalization.
struct TruncatedState {
  Vector amplitudes;
  double discarded_weight = 0.0;
};

struct TruncatedDensity {
  DensityOperator rho;
  double discarded_weight = 0.0;
  double mean_occupation = 0.0;
};

Vector fock_state(int n, int n_max);

/// Amplitudes proportional to alpha^n / sqrt(n!), renormalized on the truncated
/// space. Throws TruncationLeakage when the discarded weight exceeds
/// `max_discarded`.
TruncatedState coherent_state(cplx alpha, int n_max, double max_discarded = kLeakTol);

/// Geometric (Bose-Einstein) occupation distribution, diagonal in the Fock
/// basis and renormalized over the cutoff.
TruncatedDensity thermal_state(ThermalSpec spec, int n_max, double max_discarded = kLeakTol);

/// Normalized vector of i.i.d. complex Gaussian deviates; deterministic per seed.
Vector random_pure_state(std::uint64_t seed, int n_max);

/// Phonon-mode input: either a pure amplitude vector or a phonon-only
/// density operator.
using PhononInput = std::variant<Vector, DensityOperator>;

struct PhononSpec {
  PhononInput input;
  std::string label;
  double discarded_weight = 0.0;
};

/// Parses "fock:n", "coherent:re,im", "thermal:nbar" or "random:seed"
/// ("random" alone uses `default_seed`). Malformed strings raise ConfigError.
PhononSpec parse_phonon_spec(std::string_view spec, int n_max, std::uint64_t default_seed = 0,
                             double max_discarded = kLeakTol);

/// Phonon dimension of an input (length or matrix size).
Index phonon_dim(const PhononInput& input);

}  // namespace hotion
