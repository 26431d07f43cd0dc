#include "hotion/states.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <string>

namespace hotion {

namespace {

void check_n_max(int n_max) { FockSpace{n_max}; }

}  // namespace

Vector fock_state(int n, int n_max) {
  check_n_max(n_max);
  if (n < 0 || n > n_max)
    throw IndexError("fock_state: occupation " + std::to_string(n) + " outside [0, " +
                     std::to_string(n_max) + "]");
  Vector v = Vector::Zero(n_max + 1);
  v(n) = 1.0;
  return v;
}

TruncatedState coherent_state(cplx alpha, int n_max, double max_discarded) {
  check_n_max(n_max);
  Vector v(n_max + 1);
  // c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!), built recursively.
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= n_max; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  const double kept = v.squaredNorm();
  const double discarded = std::max(0.0, 1.0 - kept);
  if (discarded > max_discarded)
    throw TruncationLeakage("coherent_state: |alpha|^2 = " + std::to_string(std::norm(alpha)) +
                            " leaves weight " + std::to_string(discarded) + " above n_max = " +
                            std::to_string(n_max));
  v /= std::sqrt(kept);
  return {std::move(v), discarded};
}

TruncatedDensity thermal_state(ThermalSpec spec, int n_max, double max_discarded) {
  check_n_max(n_max);
  if (!std::isfinite(spec.n_bar) || spec.n_bar < 0.0)
    throw DomainError("thermal_state: n_bar must be finite and >= 0");
  const double ratio = spec.n_bar / (1.0 + spec.n_bar);
  Eigen::VectorXd p(n_max + 1);
  // p_n = n^n / (1+n)^(n+1)
  p(0) = 1.0 / (1.0 + spec.n_bar);
  for (int n = 1; n <= n_max; ++n) p(n) = p(n - 1) * ratio;
  const double discarded = std::pow(ratio, n_max + 1);
  if (discarded > max_discarded)
    throw TruncationLeakage("thermal_state: n_bar = " + std::to_string(spec.n_bar) +
                            " leaves weight " + std::to_string(discarded) + " above n_max = " +
                            std::to_string(n_max));
  p /= p.sum();
  double mean = 0.0;
  for (int n = 0; n <= n_max; ++n) mean += n * p(n);
  Matrix rho = p.cast<cplx>().asDiagonal();
  return {DensityOperator(CompositeSpace(0, n_max), std::move(rho)), discarded, mean};
}

Vector random_pure_state(std::uint64_t seed, int n_max) {
  check_n_max(n_max);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n_max + 1);
  for (Index n = 0; n < v.size(); ++n) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(n) = cplx(re, im);
  }
  v.normalize();
  return v;
}

namespace {

double parse_double(std::string_view text, std::string_view spec) {
  std::string s(text);
  if (s.empty()) throw ConfigError("phonon spec '" + std::string(spec) + "': missing number");
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("phonon spec '" + std::string(spec) + "': '" + s + "' is not a number");
  }
  if (used != s.size())
    throw ConfigError("phonon spec '" + std::string(spec) + "': trailing characters in '" + s + "'");
  return value;
}

template <typename Int>
Int parse_int(std::string_view text, std::string_view spec) {
  Int value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last)
    throw ConfigError("phonon spec '" + std::string(spec) + "': '" + std::string(text) +
                      "' is not a non-negative integer");
  return value;
}

}  // namespace

PhononSpec parse_phonon_spec(std::string_view spec, int n_max, std::uint64_t default_seed,
                             double max_discarded) {
  const auto colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  const bool has_arg = colon != std::string_view::npos;
  if (n_max < 1) throw ConfigError("n_max must be >= 1");

  if (kind == "fock") {
    if (!has_arg) throw ConfigError("phonon spec 'fock' needs an occupation, e.g. fock:3");
    const int n = parse_int<int>(arg, spec);
    if (n > n_max)
      throw ConfigError("phonon spec '" + std::string(spec) + "': occupation exceeds n_max = " +
                        std::to_string(n_max));
    return {fock_state(n, n_max), std::string(spec), 0.0};
  }
  if (kind == "coherent") {
    if (!has_arg) throw ConfigError("phonon spec 'coherent' needs re,im");
    const auto comma = arg.find(',');
    const double re = parse_double(arg.substr(0, comma), spec);
    const double im = comma == std::string_view::npos ? 0.0 : parse_double(arg.substr(comma + 1), spec);
    auto st = coherent_state({re, im}, n_max, max_discarded);
    return {std::move(st.amplitudes), std::string(spec), st.discarded_weight};
  }
  if (kind == "thermal") {
    if (!has_arg) throw ConfigError("phonon spec 'thermal' needs a mean occupation");
    const double n_bar = parse_double(arg, spec);
    if (!std::isfinite(n_bar) || n_bar < 0.0)
      throw ConfigError("phonon spec '" + std::string(spec) + "': n_bar must be finite and >= 0");
    auto th = thermal_state({n_bar}, n_max, max_discarded);
    return {std::move(th.rho), std::string(spec), th.discarded_weight};
  }
  if (kind == "random") {
    const std::uint64_t seed = has_arg ? parse_int<std::uint64_t>(arg, spec) : default_seed;
    return {random_pure_state(seed, n_max), "random:" + std::to_string(seed), 0.0};
  }
  throw ConfigError("unknown phonon spec '" + std::string(spec) +
                    "' (expected fock:n, coherent:re,im, thermal:nbar or random:seed)");
}

Index phonon_dim(const PhononInput& input) {
  if (const auto* v = std::get_if<Vector>(&input)) return v->size();
  return std::get<DensityOperator>(input).matrix().rows();
}

}  // namespace hotion
