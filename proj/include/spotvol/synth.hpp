#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "spotvol/ingest.hpp"

namespace spotvol {

/// Per-day amplitude of one profile, evaluated at 0-based day index d.
struct Amplitude {
  enum class Kind { constant, cosine, values };
  Kind kind = Kind::constant;
  double value = 1.0;  // constant level, or mean of the cosine
  double swing = 0.0;  // cosine amplitude
  double period_days = 365.0;
  double phase_days = 0.0;
  std::vector<double> values;

  double at(int day) const;
};

struct SynthProfile {
  std::vector<double> hourly;  // 24 entries
  Amplitude amplitude;
};

struct SynthSpec {
  int year = 2016;
  std::vector<SynthProfile> profiles;
  double residual_mu = 0.0;
  /// Noise scale multiplier 1 + beta * x(d)^2 with x(d) = (d - D/2) / (D/2), d = 1..D.
  double seasonal_beta = 0.0;
  double sign_mix = 0.5;  // probability of a negative noise sign
  std::uint64_t seed = 0;
  std::string market_label = "synthetic";

  double modulation(int day) const;
};

/// Double-peaked daily profile with a seasonal level plus a weekly correction term.
SynthSpec default_synth_spec(int year, double residual_mu, std::uint64_t seed, double seasonal_beta = 0.0);

void validate(const SynthSpec& spec);

/// Noise-free signal and the noise added to it, both 24 x D.
struct SynthComponents {
  Eigen::MatrixXd signal;
  Eigen::MatrixXd noise;
};

SynthComponents generate_components(const SynthSpec& spec);
/// Hourly series in UTC, so every day has exactly 24 slots.
PriceSeries generate(const SynthSpec& spec);

SynthSpec synth_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SynthSpec& spec);

}  // namespace spotvol
