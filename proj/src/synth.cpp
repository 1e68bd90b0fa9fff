#include "spotvol/synth.hpp"

#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "spotvol/error.hpp"
#include "spotvol/rng.hpp"

namespace spotvol {

using nlohmann::json;

double Amplitude::at(int day) const {
  switch (kind) {
    case Kind::constant: return value;
    case Kind::cosine:
      return value + swing * std::cos(2.0 * std::numbers::pi * (day - phase_days) / period_days);
    case Kind::values: return values.at(static_cast<std::size_t>(day));
  }
  return value;
}

double SynthSpec::modulation(int day) const {
  const double mid = days_in_year(year) / 2.0;
  const double x = (day + 1 - mid) / mid;
  return 1.0 + seasonal_beta * x * x;
}

SynthSpec default_synth_spec(int year, double residual_mu, std::uint64_t seed, double seasonal_beta) {
  SynthSpec spec;
  spec.year = year;
  spec.residual_mu = residual_mu;
  spec.seed = seed;
  spec.seasonal_beta = seasonal_beta;

  SynthProfile base;
  SynthProfile correction;
  for (int h = 0; h < kHoursPerDay; ++h) {
    const double morning = std::exp(-0.5 * std::pow((h - 8.0) / 1.5, 2));
    const double evening = std::exp(-0.5 * std::pow((h - 19.0) / 2.0, 2));
    const double night = std::exp(-0.5 * std::pow((h - 3.0) / 2.5, 2));
    base.hourly.push_back(30.0 + 18.0 * morning + 22.0 * evening - 8.0 * night);
    correction.hourly.push_back(std::sin(2.0 * std::numbers::pi * (h - 6.0) / 24.0));
  }
  base.amplitude = {Amplitude::Kind::cosine, 1.0, 0.2, static_cast<double>(days_in_year(year)), 0.0, {}};
  correction.amplitude = {Amplitude::Kind::cosine, 2.0, 6.0, 7.0, 1.0, {}};
  spec.profiles = {base, correction};
  return spec;
}

void validate(const SynthSpec& spec) {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::InvalidSpec, why); };
  if (spec.year < 1 || spec.year > 9999) fail(fmt::format("year {} out of range", spec.year));
  if (spec.profiles.empty()) fail("at least one profile is required");
  if (!(spec.residual_mu >= 0.0) || !std::isfinite(spec.residual_mu)) fail("residual_mu must be finite and >= 0");
  if (!(spec.sign_mix >= 0.0 && spec.sign_mix <= 1.0)) fail("sign_mix must lie in [0, 1]");
  if (!std::isfinite(spec.seasonal_beta) || spec.seasonal_beta < 0.0) fail("seasonal beta must be finite and >= 0");
  const auto n_days = static_cast<std::size_t>(days_in_year(spec.year));
  for (std::size_t k = 0; k < spec.profiles.size(); ++k) {
    const auto& p = spec.profiles[k];
    if (p.hourly.size() != kHoursPerDay) fail(fmt::format("profile {} has {} hourly values, expected 24", k, p.hourly.size()));
    for (double v : p.hourly)
      if (!std::isfinite(v)) fail(fmt::format("profile {} has a non-finite hourly value", k));
    const auto& a = p.amplitude;
    if (a.kind == Amplitude::Kind::values && a.values.size() != n_days)
      fail(fmt::format("profile {} amplitude has {} values, expected {}", k, a.values.size(), n_days));
    if (a.kind == Amplitude::Kind::cosine && !(a.period_days > 0.0))
      fail(fmt::format("profile {} amplitude period must be positive", k));
  }
}

SynthComponents generate_components(const SynthSpec& spec) {
  validate(spec);
  const int n_days = days_in_year(spec.year);
  SynthComponents out;
  out.signal = Eigen::MatrixXd::Zero(kHoursPerDay, n_days);
  out.noise = Eigen::MatrixXd::Zero(kHoursPerDay, n_days);
  for (const auto& p : spec.profiles) {
    const Eigen::Map<const Eigen::VectorXd> profile(p.hourly.data(), kHoursPerDay);
    for (int d = 0; d < n_days; ++d) out.signal.col(d) += p.amplitude.at(d) * profile;
  }
  auto gen = rng::stream(spec.seed, 0);
  for (int d = 0; d < n_days; ++d) {
    const double scale = spec.residual_mu * spec.modulation(d);
    for (int h = 0; h < kHoursPerDay; ++h) {
      const double sign = rng::uniform01(gen) < spec.sign_mix ? -1.0 : 1.0;
      out.noise(h, d) = sign * rng::exponential(gen, scale);
    }
  }
  return out;
}

PriceSeries generate(const SynthSpec& spec) {
  const auto parts = generate_components(spec);
  PriceSeries series;
  series.year = spec.year;
  series.market_label = spec.market_label;
  series.zone = Zone::utc();
  const std::chrono::sys_days first{std::chrono::year{spec.year} / std::chrono::January / 1};
  series.observations.reserve(static_cast<std::size_t>(parts.signal.size()));
  for (Eigen::Index d = 0; d < parts.signal.cols(); ++d)
    for (int h = 0; h < kHoursPerDay; ++h)
      series.observations.push_back({Timestamp{first + std::chrono::days{d}, h, 0},
                                     parts.signal(h, d) + parts.noise(h, d), SlotFlag::observed});
  return series;
}

namespace {

Amplitude amplitude_from_json(const json& j) {
  Amplitude a;
  if (j.is_number()) {
    a.value = j.get<double>();
    return a;
  }
  const auto kind = j.value("kind", std::string{"constant"});
  if (kind == "constant") {
    a.value = j.value("value", 1.0);
  } else if (kind == "cosine") {
    a.kind = Amplitude::Kind::cosine;
    a.value = j.value("mean", 1.0);
    a.swing = j.value("amplitude", 0.0);
    a.period_days = j.value("period_days", 365.0);
    a.phase_days = j.value("phase_days", 0.0);
  } else if (kind == "values") {
    a.kind = Amplitude::Kind::values;
    a.values = j.at("values").get<std::vector<double>>();
  } else {
    throw Error(ErrorKind::InvalidSpec, fmt::format("unknown amplitude kind '{}'", kind));
  }
  return a;
}

json amplitude_to_json(const Amplitude& a) {
  switch (a.kind) {
    case Amplitude::Kind::constant: return {{"kind", "constant"}, {"value", a.value}};
    case Amplitude::Kind::cosine:
      return {{"kind", "cosine"}, {"mean", a.value}, {"amplitude", a.swing},
              {"period_days", a.period_days}, {"phase_days", a.phase_days}};
    case Amplitude::Kind::values: return {{"kind", "values"}, {"values", a.values}};
  }
  return {};
}

}  // namespace

SynthSpec synth_spec_from_json(const json& doc) {
  try {
    SynthSpec spec;
    spec.year = doc.value("year", spec.year);
    spec.residual_mu = doc.value("residual_mu", spec.residual_mu);
    spec.sign_mix = doc.value("sign_mix", spec.sign_mix);
    spec.seed = doc.value("seed", spec.seed);
    spec.market_label = doc.value("market_label", spec.market_label);
    if (doc.contains("seasonal_modulation")) spec.seasonal_beta = doc.at("seasonal_modulation").value("beta", 0.0);
    if (doc.contains("profiles")) {
      for (const auto& p : doc.at("profiles")) {
        SynthProfile profile;
        profile.hourly = p.at("hourly").get<std::vector<double>>();
        if (p.contains("amplitude")) profile.amplitude = amplitude_from_json(p.at("amplitude"));
        spec.profiles.push_back(std::move(profile));
      }
    } else {
      spec.profiles = default_synth_spec(spec.year, 0.0, 0).profiles;
    }
    validate(spec);
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, fmt::format("synth spec: {}", e.what()));
  }
}

json to_json(const SynthSpec& spec) {
  json profiles = json::array();
  for (const auto& p : spec.profiles)
    profiles.push_back({{"hourly", p.hourly}, {"amplitude", amplitude_to_json(p.amplitude)}});
  return {{"year", spec.year},
          {"profiles", profiles},
          {"residual_mu", spec.residual_mu},
          {"seasonal_modulation", {{"kind", "u_shaped"}, {"beta", spec.seasonal_beta}}},
          {"sign_mix", spec.sign_mix},
          {"seed", spec.seed},
          {"market_label", spec.market_label}};
}

}  // namespace spotvol
