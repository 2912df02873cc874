#include "harness/stats.hpp"

#include <algorithm>
#include <cmath>

namespace qka::harness {

using nlohmann::json;

WilsonInterval wilson_interval(long events, long trials, double z) {
  WilsonInterval w;
  if (trials <= 0) return w;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(events) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  w.low = std::max(0.0, center - half);
  w.high = std::min(1.0, center + half);
  return w;
}

double standard_error(long events, long trials) {
  if (trials <= 0) return 0.0;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(events) / n;
  return std::sqrt(p * (1.0 - p) / n);
}

double z_score_vs_expected(long events, long trials, double expected) {
  if (trials <= 0) return 0.0;
  const double rate = static_cast<double>(events) / trials;
  const double se =
      std::sqrt(expected * (1.0 - expected) / static_cast<double>(trials));
  if (se == 0.0) {
    if (rate == expected) return 0.0;
    return rate > expected ? 1e9 : -1e9;
  }
  return std::clamp((rate - expected) / se, -1e9, 1e9);
}

StatSummary summarize_event(long events, long trials,
                            std::optional<double> oracle_value,
                            std::optional<double> published_claim) {
  StatSummary s;
  s.trials = trials;
  s.events = events;
  s.rate = trials > 0 ? static_cast<double>(events) / trials : 0.0;
  s.standard_error = standard_error(events, trials);
  s.wilson = wilson_interval(events, trials);
  s.oracle_value = oracle_value;
  s.published_claim = published_claim;
  if (oracle_value) {
    s.z_vs_oracle = z_score_vs_expected(events, trials, *oracle_value);
  }
  return s;
}

json to_json(const StatSummary& s) {
  json j{{"trials", s.trials},
         {"events", s.events},
         {"rate", s.rate},
         {"standard_error", s.standard_error},
         {"wilson_low", s.wilson.low},
         {"wilson_high", s.wilson.high}};
  j["oracle_value"] = s.oracle_value ? json(*s.oracle_value) : json();
  j["published_claim"] =
      s.published_claim ? json(*s.published_claim) : json();
  j["z_vs_oracle"] = s.z_vs_oracle ? json(*s.z_vs_oracle) : json();
  return j;
}

}  // namespace qka::harness
