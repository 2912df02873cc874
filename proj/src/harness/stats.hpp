#pragma once

#include <optional>

#include "json.hpp"

namespace qka::harness {

// 95% Wilson score interval for a binomial proportion.
struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
};

WilsonInterval wilson_interval(long events, long trials, double z = 1.96);

// Empirical standard error of a Bernoulli mean.
double standard_error(long events, long trials);

// z-score of an observed frequency against an exact expected probability,
// using the null-hypothesis standard error.  When that error is zero
// (expected 0 or 1), equality scores 0 and any deviation saturates at
// +-1e9.
double z_score_vs_expected(long events, long trials, double expected);

// Monte Carlo summary of one binary event, optionally compared against an
// exact oracle value and a separately published closed-form claim.
struct StatSummary {
  long trials = 0;
  long events = 0;
  double rate = 0.0;
  double standard_error = 0.0;
  WilsonInterval wilson;
  std::optional<double> oracle_value;
  std::optional<double> published_claim;
  std::optional<double> z_vs_oracle;
};

StatSummary summarize_event(long events, long trials,
                            std::optional<double> oracle_value,
                            std::optional<double> published_claim);

nlohmann::json to_json(const StatSummary& s);

}  // namespace qka::harness
