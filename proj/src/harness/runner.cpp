#include "harness/runner.hpp"

#include <memory>
#include <string>
#include <vector>

#include "attacks/adversary.hpp"
#include "harness/stats.hpp"
#include "oracle/detection_oracle.hpp"
#include "protocol/run.hpp"

namespace qka::harness {

using attack::AttackKind;
using attack::AttackSpec;
using nlohmann::json;

namespace {

long sum_field(const std::vector<json>& trials, const char* field) {
  long total = 0;
  for (const json& t : trials) {
    if (t.contains(field)) total += t.at(field).get<long>();
  }
  return total;
}

json aggregate_attack(const AttackSpec& spec,
                      const std::vector<json>& trials) {
  json agg{{"kind", attack::kind_name(spec.kind)}};
  switch (spec.kind) {
    case AttackKind::ExternalInterceptResend: {
      agg["target"] = spec.target;
      agg["per_decoy_probability"] = spec.per_decoy_probability;
      agg["decoys_seen"] = sum_field(trials, "decoys_seen");
      agg["decoys_intercepted"] = sum_field(trials, "decoys_intercepted");
      break;
    }
    case AttackKind::HashLeakInterceptResend: {
      agg["target"] = spec.target;
      const long checked = sum_field(trials, "checked_positions");
      const long checked_ok = sum_field(trials, "checked_correct");
      const long unchecked = sum_field(trials, "unchecked_positions");
      const long unchecked_ok = sum_field(trials, "unchecked_correct");
      agg["checked_positions"] = checked;
      agg["checked_correct"] = checked_ok;
      agg["unchecked_positions"] = unchecked;
      agg["unchecked_correct"] = unchecked_ok;
      if (checked > 0) {
        agg["accuracy_checked"] =
            static_cast<double>(checked_ok) / checked;
      }
      if (checked + unchecked > 0) {
        agg["accuracy_overall"] =
            static_cast<double>(checked_ok + unchecked_ok) /
            (checked + unchecked);
      }
      break;
    }
    case AttackKind::DishonestParticipant:
    case AttackKind::CollusiveParticipants: {
      agg["target_bit"] = spec.target_bit;
      agg["target_position"] = spec.target_position;
      long attempts = 0, forced = 0;
      for (const json& t : trials) {
        if (!t.contains("achieved_bit")) continue;
        ++attempts;
        forced += t.at("forced").get<bool>() ? 1 : 0;
      }
      agg["completed_runs"] = attempts;
      agg["forced_runs"] = forced;
      if (attempts > 0) {
        agg["forced_rate"] = static_cast<double>(forced) / attempts;
        agg["forced_z_vs_half"] = z_score_vs_expected(forced, attempts, 0.5);
      }
      break;
    }
    case AttackKind::TpProductState: {
      long completed = 0, exact = 0;
      for (const json& t : trials) {
        if (!t.contains("guess_exact")) continue;
        ++completed;
        exact += t.at("guess_exact").get<bool>() ? 1 : 0;
      }
      agg["completed_runs"] = completed;
      agg["guess_exact_runs"] = exact;
      if (completed > 0) {
        agg["guess_exact_rate"] = static_cast<double>(exact) / completed;
      }
      break;
    }
    case AttackKind::TpEntangling: {
      if (!trials.empty()) {
        const json& first = trials.front();
        agg["overlap"] = first.at("overlap");
        agg["x_basis_error_rate"] = first.at("x_basis_error_rate");
        agg["tp_guess_advantage"] = first.at("tp_guess_advantage");
      }
      const long guessed = sum_field(trials, "guessed_positions");
      const long correct = sum_field(trials, "guess_correct");
      agg["guessed_positions"] = guessed;
      agg["guess_correct"] = correct;
      if (guessed > 0) {
        const double acc = static_cast<double>(correct) / guessed;
        agg["guess_accuracy"] = acc;
        agg["empirical_advantage"] = acc - 0.5;
      }
      break;
    }
    case AttackKind::Impersonation: {
      agg["target"] = spec.target;
      agg["correction"] = spec.correction;
      const long guessed = sum_field(trials, "guessed_positions");
      const long wrong = sum_field(trials, "wrong_guesses");
      agg["guessed_positions"] = guessed;
      agg["wrong_guesses"] = wrong;
      if (guessed > 0) {
        agg["wrong_rate"] = static_cast<double>(wrong) / guessed;
      }
      break;
    }
  }
  return agg;
}

}  // namespace

json run_batch(const ScenarioConfig& scenario) {
  scenario.validate();

  long aborts = 0, aborts_first = 0, aborts_second = 0;
  long first_errors = 0, second_errors = 0;
  long completed = 0, keys_identical = 0;
  long key_bits = 0, key_ones = 0;
  std::vector<json> attack_trials;
  json sample_transcript;

  for (long t = 0; t < scenario.trials; ++t) {
    RandomStream rng =
        RandomStream::substream(scenario.seed, static_cast<uint64_t>(t));
    std::unique_ptr<proto::Adversary> adversary;
    if (scenario.attack) adversary = attack::make_adversary(*scenario.attack);
    const proto::RunReport report =
        proto::run_protocol(scenario.protocol, adversary.get(), rng);

    if (t == 0) sample_transcript = proto::to_json(report.transcript);
    first_errors += report.first_detection_errors;
    second_errors += report.second_detection_errors;
    if (!report.passed) {
      ++aborts;
      if (report.transcript.abort_reason.rfind("decoy", 0) == 0) {
        ++aborts_first;
      } else {
        ++aborts_second;
      }
    } else {
      ++completed;
      bool identical = true;
      for (const std::string& key : report.keys) {
        if (key != report.keys.front()) {
          identical = false;
          break;
        }
      }
      keys_identical += identical ? 1 : 0;
      for (char c : report.keys.front()) {
        ++key_bits;
        key_ones += c == '1' ? 1 : 0;
      }
    }
    if (!report.attack_stats.is_null()) {
      attack_trials.push_back(report.attack_stats);
    }
  }

  const AttackSpec* spec = scenario.attack ? &*scenario.attack : nullptr;
  const oracle::RunDetection run_det =
      oracle::run_detection(spec, scenario.protocol);
  const oracle::PerParticleDetection per =
      oracle::per_particle_detection(spec, scenario.protocol.parties);
  const std::optional<double> claim =
      oracle::published_claim_detection(spec, scenario.protocol);

  const StatSummary summary =
      summarize_event(aborts, scenario.trials, run_det.p_abort, claim);

  json doc;
  doc["format"] = "qkasim-report-v1";
  doc["scenario"] = scenario.to_json();
  doc["summary"] = to_json(summary);
  doc["detection"] = json{{"first_detection_errors", first_errors},
                          {"second_detection_errors", second_errors},
                          {"aborts_at_first_detection", aborts_first},
                          {"aborts_at_second_detection", aborts_second}};

  json honest{{"completed_runs", completed},
              {"keys_identical_runs", keys_identical},
              {"key_bits", key_bits},
              {"key_ones", key_ones}};
  if (key_bits > 0) {
    honest["key_ones_frequency"] =
        static_cast<double>(key_ones) / key_bits;
    honest["key_ones_z_vs_half"] =
        z_score_vs_expected(key_ones, key_bits, 0.5);
  }
  doc["honest_stats"] = honest;

  doc["attack_stats"] = scenario.attack
                            ? aggregate_attack(*scenario.attack, attack_trials)
                            : json();

  doc["oracle"] = json{{"per_particle", oracle::to_json(per)},
                       {"run", oracle::to_json(run_det)},
                       {"published_claim", claim ? json(*claim) : json()}};
  doc["sample_transcript"] = sample_transcript;
  return doc;
}

}  // namespace qka::harness
