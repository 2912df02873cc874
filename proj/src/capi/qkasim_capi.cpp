#include "qkasim.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "attacks/attack_spec.hpp"
#include "harness/identities.hpp"
#include "harness/runner.hpp"
#include "harness/scenario.hpp"
#include "oracle/branch_tree.hpp"
#include "oracle/detection_oracle.hpp"

using nlohmann::json;

struct qkasim_scenario {
  json doc = json::object();
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

char* dup_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out != nullptr) {
    std::memcpy(out, text.c_str(), text.size() + 1);
  }
  return out;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  return static_cast<bool>(out.flush());
}

/* Walks a dotted key path, creating intermediate objects on the way. */
json& resolve_path(json& doc, const std::string& key) {
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = key.find('.', start);
    std::string part = key.substr(start, dot == std::string::npos
                                             ? std::string::npos
                                             : dot - start);
    if (part.empty()) {
      throw std::invalid_argument("empty component in key '" + key + "'");
    }
    if (dot == std::string::npos) {
      return (*node)[part];
    }
    json& child = (*node)[part];
    if (!child.is_object()) {
      child = json::object();
    }
    node = &child;
    start = dot + 1;
  }
}

struct io_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Fn>
qkasim_status guarded(Fn&& fn) {
  try {
    fn();
    return QKASIM_OK;
  } catch (const json::parse_error& e) {
    set_error(e.what());
    return QKASIM_ERR_PARSE;
  } catch (const json::exception& e) {
    set_error(e.what());
    return QKASIM_ERR_PARSE;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return QKASIM_ERR_INVALID_ARGUMENT;
  } catch (const io_failure& e) {
    set_error(e.what());
    return QKASIM_ERR_IO;
  } catch (const std::exception& e) {
    set_error(e.what());
    return QKASIM_ERR_INTERNAL;
  }
}

qkasim_status require_handle(const qkasim_scenario* scenario) {
  if (scenario == nullptr) {
    set_error("scenario handle is null");
    return QKASIM_ERR_INVALID_ARGUMENT;
  }
  return QKASIM_OK;
}

qkasim_status emit(const json& doc, char** out) {
  if (out == nullptr) {
    set_error("output pointer is null");
    return QKASIM_ERR_INVALID_ARGUMENT;
  }
  *out = dup_string(doc.dump(2) + "\n");
  if (*out == nullptr) {
    set_error("allocation failed");
    return QKASIM_ERR_INTERNAL;
  }
  return QKASIM_OK;
}

}  // namespace

extern "C" {

const char* qkasim_version(void) { return "1.0.0"; }

const char* qkasim_last_error(void) { return g_last_error.c_str(); }

qkasim_scenario* qkasim_scenario_create(void) {
  return new (std::nothrow) qkasim_scenario();
}

qkasim_scenario* qkasim_scenario_from_json(const char* json_text) {
  if (json_text == nullptr) {
    set_error("json_text is null");
    return nullptr;
  }
  auto* scenario = new (std::nothrow) qkasim_scenario();
  if (scenario == nullptr) {
    set_error("allocation failed");
    return nullptr;
  }
  qkasim_status rc = guarded([&] {
    scenario->doc = json::parse(json_text);
    if (!scenario->doc.is_object()) {
      throw std::invalid_argument("scenario document must be a JSON object");
    }
  });
  if (rc != QKASIM_OK) {
    delete scenario;
    return nullptr;
  }
  return scenario;
}

void qkasim_scenario_destroy(qkasim_scenario* scenario) { delete scenario; }

qkasim_status qkasim_scenario_set_int(qkasim_scenario* scenario,
                                      const char* key, int64_t value) {
  qkasim_status rc = require_handle(scenario);
  if (rc != QKASIM_OK) return rc;
  if (key == nullptr) {
    set_error("key is null");
    return QKASIM_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { resolve_path(scenario->doc, key) = value; });
}

qkasim_status qkasim_scenario_set_double(qkasim_scenario* scenario,
                                         const char* key, double value) {
  qkasim_status rc = require_handle(scenario);
  if (rc != QKASIM_OK) return rc;
  if (key == nullptr) {
    set_error("key is null");
    return QKASIM_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { resolve_path(scenario->doc, key) = value; });
}

qkasim_status qkasim_scenario_set_string(qkasim_scenario* scenario,
                                         const char* key, const char* value) {
  qkasim_status rc = require_handle(scenario);
  if (rc != QKASIM_OK) return rc;
  if (key == nullptr || value == nullptr) {
    set_error(key == nullptr ? "key is null" : "value is null");
    return QKASIM_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { resolve_path(scenario->doc, key) = std::string(value); });
}

qkasim_status qkasim_scenario_set_json(qkasim_scenario* scenario,
                                       const char* key,
                                       const char* json_text) {
  qkasim_status rc = require_handle(scenario);
  if (rc != QKASIM_OK) return rc;
  if (key == nullptr || json_text == nullptr) {
    set_error(key == nullptr ? "key is null" : "json_text is null");
    return QKASIM_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { resolve_path(scenario->doc, key) = json::parse(json_text); });
}

qkasim_status qkasim_run(qkasim_scenario* scenario, char** report_json) {
  qkasim_status rc = require_handle(scenario);
  if (rc != QKASIM_OK) return rc;
  return guarded([&] {
    qka::harness::ScenarioConfig config =
        qka::harness::ScenarioConfig::from_json(scenario->doc);
    json report = qka::harness::run_batch(config);
    std::string text = report.dump(2) + "\n";
    if (!config.output_path.empty() && !write_file(config.output_path, text)) {
      throw io_failure("failed to write report to '" + config.output_path +
                       "'");
    }
    if (report_json != nullptr) {
      *report_json = dup_string(text);
      if (*report_json == nullptr) {
        throw std::runtime_error("allocation failed");
      }
    }
  });
}

qkasim_status qkasim_oracle(qkasim_scenario* scenario, char** oracle_json) {
  qkasim_status rc = require_handle(scenario);
  if (rc != QKASIM_OK) return rc;
  if (oracle_json == nullptr) {
    set_error("oracle_json is null");
    return QKASIM_ERR_INVALID_ARGUMENT;
  }
  json doc;
  rc = guarded([&] {
    qka::harness::ScenarioConfig config =
        qka::harness::ScenarioConfig::from_json(scenario->doc);
    const qka::attack::AttackSpec* attack =
        config.attack ? &*config.attack : nullptr;

    qka::oracle::PerParticleDetection per =
        qka::oracle::per_particle_detection(attack, config.protocol.parties);
    qka::oracle::RunDetection run =
        qka::oracle::run_detection(attack, config.protocol);
    std::optional<double> claim =
        qka::oracle::published_claim_detection(attack, config.protocol);

    qka::oracle::BranchTree tree = qka::oracle::build_detection_branch_tree(
        attack, config.protocol.parties);
    tree.check_probability_conservation();

    doc["format"] = "qkasim-oracle-v1";
    doc["scenario"] = config.to_json();
    doc["per_particle"] = qka::oracle::to_json(per);
    doc["run"] = qka::oracle::to_json(run);
    doc["published_claim"] = claim ? json(*claim) : json();
    doc["per_decoy_intercept_resend_error"] =
        qka::oracle::intercept_resend_decoy_error();
    doc["branch_tree"] = {
        {"leaves", tree.leaves().size()},
        {"leaf_probability_sum", tree.leaf_probability_sum()},
        {"detection_probability", tree.detection_probability()},
    };
    if (attack != nullptr &&
        attack->kind == qka::attack::AttackKind::TpEntangling) {
      qka::attack::EntanglingRates rates = qka::attack::tp_entangling_rates(
          attack->ancilla, config.protocol.parties);
      doc["entangling"] = {
          {"overlap", std::abs(attack->ancilla.overlap())},
          {"x_basis_error_rate", rates.x_basis_error_rate},
          {"tp_guess_advantage", rates.tp_guess_advantage},
      };
    }
  });
  if (rc != QKASIM_OK) return rc;
  return emit(doc, oracle_json);
}

qkasim_status qkasim_verify_identities(char** result_json) {
  if (result_json == nullptr) {
    set_error("result_json is null");
    return QKASIM_ERR_INVALID_ARGUMENT;
  }
  json doc;
  qkasim_status rc = guarded([&] { doc = qka::harness::verify_identities(); });
  if (rc != QKASIM_OK) return rc;
  return emit(doc, result_json);
}

void qkasim_string_free(char* text) { std::free(text); }

}  // extern "C"
