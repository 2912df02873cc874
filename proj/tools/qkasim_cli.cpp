#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkasim.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

constexpr double kMismatchZ = 4.0;

int exit_code_for(qkasim_status rc) {
  switch (rc) {
    case QKASIM_OK:
      return kExitOk;
    case QKASIM_ERR_INVALID_ARGUMENT:
    case QKASIM_ERR_PARSE:
      return kExitConfig;
    case QKASIM_ERR_IO:
    case QKASIM_ERR_INTERNAL:
      return kExitIo;
  }
  return kExitIo;
}

int fail(qkasim_status rc, const std::string& what) {
  std::cerr << "error: " << what << ": " << qkasim_last_error() << "\n";
  return exit_code_for(rc);
}

// Owns one scenario handle for the duration of a subcommand.
struct ScenarioHandle {
  qkasim_scenario* ptr = nullptr;
  ~ScenarioHandle() { qkasim_scenario_destroy(ptr); }
};

// Command-line values mirrored into the scenario document.  A flag only
// touches the document when the user passed it, so file and defaults stay
// authoritative for everything else.
struct Flags {
  std::string config_path;
  std::string out_path;
  int64_t parties = 0;
  int64_t key_len = 0;
  int64_t delta = 0;
  int64_t zeta = 0;
  double error_threshold = 0.0;
  std::string attack;
  int64_t target = 0;
  std::vector<int64_t> colluders;
  int64_t target_bit = 0;
  int64_t target_position = 0;
  double per_decoy_prob = 0.0;
  bool suppress_first_detection = false;
  std::string correction;
  double overlap = 0.0;
  int64_t trials = 0;
  int64_t seed = 0;
  bool raw_json = false;
};

void add_scenario_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path,
                  "Scenario JSON file; flags override its fields");
  cmd->add_option("--parties", f.parties, "Number of participants");
  cmd->add_option("--key-len", f.key_len, "Agreed key length in bits");
  cmd->add_option("--delta", f.delta,
                  "Detection positions per round (one round per party)");
  cmd->add_option("--zeta", f.zeta, "Decoy states per channel");
  cmd->add_option("--error-threshold", f.error_threshold,
                  "Tolerated error rate before abort");
  cmd->add_option("--attack", f.attack, "Adversary kind (omit for honest)");
  cmd->add_option("--target", f.target, "Targeted party, 1-based");
  cmd->add_option("--colluders", f.colluders,
                  "Colluding parties, 1-based, comma separated")
      ->delimiter(',');
  cmd->add_option("--target-bit", f.target_bit, "Key bit value to force");
  cmd->add_option("--target-position", f.target_position,
                  "Key position to force, 0-based");
  cmd->add_option("--per-decoy-prob", f.per_decoy_prob,
                  "Interception probability per decoy");
  cmd->add_flag("--suppress-first-detection", f.suppress_first_detection,
                "Leave decoys untouched on the targeted channel");
  cmd->add_option("--correction", f.correction,
                  "Impersonator correction strategy: honest or random");
  cmd->add_option("--overlap", f.overlap,
                  "Ancilla overlap of the entangling source, in [0, 1]");
  cmd->add_option("--trials", f.trials, "Monte Carlo runs");
  cmd->add_option("--seed", f.seed, "Root seed for the batch");
  cmd->add_option("--out", f.out_path, "Write the JSON document here");
}

// Builds the handle from --config (when given) and layers passed flags on
// top.  Returns kExitOk or the exit code to terminate with.
int build_scenario(const CLI::App* cmd, const Flags& f, ScenarioHandle& h) {
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read '" << f.config_path << "'\n";
      return kExitIo;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    h.ptr = qkasim_scenario_from_json(buf.str().c_str());
    if (h.ptr == nullptr) {
      std::cerr << "error: " << f.config_path << ": " << qkasim_last_error()
                << "\n";
      return kExitConfig;
    }
  } else {
    h.ptr = qkasim_scenario_create();
    if (h.ptr == nullptr) {
      std::cerr << "error: " << qkasim_last_error() << "\n";
      return kExitIo;
    }
  }

  struct IntFlag {
    const char* name;
    const char* key;
    int64_t value;
  };
  const IntFlag ints[] = {
      {"--parties", "protocol.parties", f.parties},
      {"--key-len", "protocol.key_len", f.key_len},
      {"--delta", "protocol.delta", f.delta},
      {"--zeta", "protocol.zeta", f.zeta},
      {"--target", "attack.target", f.target},
      {"--target-bit", "attack.target_bit", f.target_bit},
      {"--target-position", "attack.target_position", f.target_position},
      {"--trials", "trials", f.trials},
      {"--seed", "seed", f.seed},
  };
  for (const IntFlag& i : ints) {
    if (cmd->count(i.name) == 0) continue;
    qkasim_status rc = qkasim_scenario_set_int(h.ptr, i.key, i.value);
    if (rc != QKASIM_OK) return fail(rc, i.name);
  }

  struct DoubleFlag {
    const char* name;
    const char* key;
    double value;
  };
  const DoubleFlag doubles[] = {
      {"--error-threshold", "protocol.error_threshold", f.error_threshold},
      {"--per-decoy-prob", "attack.per_decoy_probability", f.per_decoy_prob},
      {"--overlap", "attack.overlap", f.overlap},
  };
  for (const DoubleFlag& d : doubles) {
    if (cmd->count(d.name) == 0) continue;
    qkasim_status rc = qkasim_scenario_set_double(h.ptr, d.key, d.value);
    if (rc != QKASIM_OK) return fail(rc, d.name);
  }

  if (cmd->count("--attack") > 0) {
    qkasim_status rc =
        qkasim_scenario_set_string(h.ptr, "attack.kind", f.attack.c_str());
    if (rc != QKASIM_OK) return fail(rc, "--attack");
  }
  if (cmd->count("--correction") > 0) {
    qkasim_status rc = qkasim_scenario_set_string(h.ptr, "attack.correction",
                                                  f.correction.c_str());
    if (rc != QKASIM_OK) return fail(rc, "--correction");
  }
  if (cmd->count("--colluders") > 0) {
    json arr = json::array();
    for (int64_t c : f.colluders) arr.push_back(c);
    qkasim_status rc = qkasim_scenario_set_json(h.ptr, "attack.parties",
                                                arr.dump().c_str());
    if (rc != QKASIM_OK) return fail(rc, "--colluders");
  }
  if (cmd->count("--suppress-first-detection") > 0) {
    qkasim_status rc = qkasim_scenario_set_json(
        h.ptr, "attack.suppress_first_detection", "true");
    if (rc != QKASIM_OK) return fail(rc, "--suppress-first-detection");
  }
  if (cmd->count("--out") > 0) {
    qkasim_status rc =
        qkasim_scenario_set_string(h.ptr, "output_path", f.out_path.c_str());
    if (rc != QKASIM_OK) return fail(rc, "--out");
  }
  return kExitOk;
}

std::string fixed6(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << v;
  return s.str();
}

std::string compact(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void print_scenario(const json& sc) {
  const json& p = sc.at("protocol");
  std::cout << "scenario\n"
            << "  parties " << p.at("parties").get<int>() << "   key_len "
            << p.at("key_len").get<int>() << "   delta "
            << p.at("delta").get<int>() << "   zeta "
            << p.at("zeta").get<int>() << "   error_threshold "
            << p.at("error_threshold").get<double>() << "\n"
            << "  trials " << sc.at("trials").get<long>() << "   seed "
            << sc.at("seed").get<uint64_t>() << "\n";
  const json& attack = sc.at("attack");
  if (attack.is_null()) {
    std::cout << "  attack none\n";
    return;
  }
  std::cout << "  attack " << attack.at("kind").get<std::string>();
  for (const auto& [key, value] : attack.items()) {
    if (key == "kind" || key == "theta0" || key == "theta1") continue;
    std::cout << "  " << key << "=" << compact(value);
  }
  std::cout << "\n";
}

void print_report(const json& report) {
  print_scenario(report.at("scenario"));

  const json& s = report.at("summary");
  std::cout << "\naborts\n"
            << "  observed  " << fixed6(s.at("rate").get<double>()) << "   ("
            << s.at("events").get<long>() << "/" << s.at("trials").get<long>()
            << ", wilson 95% [" << fixed6(s.at("wilson_low").get<double>())
            << ", " << fixed6(s.at("wilson_high").get<double>()) << "])\n";
  if (!s.at("oracle_value").is_null()) {
    std::cout << "  exact     " << fixed6(s.at("oracle_value").get<double>());
    if (!s.at("z_vs_oracle").is_null()) {
      std::cout << "   (z " << std::showpos << std::fixed
                << std::setprecision(2) << s.at("z_vs_oracle").get<double>()
                << std::noshowpos << ")";
    }
    std::cout << "\n";
  }
  if (!s.at("published_claim").is_null()) {
    std::cout << "  claimed   "
              << fixed6(s.at("published_claim").get<double>())
              << "   (closed form, shown for comparison)\n";
  }

  const json& d = report.at("detection");
  std::cout << "\ndetection\n"
            << "  first-stage errors  "
            << d.at("first_detection_errors").get<long>()
            << "   aborts " << d.at("aborts_at_first_detection").get<long>()
            << "\n"
            << "  second-stage errors "
            << d.at("second_detection_errors").get<long>() << "   aborts "
            << d.at("aborts_at_second_detection").get<long>() << "\n";

  const json& h = report.at("honest_stats");
  std::cout << "\nkeys\n"
            << "  completed runs " << h.at("completed_runs").get<long>()
            << "   identical across parties "
            << h.at("keys_identical_runs").get<long>() << "\n";
  if (h.contains("key_ones_frequency")) {
    std::cout << "  ones frequency "
              << fixed6(h.at("key_ones_frequency").get<double>()) << "   (z "
              << std::showpos << std::fixed << std::setprecision(2)
              << h.at("key_ones_z_vs_half").get<double>() << std::noshowpos
              << " vs 1/2 over " << h.at("key_bits").get<long>()
              << " bits)\n";
  }

  const json& a = report.at("attack_stats");
  if (!a.is_null()) {
    std::cout << "\nattack\n";
    for (const auto& [key, value] : a.items()) {
      if (key == "kind") continue;
      std::cout << "  " << key << " " << compact(value) << "\n";
    }
  }
}

int cmd_run(const CLI::App* cmd, const Flags& f) {
  ScenarioHandle h;
  int rc = build_scenario(cmd, f, h);
  if (rc != kExitOk) return rc;

  char* text = nullptr;
  qkasim_status st = qkasim_run(h.ptr, &text);
  if (st != QKASIM_OK) return fail(st, "run");

  json report = json::parse(text);
  qkasim_string_free(text);

  if (f.raw_json) {
    std::cout << report.dump(2) << "\n";
  } else {
    print_report(report);
    if (!f.out_path.empty()) {
      std::cout << "\nreport written to " << f.out_path << "\n";
    }
  }

  const json& z = report.at("summary").at("z_vs_oracle");
  if (!z.is_null() && std::fabs(z.get<double>()) >= kMismatchZ) {
    std::cerr << "statistical mismatch: |z| = "
              << std::fabs(z.get<double>()) << " against the exact rate\n";
    return kExitMismatch;
  }
  return kExitOk;
}

int cmd_oracle(const CLI::App* cmd, const Flags& f) {
  ScenarioHandle h;
  int rc = build_scenario(cmd, f, h);
  if (rc != kExitOk) return rc;

  char* text = nullptr;
  qkasim_status st = qkasim_oracle(h.ptr, &text);
  if (st != QKASIM_OK) return fail(st, "oracle");

  json doc = json::parse(text);
  qkasim_string_free(text);

  if (!f.out_path.empty()) {
    std::ofstream out(f.out_path, std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << "\n";
    if (!out.flush()) {
      std::cerr << "error: cannot write '" << f.out_path << "'\n";
      return kExitIo;
    }
  }
  if (f.raw_json) {
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
  }

  print_scenario(doc.at("scenario"));
  const json& per = doc.at("per_particle");
  std::cout << "\nper checked position\n"
            << "  p_error[z] " << fixed6(per.at("p_z").get<double>())
            << "   p_error[x] " << fixed6(per.at("p_x").get<double>())
            << "   p_error    " << fixed6(per.at("p_total").get<double>())
            << "\n";
  if (per.contains("conditional_p_total")) {
    std::cout << "  given " << per.at("condition").get<std::string>()
              << " (probability "
              << fixed6(per.at("condition_probability").get<double>())
              << "):\n"
              << "  p_error[z] "
              << fixed6(per.at("conditional_p_z").get<double>())
              << "   p_error[x] "
              << fixed6(per.at("conditional_p_x").get<double>())
              << "   p_error    "
              << fixed6(per.at("conditional_p_total").get<double>()) << "\n";
  }
  const json& run = doc.at("run");
  std::cout << "\nper run\n"
            << "  abort at decoy check       "
            << fixed6(run.at("p_first_abort").get<double>()) << "\n"
            << "  abort at detection rounds  "
            << fixed6(
                   run.at("p_second_abort_given_first_pass").get<double>())
            << "   (given decoys passed)\n"
            << "  abort overall              "
            << fixed6(run.at("p_abort").get<double>()) << "\n";
  if (!doc.at("published_claim").is_null()) {
    std::cout << "  claimed                    "
              << fixed6(doc.at("published_claim").get<double>())
              << "   (closed form, shown for comparison)\n";
  }
  const json& tree = doc.at("branch_tree");
  std::cout << "\nbranch tree\n"
            << "  leaves " << tree.at("leaves").get<long>()
            << "   probability sum "
            << std::setprecision(12)
            << tree.at("leaf_probability_sum").get<double>()
            << "   detection "
            << fixed6(tree.at("detection_probability").get<double>()) << "\n";
  if (doc.contains("entangling")) {
    const json& e = doc.at("entangling");
    std::cout << "\nentangling source\n"
              << "  ancilla overlap    "
              << fixed6(e.at("overlap").get<double>()) << "\n"
              << "  x-basis error rate "
              << fixed6(e.at("x_basis_error_rate").get<double>()) << "\n"
              << "  tp guess advantage "
              << fixed6(e.at("tp_guess_advantage").get<double>()) << "\n";
  }
  return kExitOk;
}

int cmd_verify_identities(const Flags& f) {
  char* text = nullptr;
  qkasim_status st = qkasim_verify_identities(&text);
  if (st != QKASIM_OK) return fail(st, "verify-identities");

  json doc = json::parse(text);
  qkasim_string_free(text);

  if (f.raw_json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "identity checks (tolerance "
              << doc.at("checks").front().at("tolerance").get<double>()
              << ")\n";
    for (const json& check : doc.at("checks")) {
      std::cout << "  " << std::left << std::setw(28)
                << check.at("name").get<std::string>() << std::right
                << "max deviation " << std::scientific
                << std::setprecision(3)
                << check.at("max_deviation").get<double>() << "   "
                << (check.at("pass").get<bool>() ? "pass" : "FAIL") << "\n";
    }
    std::cout << std::defaultfloat;
  }
  return doc.at("pass").get<bool>() ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and verification harness for an authenticated "
               "multi-party key agreement protocol"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qkasim_version()));

  Flags run_flags, oracle_flags, verify_flags;

  CLI::App* run = app.add_subcommand(
      "run", "Monte Carlo batch of protocol runs with optional adversary");
  add_scenario_flags(run, run_flags);
  run->add_flag("--json", run_flags.raw_json,
                "Print the raw report instead of the table");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "Exact detection statistics for a scenario, no sampling");
  add_scenario_flags(oracle, oracle_flags);
  oracle->add_flag("--json", oracle_flags.raw_json,
                   "Print the raw document instead of the table");

  CLI::App* verify = app.add_subcommand(
      "verify-identities", "Numerically verify the protocol's algebra");
  verify->add_flag("--json", verify_flags.raw_json,
                   "Print the raw document instead of the table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(run, run_flags);
    if (oracle->parsed()) return cmd_oracle(oracle, oracle_flags);
    return cmd_verify_identities(verify_flags);
  } catch (const json::exception& e) {
    std::cerr << "error: malformed document from library: " << e.what()
              << "\n";
    return kExitIo;
  }
}
