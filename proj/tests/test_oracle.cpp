#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>

#include "attacks/attack_spec.hpp"
#include "oracle/branch_tree.hpp"
#include "oracle/detection_oracle.hpp"
#include "protocol/config.hpp"

using namespace qka;
using namespace qka::oracle;
using qka::attack::AncillaPair;
using qka::attack::AttackKind;
using qka::attack::AttackSpec;

namespace {

proto::ProtocolConfig config(int parties, int key_len, int delta, int zeta) {
  proto::ProtocolConfig cfg;
  cfg.parties = parties;
  cfg.key_len = key_len;
  cfg.delta = delta;
  cfg.zeta = zeta;
  return cfg;
}

AttackSpec spec_of(AttackKind kind) {
  AttackSpec spec;
  spec.kind = kind;
  if (kind == AttackKind::CollusiveParticipants) spec.colluders = {2, 3};
  return spec;
}

}  // namespace

TEST_CASE("measure-and-resend disturbs one decoy in four") {
  // 4 preparations x 2 eavesdropping bases x 2 outcomes, enumerated.
  CHECK(intercept_resend_decoy_error() ==
        doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("honest positions never flag") {
  for (int m = 2; m <= 5; ++m) {
    const PerParticleDetection per = per_particle_detection(nullptr, m);
    CHECK(per.p_z == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(per.p_x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(per.p_total == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_FALSE(per.conditional_p_total.has_value());
  }
  const RunDetection run = run_detection(nullptr, config(3, 64, 8, 16));
  CHECK(run.p_abort == 0.0);
  CHECK_FALSE(published_claim_detection(nullptr, config(3, 64, 8, 16))
                  .has_value());
}

TEST_CASE("channel-only interception leaves checked positions clean") {
  const AttackSpec spec = spec_of(AttackKind::ExternalInterceptResend);
  const PerParticleDetection per = per_particle_detection(&spec, 3);
  CHECK(per.p_total == doctest::Approx(0.0).epsilon(1e-15));

  const RunDetection run = run_detection(&spec, config(3, 64, 8, 16));
  // Sixteen decoys on the targeted channel, each disturbed with
  // probability 1/4: abort rate 1 - (3/4)^16.
  const double expected = 1.0 - 43046721.0 / 4294967296.0;
  CHECK(run.p_first_abort == doctest::Approx(expected).epsilon(1e-15));
  CHECK(run.p_second_abort_given_first_pass ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(run.p_abort == doctest::Approx(expected).epsilon(1e-15));
  CHECK(run.p_abort == doctest::Approx(0.989977404).epsilon(1e-9));
}

TEST_CASE("interception probability scales the decoy error linearly") {
  AttackSpec spec = spec_of(AttackKind::ExternalInterceptResend);
  spec.per_decoy_probability = 0.5;
  const RunDetection run = run_detection(&spec, config(3, 64, 8, 16));
  CHECK(run.p_first_abort ==
        doctest::Approx(1.0 - std::pow(1.0 - 0.125, 16)).epsilon(1e-12));
}

TEST_CASE("counterfeit signal qubits flag half the correlation checks") {
  const AttackSpec spec = spec_of(AttackKind::HashLeakInterceptResend);
  for (int m = 2; m <= 4; ++m) {
    const PerParticleDetection per = per_particle_detection(&spec, m);
    CHECK(per.p_z == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(per.p_x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(per.p_total == doctest::Approx(0.5).epsilon(1e-12));
  }

  const RunDetection run = run_detection(&spec, config(3, 16, 2, 4));
  const double p_first = 1.0 - std::pow(0.75, 4);
  const double p_second = 1.0 - std::pow(0.5, 6);
  CHECK(run.p_first_abort == doctest::Approx(p_first).epsilon(1e-12));
  CHECK(run.p_second_abort_given_first_pass ==
        doctest::Approx(p_second).epsilon(1e-12));
  CHECK(run.p_abort ==
        doctest::Approx(p_first + (1.0 - p_first) * p_second).epsilon(1e-12));
}

TEST_CASE("suppressing the decoy attack moves all detection downstream") {
  AttackSpec spec = spec_of(AttackKind::HashLeakInterceptResend);
  spec.suppress_first_detection = true;
  const RunDetection run = run_detection(&spec, config(3, 16, 2, 4));
  CHECK(run.p_first_abort == 0.0);
  CHECK(run.p_abort ==
        doctest::Approx(1.0 - std::pow(0.5, 6)).epsilon(1e-12));
}

TEST_CASE("insider measurement order does not disturb any position") {
  for (AttackKind kind : {AttackKind::DishonestParticipant,
                          AttackKind::CollusiveParticipants}) {
    const AttackSpec spec = spec_of(kind);
    const PerParticleDetection per = per_particle_detection(&spec, 3);
    CHECK(per.p_total == doctest::Approx(0.0).epsilon(1e-15));
    const RunDetection run = run_detection(&spec, config(3, 64, 8, 16));
    CHECK(run.p_abort == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("product source: z rounds never flag, x rounds flag half") {
  const AttackSpec spec = spec_of(AttackKind::TpProductState);
  for (int m = 2; m <= 5; ++m) {
    const PerParticleDetection per = per_particle_detection(&spec, m);
    CHECK(per.p_z == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(per.p_x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(per.p_total == doctest::Approx(0.25).epsilon(1e-12));
  }

  const RunDetection run = run_detection(&spec, config(3, 64, 8, 16));
  // 24 correlation checks at 1/4 each; the channel check sees nothing.
  const double expected = 1.0 - 282429536481.0 / 281474976710656.0;
  CHECK(run.p_first_abort == 0.0);
  CHECK(run.p_abort == doctest::Approx(expected).epsilon(1e-15));
  CHECK(run.p_abort == doctest::Approx(0.998996608).epsilon(1e-9));
}

TEST_CASE("published product-state detection rate has a different base") {
  const AttackSpec spec = spec_of(AttackKind::TpProductState);
  const auto claim = published_claim_detection(&spec, config(3, 64, 8, 16));
  REQUIRE(claim.has_value());
  CHECK(*claim == doctest::Approx(1.0 - 1.0 / 65536.0).epsilon(1e-15));
  CHECK(*claim != doctest::Approx(run_detection(&spec, config(3, 64, 8, 16))
                                      .p_abort)
                      .epsilon(1e-6));
}

TEST_CASE("entangling source rates across the overlap sweep") {
  for (double ov : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    AttackSpec spec = spec_of(AttackKind::TpEntangling);
    spec.ancilla = AncillaPair::from_overlap(ov);
    const PerParticleDetection per = per_particle_detection(&spec, 3);
    CHECK(per.p_z == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(per.p_x == doctest::Approx((1.0 - ov) / 2.0).epsilon(1e-12));
    // Cross-module agreement with the closed-form rates.
    const attack::EntanglingRates rates =
        attack::tp_entangling_rates(spec.ancilla, 3);
    CHECK(rates.x_basis_error_rate == doctest::Approx(per.p_x).epsilon(1e-12));
    CHECK(rates.tp_guess_advantage ==
          doctest::Approx(std::sqrt(1.0 - ov * ov) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("impersonation: wrong guesses flag half the checks in each basis") {
  const AttackSpec spec = spec_of(AttackKind::Impersonation);
  for (int m = 2; m <= 4; ++m) {
    const PerParticleDetection per = per_particle_detection(&spec, m);
    REQUIRE(per.conditional_p_z.has_value());
    CHECK(per.condition == "wrong basis guess");
    CHECK(per.condition_probability == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(*per.conditional_p_z == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(*per.conditional_p_x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(*per.conditional_p_total == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(per.p_total == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("published impersonation detection rate differs from the oracle") {
  const AttackSpec spec = spec_of(AttackKind::Impersonation);
  const proto::ProtocolConfig cfg = config(3, 64, 8, 16);
  const auto claim = published_claim_detection(&spec, cfg);
  REQUIRE(claim.has_value());
  CHECK(*claim ==
        doctest::Approx(1.0 - 390625.0 / 16777216.0).epsilon(1e-15));

  const RunDetection run = run_detection(&spec, cfg);
  CHECK(run.p_first_abort == 0.0);
  CHECK(run.p_abort ==
        doctest::Approx(1.0 - std::pow(0.75, 24)).epsilon(1e-12));
}

TEST_CASE("the random-correction impersonator is caught more often") {
  AttackSpec honest = spec_of(AttackKind::Impersonation);
  AttackSpec random = spec_of(AttackKind::Impersonation);
  random.correction = "random";
  const PerParticleDetection per_honest = per_particle_detection(&honest, 3);
  const PerParticleDetection per_random = per_particle_detection(&random, 3);
  CHECK(per_random.p_total > per_honest.p_total);
}

TEST_CASE("branch trees conserve probability for every attack kind") {
  const AttackKind kinds[] = {
      AttackKind::ExternalInterceptResend,
      AttackKind::HashLeakInterceptResend,
      AttackKind::DishonestParticipant,
      AttackKind::CollusiveParticipants,
      AttackKind::TpProductState,
      AttackKind::TpEntangling,
      AttackKind::Impersonation,
  };
  for (int m : {2, 3, 5}) {
    BranchTree honest_tree = build_detection_branch_tree(nullptr, m);
    CHECK_NOTHROW(honest_tree.check_probability_conservation());
    for (AttackKind kind : kinds) {
      AttackSpec spec = spec_of(kind);
      const BranchTree tree = build_detection_branch_tree(&spec, m);
      CHECK_NOTHROW(tree.check_probability_conservation());
      CHECK(tree.leaf_probability_sum() ==
            doctest::Approx(1.0).epsilon(1e-12));
      // The tree's flagged weight and the folded per-particle rate are the
      // same number computed two ways.
      const PerParticleDetection per = per_particle_detection(&spec, m);
      CHECK(tree.detection_probability() ==
            doctest::Approx(per.p_total).epsilon(1e-12));
    }
  }
}

TEST_CASE("honest branch tree has one branch, two bases, all outcomes") {
  const BranchTree tree = build_detection_branch_tree(nullptr, 3);
  CHECK(tree.root().children.size() == 1);
  CHECK(tree.root().children[0].children.size() == 2);
  CHECK(tree.leaves().size() == 2 * 8);
  CHECK(tree.detection_probability() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("run composition folds the two detection stages") {
  const AttackSpec spec = spec_of(AttackKind::HashLeakInterceptResend);
  const RunDetection run = run_detection(&spec, config(4, 32, 4, 8));
  CHECK(run.p_abort ==
        doctest::Approx(run.p_first_abort +
                        (1.0 - run.p_first_abort) *
                            run.p_second_abort_given_first_pass)
            .epsilon(1e-15));
}

TEST_CASE("nonzero thresholds turn the stages into binomial tails") {
  SUBCASE("threshold one disables every abort") {
    for (AttackKind kind :
         {AttackKind::ExternalInterceptResend, AttackKind::TpProductState,
          AttackKind::Impersonation}) {
      const AttackSpec spec = spec_of(kind);
      proto::ProtocolConfig cfg = config(3, 16, 2, 8);
      cfg.error_threshold = 1.0;
      const RunDetection run = run_detection(&spec, cfg);
      CHECK(run.p_abort == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(run.p_first_abort == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
  SUBCASE("decoy check tolerating one error in four") {
    // Per decoy p = 1/4; abort needs two or more of the four to err:
    // 1 - (3/4)^4 - 4*(1/4)*(3/4)^3 = 67/256.
    const AttackSpec spec = spec_of(AttackKind::ExternalInterceptResend);
    proto::ProtocolConfig cfg = config(3, 16, 2, 4);
    cfg.error_threshold = 0.25;
    const RunDetection run = run_detection(&spec, cfg);
    CHECK(run.p_first_abort == doctest::Approx(67.0 / 256.0).epsilon(1e-15));
  }
  SUBCASE("detection round tolerating one error in four") {
    // Suppressed hash leak: no decoy stage, per position p = 1/2; a round
    // of four aborts with 1 - 5/16 = 11/16, and two rounds compose to
    // 1 - (5/16)^2 = 231/256.
    AttackSpec spec = spec_of(AttackKind::HashLeakInterceptResend);
    spec.suppress_first_detection = true;
    proto::ProtocolConfig cfg = config(2, 16, 4, 4);
    cfg.error_threshold = 0.25;
    const RunDetection run = run_detection(&spec, cfg);
    CHECK(run.p_first_abort == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(run.p_second_abort_given_first_pass ==
          doctest::Approx(231.0 / 256.0).epsilon(1e-15));
    CHECK(run.p_abort == doctest::Approx(231.0 / 256.0).epsilon(1e-15));
  }
}

TEST_CASE("claims exist only where the published analysis states one") {
  const proto::ProtocolConfig cfg = config(3, 64, 8, 16);
  for (AttackKind kind :
       {AttackKind::ExternalInterceptResend, AttackKind::HashLeakInterceptResend,
        AttackKind::DishonestParticipant, AttackKind::CollusiveParticipants,
        AttackKind::TpEntangling}) {
    const AttackSpec spec = spec_of(kind);
    CHECK_FALSE(published_claim_detection(&spec, cfg).has_value());
  }
}

TEST_CASE("mixtures reject degenerate party counts") {
  CHECK_THROWS_AS(particle_mixture(nullptr, 1), std::invalid_argument);
}

TEST_CASE("particle mixtures are normalized") {
  for (AttackKind kind :
       {AttackKind::TpProductState, AttackKind::TpEntangling,
        AttackKind::Impersonation, AttackKind::HashLeakInterceptResend}) {
    const AttackSpec spec = spec_of(kind);
    const ParticleMixture mix = particle_mixture(&spec, 3);
    double total = 0.0;
    for (const PositionBranch& branch : mix.branches) {
      total += branch.probability;
      CHECK(std::abs(branch.state.norm() - 1.0) < 1e-9);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}
