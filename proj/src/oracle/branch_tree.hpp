#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qka::oracle {

// One event in the enumerated outcome tree of a checked position.  The
// probability is conditional on the parent; leaf nodes carry the detection
// verdict for their outcome pattern.
struct BranchNode {
  std::string record;
  double probability = 1.0;
  std::optional<bool> detected;
  std::vector<BranchNode> children;
};

// Exhaustive event tree: attack branches, then the basis coin, then the
// joint measurement outcomes.  Every probability is exact, so the leaf
// weights must sum to one; detection_probability() is the weight of the
// leaves flagged as detected.
class BranchTree {
 public:
  explicit BranchTree(BranchNode root) : root_(std::move(root)) {}

  const BranchNode& root() const { return root_; }

  std::vector<const BranchNode*> leaves() const;
  double leaf_probability_sum() const;
  double detection_probability() const;

  // Throws std::logic_error when the leaf weights fail to sum to 1
  // within tol.
  void check_probability_conservation(double tol = 1e-12) const;

 private:
  BranchNode root_;
};

}  // namespace qka::oracle
