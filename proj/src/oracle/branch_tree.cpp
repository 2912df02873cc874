#include "oracle/branch_tree.hpp"

#include <cmath>
#include <stdexcept>

namespace qka::oracle {

namespace {

void collect_leaves(const BranchNode& node,
                    std::vector<const BranchNode*>& out) {
  if (node.children.empty()) {
    out.push_back(&node);
    return;
  }
  for (const BranchNode& child : node.children) collect_leaves(child, out);
}

double accumulate(const BranchNode& node, double path, bool detected_only) {
  const double weight = path * node.probability;
  if (node.children.empty()) {
    if (detected_only && !node.detected.value_or(false)) return 0.0;
    return weight;
  }
  double sum = 0.0;
  for (const BranchNode& child : node.children) {
    sum += accumulate(child, weight, detected_only);
  }
  return sum;
}

}  // namespace

std::vector<const BranchNode*> BranchTree::leaves() const {
  std::vector<const BranchNode*> out;
  collect_leaves(root_, out);
  return out;
}

double BranchTree::leaf_probability_sum() const {
  return accumulate(root_, 1.0, false);
}

double BranchTree::detection_probability() const {
  return accumulate(root_, 1.0, true);
}

void BranchTree::check_probability_conservation(double tol) const {
  const double sum = leaf_probability_sum();
  if (std::abs(sum - 1.0) > tol) {
    throw std::logic_error("branch tree leaks probability: leaf sum " +
                           std::to_string(sum));
  }
}

}  // namespace qka::oracle
