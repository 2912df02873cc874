#include "protocol/config.hpp"

#include <stdexcept>

namespace qka::proto {

void ProtocolConfig::validate() const {
  if (parties < 2) throw std::invalid_argument("parties: need at least 2");
  if (parties > 10) throw std::invalid_argument("parties: at most 10 supported");
  if (key_len < 1) throw std::invalid_argument("key_len: must be positive");
  if (delta < 1) throw std::invalid_argument("delta: must be positive");
  if (zeta < 0) throw std::invalid_argument("zeta: must be non-negative");
  if (error_threshold < 0.0 || error_threshold > 1.0) {
    throw std::invalid_argument("error_threshold: must lie in [0,1]");
  }
}

}  // namespace qka::proto
