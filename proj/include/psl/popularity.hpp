#pragma once

#include <cstdint>
#include <vector>

namespace psl {

// Normalized popularity pi_i = log(k_i + 2) / log(k_max + 2), in (0, 1].
// Isolated nodes get log(2)/log(k_max + 2) > 0; the value is independent of
// the logarithm base.
struct Popularity {
  std::vector<double> pi;
};

Popularity normalized_popularity(const std::vector<std::uint32_t>& degree);

}  // namespace psl
