// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsecache/distribution.hpp"

namespace sparsecache {

/// Token ids are opaque.
using Token = std::int32_t;

/// One request of a trace. Token-mode requests carry their full token
/// sequence and are matched against cached prefixes. Depth-mode requests
/// carry only the overlap depth and length, bypassing prefix matching.
struct Request {
  std::int64_t id = 0;
  std::string group;
  std::vector<Token> tokens;
  double arrival_time = 0.0;

  std::optional<Index> overlap_depth;
  Index declared_length = 0;

  bool depth_mode() const noexcept { return overlap_depth.has_value(); }
  Index length() const noexcept {
    return depth_mode() ? declared_length : static_cast<Index>(tokens.size());
  }
};

}  // namespace sparsecache
