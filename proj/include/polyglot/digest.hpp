#pragma once

#include <string>

#include "polyglot/bytes.hpp"

namespace polyglot {

/// Lowercase hex SHA-256.
std::string sha256_hex(ByteView data);

}  // namespace polyglot
