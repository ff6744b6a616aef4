#pragma once

#include <string_view>

#include "polyglot/bytes.hpp"
#include "polyglot/rng.hpp"

namespace polyglot::detail {

/// Payload byte textures. Each stands in for the content statistics of one
/// format family (compressed archive data, palette-indexed pixels, text...).
enum class Texture { Uniform, Text, GrayBand, LowCodes, HighCodes, MidBand, Code };

void fill(Rng& rng, Texture texture, Bytes& out, std::size_t n);

/// Space-separated lowercase words, at most `n` bytes, no newline.
std::string words(Rng& rng, std::size_t n);

}  // namespace polyglot::detail
