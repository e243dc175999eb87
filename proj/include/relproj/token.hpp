#pragma once

#include <string>

#include "relproj/types.hpp"

namespace relproj {

// Normalizes a raw surface form into the convention used by the embedding
// vocabularies: lower-case, no PoS-tag suffix, multi-word names joined with
// "::". Examples:
//   "South::Sudan_PROPN" -> "south::sudan"
//   "Islamic State"      -> "islamic::state"
//   "taliban"            -> "taliban"
// A PoS tag is a trailing "_" followed by an all-uppercase alphabetic suffix;
// at most one tag is stripped per word part. Throws Error on empty input or
// input that normalizes to the empty string.
Token normalize_token(const std::string& raw);

// True if `t` already satisfies the Token invariants: nonempty, no
// whitespace, no "_" + uppercase-tag suffix on any part.
bool is_normalized_token(const std::string& t);

}  // namespace relproj
