#pragma once

#include <string>

#include "plkit/maps.hpp"

namespace plkit {

// Text grammar: z, i, decimal literals, + - * / ^ (non-negative integer
// exponents), parentheses and implicit multiplication ("0.5z", "2i").
// Also accepts {"numerator": [[re,im],...], "denominator": [[re,im],...]}
// with ascending coefficients; the denominator defaults to 1.
MapSpec parse_map(const std::string& text);

}  // namespace plkit
