#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace olxp {

// A SQL scalar. monostate is NULL; decimals travel as double.
using Value = std::variant<std::monostate, int64_t, double, std::string>;
using Row = std::vector<Value>;

inline bool IsNull(const Value& v) { return std::holds_alternative<std::monostate>(v); }

// Canonical text form: NULL, integers in decimal, doubles with 17 significant
// digits, strings quoted. Used for checksums and listings.
std::string ToDisplay(const Value& v);

// FNV-1a over a type-tagged byte encoding of the row.
uint64_t HashRow(const Row& row);

}  // namespace olxp
