#include "olxp/value.h"

#include <cstring>

#include <fmt/format.h>

namespace olxp {
namespace {

constexpr uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;

void Mix(uint64_t& h, const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

std::string ToDisplay(const Value& v) {
  switch (v.index()) {
    case 0: return "NULL";
    case 1: return fmt::format("{}", std::get<int64_t>(v));
    case 2: return fmt::format("{:.17g}", std::get<double>(v));
    default: return fmt::format("'{}'", std::get<std::string>(v));
  }
}

uint64_t HashRow(const Row& row) {
  uint64_t h = kFnvOffset;
  for (const Value& v : row) {
    const unsigned char tag = static_cast<unsigned char>(v.index());
    Mix(h, &tag, 1);
    switch (v.index()) {
      case 1: {
        int64_t x = std::get<int64_t>(v);
        Mix(h, &x, sizeof x);
        break;
      }
      case 2: {
        double d = std::get<double>(v);
        uint64_t bits;
        std::memcpy(&bits, &d, sizeof bits);
        Mix(h, &bits, sizeof bits);
        break;
      }
      case 3: {
        const std::string& s = std::get<std::string>(v);
        uint64_t n = s.size();
        Mix(h, &n, sizeof n);
        Mix(h, s.data(), s.size());
        break;
      }
      default: break;
    }
  }
  return h;
}

}  // namespace olxp
