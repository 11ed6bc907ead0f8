#pragma once

#include <string>
#include <string_view>

#include "olxp/loadgen.h"

namespace olxp {

// XML run configuration. Root element <run_spec>; children:
//   benchmark, fk, scale, seed, mode, loop, oltp_rate, olap_rate,
//   hybrid_rate, warmup_s, duration_s, terminals, jitter, queue_capacity,
//   grace_s, isolation, output,
//   weights/weight[@name] (integer text),
//   target[@descriptor, @pool].
struct XmlRunSpec {
  RunConfig run;  // benchmark, target and isolation live here
  bool fk = false;
  std::string output;  // report path; empty for stdout

  bool operator==(const XmlRunSpec& other) const;
};

// Errors: kConfig for malformed XML, unknown or repeated elements and
// unparsable values; kUnknownBenchmark; kValidation for conflicting fields.
// Messages start with the element path, e.g. "run_spec/oltp_rate: ...".
XmlRunSpec ParseConfigText(std::string_view xml);

// Reads and parses a file. kIo when it cannot be read.
XmlRunSpec ParseConfig(const std::string& path);

// Checks a spec against the run invariants and its catalog.
void ValidateSpec(const XmlRunSpec& spec);

// Serializes every field; ParseConfigText(EmitConfig(s)) == s.
std::string EmitConfig(const XmlRunSpec& spec);

}  // namespace olxp
