#include "olxp/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

#include "olxp/error.h"

namespace olxp {
namespace {

namespace pt = boost::property_tree;

constexpr std::string_view kRoot = "run_spec";
constexpr std::string_view kAttr = "<xmlattr>";
constexpr std::string_view kComment = "<xmlcomment>";

[[noreturn]] void Fail(ErrorCategory category, std::string_view path, const std::string& msg) {
  throw Error(category, fmt::format("{}: {}", path, msg));
}

// Re-throws errors from `fn` with `path` in front, keeping the category.
template <typename Fn>
auto Within(std::string_view path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    Fail(e.category(), path, e.what());
  }
}

template <typename T>
T ParseNumber(std::string_view path, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    Fail(ErrorCategory::kConfig, path, fmt::format("expected a number, got '{}'", text));
  }
  return value;
}

bool ParseBool(std::string_view path, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  Fail(ErrorCategory::kConfig, path, fmt::format("expected true or false, got '{}'", text));
}

template <typename T>
T ParseEnum(std::string_view path, const std::string& text,
            std::optional<T> (*parse)(std::string_view), std::string_view choices) {
  auto v = parse(text);
  if (!v) Fail(ErrorCategory::kConfig, path, fmt::format("'{}' is not one of {}", text, choices));
  return *v;
}

// Text of a leaf element; children other than comments are an error.
std::string Leaf(std::string_view path, const pt::ptree& node) {
  for (const auto& [name, child] : node) {
    if (name != kComment) Fail(ErrorCategory::kConfig, path, fmt::format("unexpected <{}>", name));
  }
  return node.data();
}

void ParseWeights(const pt::ptree& node, std::map<std::string, int64_t>& weights) {
  const std::string path = fmt::format("{}/weights", kRoot);
  for (const auto& [name, child] : node) {
    if (name == kComment) continue;
    if (name != "weight") Fail(ErrorCategory::kConfig, path, fmt::format("unknown element <{}>", name));
    const std::string wpath = path + "/weight";
    std::optional<std::string> tmpl;
    for (const auto& [attr, value] : child) {
      if (attr == kComment) continue;
      if (attr != kAttr) Fail(ErrorCategory::kConfig, wpath, fmt::format("unexpected <{}>", attr));
      for (const auto& [key, v] : value) {
        if (key != "name") Fail(ErrorCategory::kConfig, wpath, fmt::format("unknown attribute {}", key));
        tmpl = v.data();
      }
    }
    if (!tmpl || tmpl->empty()) Fail(ErrorCategory::kConfig, wpath, "missing @name");
    const std::string npath = fmt::format("{}[@name='{}']", wpath, *tmpl);
    if (weights.count(*tmpl)) Fail(ErrorCategory::kConfig, npath, "repeated weight");
    weights[*tmpl] = ParseNumber<int64_t>(npath, child.data());
  }
}

void ParseTarget(const pt::ptree& node, std::string& descriptor, int& pool) {
  const std::string path = fmt::format("{}/target", kRoot);
  bool have_descriptor = false;
  for (const auto& [name, child] : node) {
    if (name == kComment) continue;
    if (name != kAttr) Fail(ErrorCategory::kConfig, path, fmt::format("unexpected <{}>", name));
    for (const auto& [key, v] : child) {
      if (key == "descriptor") {
        descriptor = v.data();
        have_descriptor = true;
      } else if (key == "pool") {
        pool = ParseNumber<int>(path + "/@pool", v.data());
      } else {
        Fail(ErrorCategory::kConfig, path, fmt::format("unknown attribute {}", key));
      }
    }
  }
  if (!node.data().empty()) Fail(ErrorCategory::kConfig, path, "unexpected text");
  if (!have_descriptor) Fail(ErrorCategory::kConfig, path, "missing @descriptor");
}

std::string Num(double v) { return fmt::format("{}", v); }

}  // namespace

bool XmlRunSpec::operator==(const XmlRunSpec& o) const {
  const RunConfig& a = run;
  const RunConfig& b = o.run;
  return fk == o.fk && output == o.output && a.benchmark == b.benchmark && a.mode == b.mode &&
         a.loop == b.loop && a.oltp_rate == b.oltp_rate && a.olap_rate == b.olap_rate &&
         a.hybrid_rate == b.hybrid_rate && a.terminals == b.terminals &&
         a.warmup_s == b.warmup_s && a.duration_s == b.duration_s && a.seed == b.seed &&
         a.scale == b.scale && a.weights == b.weights && a.jitter == b.jitter &&
         a.queue_capacity == b.queue_capacity && a.grace_s == b.grace_s &&
         a.target.kind == b.target.kind && a.target.descriptor == b.target.descriptor &&
         a.target.pool_size == b.target.pool_size && a.target.isolation == b.target.isolation;
}

XmlRunSpec ParseConfigText(std::string_view xml) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    Fail(ErrorCategory::kConfig, kRoot,
         fmt::format("malformed XML at line {}: {}", e.line(), e.message()));
  }

  const pt::ptree* root = nullptr;
  for (const auto& [name, child] : tree) {
    if (name == kComment) continue;
    if (name != kRoot || root) {
      Fail(ErrorCategory::kConfig, name, fmt::format("expected a single <{}> root", kRoot));
    }
    root = &child;
  }
  if (!root) Fail(ErrorCategory::kConfig, kRoot, "missing root element");

  XmlRunSpec spec;
  RunConfig& run = spec.run;
  run.benchmark.clear();
  std::string descriptor = "embedded://";
  int pool = 4;
  Isolation isolation = Isolation::kRepeatableRead;

  using Setter = std::function<void(const std::string& path, const pt::ptree& node)>;
  auto text = [](auto assign) -> Setter {
    return [assign](const std::string& path, const pt::ptree& node) {
      assign(path, Leaf(path, node));
    };
  };
  const std::map<std::string, Setter, std::less<>> setters = {
      {"benchmark", text([&](auto&, const std::string& v) { run.benchmark = v; })},
      {"fk", text([&](auto& p, const std::string& v) { spec.fk = ParseBool(p, v); })},
      {"scale", text([&](auto& p, const std::string& v) { run.scale = ParseNumber<int64_t>(p, v); })},
      {"seed", text([&](auto& p, const std::string& v) { run.seed = ParseNumber<uint64_t>(p, v); })},
      {"mode", text([&](auto& p, const std::string& v) {
         run.mode = ParseEnum<RunMode>(p, v, ParseMode, "sequential, concurrent, hybrid");
       })},
      {"loop", text([&](auto& p, const std::string& v) {
         run.loop = ParseEnum<LoopKind>(p, v, ParseLoop, "open, closed");
       })},
      {"jitter", text([&](auto& p, const std::string& v) {
         run.jitter = ParseEnum<Jitter>(p, v, ParseJitter, "fixed, poisson");
       })},
      {"isolation", text([&](auto& p, const std::string& v) {
         isolation = ParseEnum<Isolation>(p, v, ParseIsolation,
                                          "read-committed, repeatable-read, snapshot");
       })},
      {"oltp_rate", text([&](auto& p, const std::string& v) { run.oltp_rate = ParseNumber<double>(p, v); })},
      {"olap_rate", text([&](auto& p, const std::string& v) { run.olap_rate = ParseNumber<double>(p, v); })},
      {"hybrid_rate", text([&](auto& p, const std::string& v) { run.hybrid_rate = ParseNumber<double>(p, v); })},
      {"warmup_s", text([&](auto& p, const std::string& v) { run.warmup_s = ParseNumber<double>(p, v); })},
      {"duration_s", text([&](auto& p, const std::string& v) { run.duration_s = ParseNumber<double>(p, v); })},
      {"grace_s", text([&](auto& p, const std::string& v) { run.grace_s = ParseNumber<double>(p, v); })},
      {"terminals", text([&](auto& p, const std::string& v) { run.terminals = ParseNumber<int>(p, v); })},
      {"queue_capacity", text([&](auto& p, const std::string& v) {
         run.queue_capacity = ParseNumber<size_t>(p, v);
       })},
      {"output", text([&](auto&, const std::string& v) { spec.output = v; })},
      {"weights", [&](const std::string&, const pt::ptree& node) { ParseWeights(node, run.weights); }},
      {"target", [&](const std::string&, const pt::ptree& node) { ParseTarget(node, descriptor, pool); }},
  };

  std::set<std::string> seen;
  for (const auto& [name, child] : *root) {
    if (name == kComment) continue;
    if (name == kAttr) Fail(ErrorCategory::kConfig, kRoot, "unexpected attributes");
    const std::string path = fmt::format("{}/{}", kRoot, name);
    auto it = setters.find(name);
    if (it == setters.end()) Fail(ErrorCategory::kConfig, path, "unknown element");
    if (!seen.insert(name).second) Fail(ErrorCategory::kConfig, path, "repeated element");
    it->second(path, child);
  }
  if (run.benchmark.empty()) Fail(ErrorCategory::kConfig, fmt::format("{}/benchmark", kRoot), "missing");
  run.target = Within(fmt::format("{}/target/@descriptor", kRoot),
                      [&] { return MakeTarget(descriptor, pool, isolation); });
  ValidateSpec(spec);
  return spec;
}

XmlRunSpec ParseConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, fmt::format("{}: cannot read config", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return Within(path, [&] { return ParseConfigText(buf.str()); });
}

void ValidateSpec(const XmlRunSpec& spec) {
  const RunConfig& run = spec.run;
  auto catalog = Within(fmt::format("{}/benchmark", kRoot), [&] { return LoadCatalog(run.benchmark); });
  Within(kRoot, [&] { ValidateRunConfig(run); });
  if (run.target.pool_size < 1) Fail(ErrorCategory::kValidation, fmt::format("{}/target/@pool", kRoot), "must be >= 1");
  Within(fmt::format("{}/weights", kRoot), [&] {
    for (WorkloadClass cls : run.ActiveClasses()) EffectiveMix(run, *catalog, cls);
  });
}

std::string EmitConfig(const XmlRunSpec& spec) {
  const RunConfig& run = spec.run;
  pt::ptree root;
  root.put("benchmark", run.benchmark);
  root.put("fk", spec.fk ? "true" : "false");
  root.put("scale", std::to_string(run.scale));
  root.put("seed", std::to_string(run.seed));
  root.put("mode", std::string(ModeName(run.mode)));
  root.put("loop", std::string(LoopName(run.loop)));
  root.put("jitter", std::string(JitterName(run.jitter)));
  root.put("oltp_rate", Num(run.oltp_rate));
  root.put("olap_rate", Num(run.olap_rate));
  root.put("hybrid_rate", Num(run.hybrid_rate));
  root.put("terminals", std::to_string(run.terminals));
  root.put("warmup_s", Num(run.warmup_s));
  root.put("duration_s", Num(run.duration_s));
  root.put("grace_s", Num(run.grace_s));
  root.put("queue_capacity", std::to_string(run.queue_capacity));
  if (!run.weights.empty()) {
    pt::ptree& weights = root.put_child("weights", {});
    for (const auto& [name, w] : run.weights) {
      pt::ptree& node = weights.add("weight", std::to_string(w));
      node.put("<xmlattr>.name", name);
    }
  }
  pt::ptree& target = root.put_child("target", {});
  target.put("<xmlattr>.descriptor", run.target.descriptor);
  target.put("<xmlattr>.pool", std::to_string(run.target.pool_size));
  root.put("isolation", std::string(IsolationName(run.target.isolation)));
  if (!spec.output.empty()) root.put("output", spec.output);

  pt::ptree doc;
  doc.put_child(std::string(kRoot), root);
  std::ostringstream out;
  pt::write_xml(out, doc, pt::xml_writer_make_settings<std::string>(' ', 2));
  return out.str();
}

}  // namespace olxp
