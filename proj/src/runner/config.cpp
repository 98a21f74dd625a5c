#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dehn/group.hpp"
#include "dehn/runner.hpp"

namespace dehn {

using nlohmann::json;

ConfigError::ConfigError(const std::string& field, int line, const std::string& message)
    : Error((line > 0 ? "config line " + std::to_string(line) + ": " : std::string("config: ")) +
            (field.empty() ? std::string() : "field '" + field + "': ") + message),
      field_(field),
      line_(line) {}

namespace {

const std::set<std::string> kKinds = {"sample", "fill",  "avg-area",   "moments",  "central-moments",
                                      "hsc",    "ratio", "shift-test", "enumerate"};

const std::set<std::string> kKeys = {"group",   "kind",     "n",          "n_list",           "t_list",
                                     "m",       "s",        "t",          "x_list",           "word",
                                     "sampler", "fallbacks", "area",      "samples",          "seed",
                                     "workers", "arithmetic", "truncation_ratio", "c_double_prime",
                                     "max_attempts", "output"};

const std::set<std::string> kOutputKeys = {"json", "csv", "certificate", "table"};

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// First line holding the quoted key; 0 if absent.
int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

struct Reader {
  const std::string& text;
  const json& obj;
  std::string prefix;

  std::string path(const std::string& key) const { return prefix.empty() ? key : prefix + "." + key; }
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(path(key), line_of_key(text, key), msg);
  }
  bool has(const std::string& key) const { return obj.contains(key); }

  std::string str(const std::string& key) const {
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }
  std::int64_t integer(const std::string& key) const {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<std::int64_t>();
  }
  double real(const std::string& key) const {
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }
  std::vector<int> ints(const std::string& key) const {
    const auto& v = obj.at(key);
    if (!v.is_array()) fail(key, "expected an array of integers");
    std::vector<int> out;
    for (const auto& e : v) {
      if (!e.is_number_integer()) fail(key, "expected an array of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& key) const {
    const auto& v = obj.at(key);
    if (!v.is_array()) fail(key, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
      if (!e.is_string()) fail(key, "expected an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }
};

void check_words(const std::string& field, const std::vector<std::string>& words, const GroupSpec& spec) {
  for (const auto& w : words) {
    try {
      for (Letter l : parse_word(w)) spec.check(l);
    } catch (const Error& e) {
      throw ConfigError(field, 0, "bad word \"" + w + "\": " + e.what());
    }
  }
}

void validate_with(const ExperimentConfig& c, const std::string& text) {
  auto fail = [&](const std::string& field, const std::string& msg) -> void {
    throw ConfigError(field, text.empty() ? 0 : line_of_key(text, field), msg);
  };
  if (c.group.empty()) fail("group", "missing");
  GroupSpec spec = GroupSpec::free_abelian(1);
  try {
    spec = GroupSpec::from_id(c.group);
  } catch (const Error&) {
    fail("group", "unknown group \"" + c.group + "\" (expected z1..z4, heis3, fnil2-2..fnil2-4, filiform4)");
  }
  if (!kKinds.count(c.kind)) fail("kind", c.kind.empty() ? "missing" : "unknown kind \"" + c.kind + "\"");

  auto need_n = [&] {
    if (!c.n) fail("n", "required for kind " + c.kind);
    if (*c.n < 0) fail("n", "must be >= 0");
  };
  auto need_list = [&](const std::string& field, const std::vector<int>& v, int min) {
    if (v.empty()) fail(field, "required for kind " + c.kind);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] < min) fail(field, "entries must be >= " + std::to_string(min));
      if (i && v[i] <= v[i - 1]) fail(field, "entries must be strictly increasing");
    }
  };

  if (c.kind == "sample") need_n();
  if (c.kind == "fill") {
    if (c.word.empty()) fail("word", "required for kind fill");
    check_words("word", {c.word}, spec);
  }
  if (c.kind == "avg-area" || c.kind == "central-moments" || c.kind == "hsc" || c.kind == "ratio")
    need_list("n_list", c.n_list, 1);
  if (c.kind == "moments") {
    need_n();
    need_list("t_list", c.t_list, 0);
    if (c.t_list.back() >= *c.n) fail("t_list", "entries must be < n");
    if (c.m < 1) fail("m", "must be >= 1");
  }
  if (c.kind == "ratio") {
    if (c.x_list.empty()) fail("x_list", "required for kind ratio");
    check_words("x_list", c.x_list, spec);
  }
  if (c.kind == "shift-test") {
    need_n();
    if (!c.s || !c.t) fail(!c.s ? "s" : "t", "required for kind shift-test");
    if (!(0 <= *c.s && *c.s < *c.t && *c.t <= *c.n)) fail("t", "need 0 <= s < t <= n");
  }
  if (c.kind == "enumerate") need_n();

  for (const auto& s : std::vector<std::string>{c.sampler}) {
    if (s != "auto" && s != "rejection" && s != "bridge" && s != "projected") fail("sampler", "unknown sampler \"" + s + "\"");
  }
  for (const auto& s : c.fallbacks)
    if (s != "auto" && s != "rejection" && s != "bridge" && s != "projected") fail("fallbacks", "unknown sampler \"" + s + "\"");
  if (!c.area.empty() && c.area != "centralized" && c.area != "dyadic" && c.area != "winding" && c.area != "exact")
    fail("area", "unknown area function \"" + c.area + "\"");
  if (c.area == "winding" && spec.kind() != GroupKind::FreeAbelian) fail("area", "winding area needs a FreeAbelian group");
  if (c.samples < 1) fail("samples", "must be >= 1");
  if (c.workers < 0) fail("workers", "must be >= 0");
  if (c.arithmetic != "float" && c.arithmetic != "exact") fail("arithmetic", "expected \"float\" or \"exact\"");
  if (c.arithmetic == "exact" && c.kind != "enumerate" && c.kind != "shift-test" && c.kind != "ratio")
    fail("arithmetic", "exact arithmetic applies to enumerate, shift-test and ratio");
  if (!(c.truncation_ratio >= 0 && c.truncation_ratio < 1)) fail("truncation_ratio", "must lie in [0, 1)");
  if (!(c.c_double_prime >= 1)) fail("c_double_prime", "must be >= 1");
  if (c.max_attempts < 1) fail("max_attempts", "must be >= 1");
}

}  // namespace

void validate(const ExperimentConfig& cfg) { validate_with(cfg, {}); }

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), "malformed JSON");
  }
  if (!doc.is_object()) throw ConfigError("", 1, "top level must be an object");
  for (const auto& [key, _] : doc.items())
    if (!kKeys.count(key)) throw ConfigError(key, line_of_key(text, key), "unknown key");

  Reader r{text, doc, ""};
  ExperimentConfig c;
  if (r.has("group")) c.group = r.str("group");
  if (r.has("kind")) c.kind = r.str("kind");
  if (r.has("n")) c.n = static_cast<int>(r.integer("n"));
  if (r.has("n_list")) c.n_list = r.ints("n_list");
  if (r.has("t_list")) c.t_list = r.ints("t_list");
  if (r.has("m")) c.m = static_cast<int>(r.integer("m"));
  if (r.has("s")) c.s = static_cast<int>(r.integer("s"));
  if (r.has("t")) c.t = static_cast<int>(r.integer("t"));
  if (r.has("x_list")) c.x_list = r.strings("x_list");
  if (r.has("word")) c.word = r.str("word");
  if (r.has("sampler")) c.sampler = r.str("sampler");
  if (r.has("fallbacks")) c.fallbacks = r.strings("fallbacks");
  if (r.has("area")) c.area = r.str("area");
  if (r.has("samples")) c.samples = r.integer("samples");
  if (r.has("seed")) {
    const std::int64_t s = r.integer("seed");
    if (s < 0) r.fail("seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (r.has("workers")) c.workers = static_cast<int>(r.integer("workers"));
  if (r.has("arithmetic")) c.arithmetic = r.str("arithmetic");
  if (r.has("truncation_ratio")) c.truncation_ratio = r.real("truncation_ratio");
  if (r.has("c_double_prime")) c.c_double_prime = r.real("c_double_prime");
  if (r.has("max_attempts")) c.max_attempts = r.integer("max_attempts");
  if (r.has("output")) {
    const auto& o = doc.at("output");
    if (!o.is_object()) r.fail("output", "expected an object");
    for (const auto& [key, _] : o.items())
      if (!kOutputKeys.count(key)) throw ConfigError("output." + key, line_of_key(text, key), "unknown key");
    Reader ro{text, o, "output"};
    if (ro.has("json")) c.output.json = ro.str("json");
    if (ro.has("csv")) c.output.csv = ro.str("csv");
    if (ro.has("certificate")) c.output.certificate = ro.str("certificate");
    if (ro.has("table")) c.output.table = ro.str("table");
  }
  validate_with(c, text);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["group"] = c.group;
  j["kind"] = c.kind;
  if (c.n) j["n"] = *c.n;
  if (!c.n_list.empty()) j["n_list"] = c.n_list;
  if (!c.t_list.empty()) j["t_list"] = c.t_list;
  j["m"] = c.m;
  if (c.s) j["s"] = *c.s;
  if (c.t) j["t"] = *c.t;
  if (!c.x_list.empty()) j["x_list"] = c.x_list;
  if (!c.word.empty()) j["word"] = c.word;
  j["sampler"] = c.sampler;
  if (!c.fallbacks.empty()) j["fallbacks"] = c.fallbacks;
  if (!c.area.empty()) j["area"] = c.area;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["arithmetic"] = c.arithmetic;
  j["truncation_ratio"] = c.truncation_ratio;
  j["c_double_prime"] = c.c_double_prime;
  j["max_attempts"] = c.max_attempts;
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // workers and output paths do not affect results and are left out
  const std::string canon = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dehn
