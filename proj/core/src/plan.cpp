#include "wisig/plan.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "wisig/error.hpp"

namespace wisig {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

[[noreturn]] void bad(const Entry& e, const std::string& key, const std::string& why) {
  throw ParseError("line " + std::to_string(e.line) + ": " + key + ": " + why,
                   ParseError::Unit::line, e.line);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(const Entry& e, const std::string& key) {
  const std::string_view v = e.value;
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    bad(e, key, "cannot parse '" + e.value + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) bad(e, key, "value must be finite");
  }
  return out;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = std::min(text.find(',', start), text.size());
    const auto item = trim(text.substr(start, pos - start));
    if (!item.empty()) out.push_back(item);
    start = pos + 1;
  }
  return out;
}

WriterRange parse_range(const Entry& e, const std::string& key) {
  const auto dash = e.value.find('-');
  if (dash == std::string::npos) bad(e, key, "expected FIRST-LAST");
  const Entry lo{std::string(trim(std::string_view(e.value).substr(0, dash))), e.line};
  const Entry hi{std::string(trim(std::string_view(e.value).substr(dash + 1))), e.line};
  return {parse_number<long long>(lo, key), parse_number<long long>(hi, key)};
}

bool parse_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "1" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "off") return false;
  bad(e, key, "expected true or false");
}

}  // namespace

SweepPlan parse_plan(std::string_view text, const std::filesystem::path& base_dir) {
  std::map<std::string, Entry> entries;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected key = value",
                       ParseError::Unit::line, line_no);
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty key", ParseError::Unit::line,
                       line_no);
    }
    if (!entries.emplace(key, Entry{value, line_no}).second) {
      throw ParseError("line " + std::to_string(line_no) + ": repeated key '" + key + "'",
                       ParseError::Unit::line, line_no);
    }
  }

  SweepPlan plan;
  auto take = [&](const std::string& key) -> std::optional<Entry> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    Entry e = std::move(it->second);
    entries.erase(it);
    return e;
  };

  // The dataset preset goes first; every other key overrides it.
  DatasetKind kind = DatasetKind::synthetic;
  if (auto e = take("dataset")) {
    const auto k = parse_dataset_kind(e->value);
    if (!k) bad(*e, "dataset", "unknown dataset '" + e->value + "'");
    kind = *k;
  }
  if (kind == DatasetKind::synthetic) {
    std::size_t nd = 20;
    std::size_t ne = 10;
    if (auto e = take("synthetic_development_writers")) nd = parse_number<std::size_t>(*e, "synthetic_development_writers");
    if (auto e = take("synthetic_exploitation_writers")) ne = parse_number<std::size_t>(*e, "synthetic_exploitation_writers");
    plan.config = ProtocolConfig::synthetic(nd, ne);
    plan.synthetic.n_writers = nd + ne;
  } else {
    plan.config = ProtocolConfig::preset(kind);
    plan.synthetic = SyntheticSpec::shaped_like(kind);
  }

  auto& c = plan.config;
  using Setter = std::function<void(const Entry&, const std::string&)>;
  auto size_field = [](std::size_t& field) -> Setter {
    return [&field](const Entry& e, const std::string& k) { field = parse_number<std::size_t>(e, k); };
  };
  auto double_field = [](double& field) -> Setter {
    return [&field](const Entry& e, const std::string& k) { field = parse_number<double>(e, k); };
  };
  auto range_field = [](WriterRange& field) -> Setter {
    return [&field](const Entry& e, const std::string& k) { field = parse_range(e, k); };
  };

  const std::map<std::string, Setter> setters = {
      {"features",
       [&](const Entry& e, const std::string&) {
         std::filesystem::path p(e.value);
         plan.features = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
       }},
      {"seed",
       [&](const Entry& e, const std::string& k) {
         c.seed = parse_number<std::uint64_t>(e, k);
       }},
      {"replications", size_field(c.replications)},
      {"gamma", double_field(c.svm.gamma)},
      {"c", double_field(c.svm.c)},
      {"tolerance", double_field(c.svm.tolerance)},
      {"max_iterations",
       [&](const Entry& e, const std::string& k) {
         c.svm.max_iterations = parse_number<std::uint64_t>(e, k);
       }},
      {"normalize_features",
       [&](const Entry& e, const std::string& k) { c.normalize_features = parse_bool(e, k); }},
      {"fusion",
       [&](const Entry& e, const std::string& k) {
         c.fusion_rules.clear();
         for (auto item : split_list(e.value)) {
           const auto rule = parse_fusion_rule(item);
           if (!rule) bad(e, k, "unknown fusion rule '" + std::string(item) + "'");
           c.fusion_rules.push_back(*rule);
         }
       }},
      {"n_reference",
       [&](const Entry& e, const std::string& k) {
         c.n_reference_sweep.clear();
         for (auto item : split_list(e.value)) {
           c.n_reference_sweep.push_back(parse_number<std::size_t>(Entry{std::string(item), e.line}, k));
         }
       }},
      {"development", range_field(c.development)},
      {"exploitation", range_field(c.exploitation)},
      {"m_genuine_for_within", size_field(c.m_genuine_for_within)},
      {"refs_for_between", size_field(c.refs_for_between)},
      {"impostors_per_writer", size_field(c.impostors_per_writer)},
      {"reference_size", size_field(c.reference_size)},
      {"questioned_genuine", size_field(c.questioned_genuine)},
      {"questioned_simple", size_field(c.questioned_simple)},
      {"questioned_skilled", size_field(c.questioned_skilled)},
      {"questioned_random", size_field(c.questioned_random)},
      {"synthetic_dim", size_field(plan.synthetic.dim)},
      {"synthetic_separation", double_field(plan.synthetic.separation)},
      {"synthetic_noise", double_field(plan.synthetic.noise)},
      {"synthetic_skilled_offset", double_field(plan.synthetic.skilled_offset)},
      {"synthetic_seed",
       [&](const Entry& e, const std::string& k) {
         plan.synthetic.seed = parse_number<std::uint64_t>(e, k);
       }},
  };

  // Apply in line order so error messages follow the file.
  std::vector<std::pair<std::string, Entry>> ordered(entries.begin(), entries.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.second.line < b.second.line; });
  for (const auto& [key, entry] : ordered) {
    auto it = setters.find(key);
    if (it == setters.end()) bad(entry, key, "unknown key");
    it->second(entry, key);
  }

  c.validate();
  return plan;
}

SweepPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open plan '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_plan(buf.str(), path.parent_path());
}

std::string format_size_list(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::string describe_config(const ProtocolConfig& c) {
  std::ostringstream out;
  auto range = [](const WriterRange& r) {
    return std::to_string(r.first) + "-" + std::to_string(r.last);
  };
  std::string rules;
  for (std::size_t i = 0; i < c.fusion_rules.size(); ++i) {
    if (i) rules += ',';
    rules += to_string(c.fusion_rules[i]);
  }
  char gamma[32];
  char cpen[32];
  char tol[32];
  std::snprintf(gamma, sizeof gamma, "%.17g", c.svm.gamma);
  std::snprintf(cpen, sizeof cpen, "%.17g", c.svm.c);
  std::snprintf(tol, sizeof tol, "%.17g", c.svm.tolerance);
  out << "dataset = " << to_string(c.dataset_kind) << '\n'
      << "development = " << range(c.development) << '\n'
      << "exploitation = " << range(c.exploitation) << '\n'
      << "m_genuine_for_within = " << c.m_genuine_for_within << '\n'
      << "refs_for_between = " << c.refs_for_between << '\n'
      << "impostors_per_writer = " << c.impostors_per_writer << '\n'
      << "reference_size = " << c.reference_size << '\n'
      << "questioned_genuine = " << c.questioned_genuine << '\n'
      << "questioned_simple = " << c.questioned_simple << '\n'
      << "questioned_skilled = " << c.questioned_skilled << '\n'
      << "questioned_random = " << c.questioned_random << '\n'
      << "n_reference = " << format_size_list(c.n_reference_sweep) << '\n'
      << "fusion = " << rules << '\n'
      << "replications = " << c.replications << '\n'
      << "seed = " << c.seed << '\n'
      << "normalize_features = " << (c.normalize_features ? "true" : "false") << '\n'
      << "gamma = " << gamma << '\n'
      << "c = " << cpen << '\n'
      << "tolerance = " << tol << '\n'
      << "max_iterations = " << c.svm.max_iterations << '\n';
  return out.str();
}

}  // namespace wisig
