#include "grf/config_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace grf {

using nlohmann::json;

namespace {

constexpr double kDefaultDisplacementCap = 0.02;

/// Walks one JSON object, remembering which keys were consumed so the rest
/// can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path, std::vector<std::string>& problems)
      : node_(node), path_(std::move(path)), problems_(problems) {
    if (!node_.is_object()) problems_.push_back(where("") + ": expected an object");
  }

  bool has(const std::string& key) const { return node_.is_object() && node_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return nullptr;
    return &node_.at(key);
  }

  template <class T>
  void read(const std::string& key, T& out) {
    const json* v = get(key);
    if (v == nullptr) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw std::invalid_argument("expected true/false");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!v->is_number()) throw std::invalid_argument("expected a number");
        if constexpr (std::is_integral_v<T>) {
          if (!v->is_number_integer() && !v->is_number_unsigned()) {
            throw std::invalid_argument("expected an integer");
          }
          if constexpr (std::is_unsigned_v<T>) {
            if (v->is_number_integer() && v->get<long long>() < 0) {
              throw std::invalid_argument("expected a non-negative integer");
            }
          }
        }
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw std::invalid_argument("expected a string");
      }
      out = v->get<T>();
    } catch (const std::exception& e) {
      problems_.push_back(where(key) + ": " + e.what());
    }
  }

  template <class Enum>
  void read_enum(const std::string& key, Enum& out,
                 std::initializer_list<std::pair<const char*, Enum>> names) {
    std::string text;
    if (!has(key)) {
      seen_.insert(key);
      return;
    }
    read(key, text);
    for (const auto& [name, value] : names) {
      if (text == name) {
        out = value;
        return;
      }
    }
    std::string allowed;
    for (const auto& [name, value] : names) allowed += std::string(allowed.empty() ? "" : "|") + name;
    problems_.push_back(where(key) + ": unknown value '" + text + "' (expected " + allowed + ")");
  }

  void finish() const {
    if (!node_.is_object()) return;
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) problems_.push_back(where(key) + ": unknown key");
    }
  }

  std::string where(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

 private:
  const json& node_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string> seen_;
};

bool read_vec2(const json& node, Vec2& out) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number()) {
    return false;
  }
  out = Vec2(node[0].get<double>(), node[1].get<double>());
  return true;
}

json vec2_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

}  // namespace

json read_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"scenario: cannot open '" + path.string() + "'"});
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError({"scenario: '" + path.string() + "' is not valid JSON: " + e.what()});
  }
}

void apply_override(json& tree, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError({"override '" + std::string(assignment) + "': expected key=value"});
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  if (key == "group_count" || key == "group_size") {
    if (!value.is_number_integer() || value.get<long long>() < 0) {
      throw ConfigError({"override '" + key + "': expected a non-negative integer"});
    }
    const json groups = tree.value("groups", json::array());
    const int count = key == "group_count" ? value.get<int>() : static_cast<int>(groups.size());
    const int size = key == "group_size"
                         ? value.get<int>()
                         : (groups.empty() ? 0 : groups.front().get<int>());
    tree["groups"] = json(std::vector<int>(static_cast<std::size_t>(count), size));
    return;
  }

  std::stringstream parts(key);
  std::vector<std::string> path;
  for (std::string part; std::getline(parts, part, '.');) path.push_back(part);

  // Objects are created on demand; arrays are indexed by existing position.
  auto child = [&](json& node, const std::string& part, bool last) -> json& {
    if (node.is_array()) {
      std::size_t index = 0;
      const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), index);
      if (ec != std::errc() || end != part.data() + part.size() || index >= node.size()) {
        throw ConfigError({"override '" + key + "': no element '" + part + "'"});
      }
      return node[index];
    }
    if (!node.is_object()) {
      throw ConfigError({"override '" + key + "': cannot descend into '" + part + "'"});
    }
    json& next = node[part];
    if (!last && next.is_null()) next = json::object();
    return next;
  };
  json* node = &tree;
  for (std::size_t k = 0; k < path.size(); ++k) node = &child(*node, path[k], k + 1 == path.size());
  *node = value;
}

SwarmConfig parse_config(const json& tree) {
  std::vector<std::string> problems;
  SwarmConfig c;
  ObjectReader top(tree, "", problems);

  top.read("name", c.name);

  std::vector<int> groups;
  if (const json* g = top.get("groups")) {
    bool ok = g->is_array();
    if (ok) {
      for (const auto& v : *g) {
        if (!v.is_number_integer() || v.get<long long>() < 0) ok = false;
      }
    }
    if (ok) {
      groups = g->get<std::vector<int>>();
    } else {
      problems.emplace_back("groups: expected an array of non-negative integers");
    }
  } else {
    problems.emplace_back("groups: required");
  }

  top.read("v_max", c.v_max);
  double cap = kDefaultDisplacementCap;
  const bool has_cap = top.has("displacement_cap");
  const bool has_dt = top.has("tick_duration");
  top.read("displacement_cap", cap);
  top.read("tick_duration", c.tick_duration);
  if (!has_dt) c.tick_duration = c.v_max > 0.0 ? cap / c.v_max : 0.0;
  if (has_cap && has_dt && std::abs(c.v_max * c.tick_duration - cap) > 1e-12 * std::max(1.0, cap)) {
    problems.emplace_back("tick_duration: v_max * tick_duration must equal displacement_cap");
  }
  top.read("sensing_radius", c.sensing_radius);
  top.read("seed", c.rng_seed);
  top.read("max_ticks", c.max_ticks);
  top.read("cluster_threshold", c.cluster_threshold);
  top.read("robot_radius", c.robot_radius);
  top.read("stride", c.stride);
  top.read_enum("controller", c.controller, {{"grf", Controller::grf}, {"gd", Controller::gd}});

  // arena
  double width = 4.0, height = 4.0, spacing = 0.05;
  bool boundary = true;
  std::vector<Segment> segments;
  if (const json* a = top.get("arena")) {
    ObjectReader r(*a, "arena", problems);
    r.read("width", width);
    r.read("height", height);
    r.read("point_spacing", spacing);
    r.read("boundary_walls", boundary);
    if (const json* s = r.get("segments")) {
      if (!s->is_array()) problems.emplace_back("arena.segments: expected an array");
      for (std::size_t k = 0; s->is_array() && k < s->size(); ++k) {
        const json& seg = (*s)[k];
        bool ok = seg.is_array() && seg.size() == 4;
        for (std::size_t m = 0; ok && m < 4; ++m) ok = seg[m].is_number();
        if (!ok) {
          problems.push_back("arena.segments[" + std::to_string(k) + "]: expected [x0, y0, x1, y1]");
          continue;
        }
        segments.push_back({Vec2(seg[0].get<double>(), seg[1].get<double>()),
                            Vec2(seg[2].get<double>(), seg[3].get<double>())});
      }
    }
    r.finish();
  }

  // attractors
  if (const json* list = top.get("attractors")) {
    if (!list->is_array()) problems.emplace_back("attractors: expected an array");
    for (std::size_t k = 0; list->is_array() && k < list->size(); ++k) {
      const std::string path = "attractors[" + std::to_string(k) + "]";
      ObjectReader r((*list)[k], path, problems);
      VirtualAttractor at;
      if (const json* p = r.get("position")) {
        if (!read_vec2(*p, at.position)) problems.push_back(path + ".position: expected [x, y]");
      } else {
        problems.push_back(path + ".position: required");
      }
      if (!r.has("target_type")) problems.push_back(path + ".target_type: required");
      r.read("target_type", at.target_type);
      r.read("charge", at.charge);
      r.finish();
      c.attractors.push_back(at);
    }
  }

  // potential
  if (const json* p = top.get("potential")) {
    ObjectReader r(*p, "potential", problems);
    auto& pp = c.potential;
    r.read("epsilon", pp.epsilon);
    r.read("r0", pp.r0);
    r.read("alpha", pp.alpha);
    if (const json* ch = r.get("charges")) {
      if (ch->is_number()) {
        pp.charges = {ch->get<double>()};
      } else if (ch->is_array() && !ch->empty() &&
                 std::all_of(ch->begin(), ch->end(), [](const json& v) { return v.is_number(); })) {
        pp.charges = ch->get<std::vector<double>>();
      } else {
        problems.emplace_back("potential.charges: expected a number or an array of numbers");
      }
    }
    r.read("coulomb_coupling", pp.coulomb_coupling);
    r.read("mass", pp.mass);
    r.read_enum("sign_mode", pp.sign_mode,
                {{"segregating", SignMode::segregating}, {"literal", SignMode::literal}});
    r.read_enum("kinetic_mode", pp.kinetic_mode,
                {{"relative", KineticMode::relative}, {"literal", KineticMode::literal}});
    r.read("obstacle_charge", pp.obstacle_charge);
    r.read("d_min", pp.d_min);
    r.read("speed_incentive", pp.speed_incentive);
    r.finish();
  }

  // sampler
  c.sampler.proposal_covariance = Mat2::Identity() * (0.05 * c.v_max) * (0.05 * c.v_max);
  bool burn_in_given = false;
  if (const json* s = top.get("sampler")) {
    ObjectReader r(*s, "sampler", problems);
    auto& sp = c.sampler;
    r.read("iterations", sp.iterations);
    burn_in_given = r.has("burn_in");
    r.read("burn_in", sp.burn_in);
    const bool has_sigma = r.has("proposal_sigma");
    const bool has_cov = r.has("proposal_covariance");
    if (has_sigma && has_cov) {
      problems.emplace_back("sampler: give proposal_sigma or proposal_covariance, not both");
    }
    double sigma = 0.0;
    if (has_sigma) {
      r.read("proposal_sigma", sigma);
      sp.proposal_covariance = Mat2::Identity() * sigma * sigma;
    } else {
      r.get("proposal_sigma");
    }
    if (const json* cov = r.get("proposal_covariance")) {
      Vec2 row0, row1;
      if (cov->is_array() && cov->size() == 2 && read_vec2((*cov)[0], row0) &&
          read_vec2((*cov)[1], row1)) {
        sp.proposal_covariance << row0.x(), row0.y(), row1.x(), row1.y();
      } else {
        problems.emplace_back("sampler.proposal_covariance: expected [[a, b], [c, d]]");
      }
    }
    r.read("temperature", sp.temperature);
    r.read_enum("center_mode", sp.center_mode,
                {{"previous_velocity", CenterMode::previous_velocity},
                 {"chain_state", CenterMode::chain_state}});
    r.finish();
  }
  if (!burn_in_given) c.sampler.burn_in = c.sampler.iterations / 2;

  c.gd.fd_step = 1e-3 * c.v_max;
  if (const json* g = top.get("gd")) {
    ObjectReader r(*g, "gd", problems);
    r.read("step_size", c.gd.step_size);
    r.read("fd_step", c.gd.fd_step);
    r.finish();
  }

  if (const json* n = top.get("noise")) {
    ObjectReader r(*n, "noise", problems);
    r.read("fraction", c.noise_fraction);
    r.read_enum("truncation", c.noise_truncation,
                {{"bounded", Truncation::bounded}, {"unbounded", Truncation::unbounded}});
    r.finish();
  }
  top.finish();

  if (problems.empty()) {
    try {
      c.partition = GroupPartition(groups);
      c.arena = Arena::box(width, height, spacing, boundary, segments);
    } catch (const ConfigError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
  }
  if (problems.empty()) {
    try {
      c.validate();
    } catch (const ConfigError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

json to_json(const SwarmConfig& c) {
  json segments = json::array();
  const bool boundary = c.arena.boundary_walls;
  for (std::size_t k = boundary ? 4 : 0; k < c.arena.walls.size(); ++k) {
    const auto& s = c.arena.walls[k];
    segments.push_back({s.a.x(), s.a.y(), s.b.x(), s.b.y()});
  }
  json attractors = json::array();
  for (const auto& a : c.attractors) {
    attractors.push_back(
        {{"position", vec2_json(a.position)}, {"target_type", a.target_type}, {"charge", a.charge}});
  }
  const auto& p = c.potential;
  const auto& cov = c.sampler.proposal_covariance;
  return json{
      {"name", c.name},
      {"groups", c.partition.sizes()},
      {"arena",
       {{"width", c.arena.width},
        {"height", c.arena.height},
        {"point_spacing", c.arena.point_spacing},
        {"boundary_walls", boundary},
        {"segments", segments}}},
      {"attractors", attractors},
      {"potential",
       {{"epsilon", p.epsilon},
        {"r0", p.r0},
        {"alpha", p.alpha},
        {"charges", p.charges},
        {"coulomb_coupling", p.coulomb_coupling},
        {"mass", p.mass},
        {"sign_mode", to_string(p.sign_mode)},
        {"kinetic_mode", to_string(p.kinetic_mode)},
        {"obstacle_charge", p.obstacle_charge},
        {"d_min", p.d_min},
        {"speed_incentive", p.speed_incentive}}},
      {"sampler",
       {{"iterations", c.sampler.iterations},
        {"burn_in", c.sampler.burn_in},
        {"proposal_covariance", json::array({vec2_json(cov.row(0).transpose()),
                                             vec2_json(cov.row(1).transpose())})},
        {"temperature", c.sampler.temperature},
        {"center_mode", to_string(c.sampler.center_mode)}}},
      {"gd", {{"step_size", c.gd.step_size}, {"fd_step", c.gd.fd_step}}},
      {"controller", to_string(c.controller)},
      {"v_max", c.v_max},
      {"tick_duration", c.tick_duration},
      {"sensing_radius", c.sensing_radius},
      {"noise", {{"fraction", c.noise_fraction}, {"truncation", to_string(c.noise_truncation)}}},
      {"seed", c.rng_seed},
      {"max_ticks", c.max_ticks},
      {"cluster_threshold", c.cluster_threshold},
      {"robot_radius", c.robot_radius},
      {"stride", c.stride},
  };
}

std::string config_hash(const SwarmConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SwarmConfig load_scenario(const std::filesystem::path& path, std::span<const std::string> overrides) {
  json tree = read_scenario_file(path);
  for (const auto& o : overrides) apply_override(tree, o);
  return parse_config(tree);
}

}  // namespace grf
