#include "obroute/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace obroute {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::int64_t parse_int(std::string_view s, std::string_view what) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InputError("invalid number: '" + std::string(s) + "'");
  }
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError(origin + ": " + e.what());
  }
}

bool looks_like_json(const std::string& text) {
  const auto t = trim(text);
  return !t.empty() && (t.front() == '{' || t.front() == '[');
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string link_label(const Link& l) { return std::to_string(l.u) + "-" + std::to_string(l.v); }

Json path_json(std::span<const Vertex> p) { return Json(std::vector<Vertex>(p.begin(), p.end())); }

}  // namespace

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string format12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", round12(x));
  return buf;
}

Capacity parse_capacity(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw InputError("empty capacity");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const std::int64_t p = parse_int(trim(text.substr(0, slash)), "capacity numerator");
    const std::int64_t q = parse_int(trim(text.substr(slash + 1)), "capacity denominator");
    if (q == 0) throw InputError("zero capacity denominator");
    return Capacity(p, q);
  }
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw InputError("invalid capacity");
  if (frac.size() > 15) throw InputError("capacity has too many decimal digits");
  std::int64_t denom = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) denom *= 10;
  const std::int64_t w = whole.empty() ? 0 : parse_int(whole, "capacity");
  const std::int64_t f = frac.empty() ? 0 : parse_int(frac, "capacity");
  if (w < 0 || f < 0) throw InputError("invalid capacity");
  Capacity c = Capacity(w) + Capacity(f, denom);
  return negative ? -c : c;
}

std::string capacity_string(const Capacity& c) {
  if (c.denominator() == 1) return std::to_string(c.numerator());
  return std::to_string(c.numerator()) + "/" + std::to_string(c.denominator());
}

Graph read_graph_text(std::istream& in) {
  std::vector<EdgeSpec> specs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    std::istringstream fields{std::string(trim(body))};
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() < 2 || tok.size() > 3) {
      throw InputError("line " + std::to_string(line_no) + ": expected 'u v [capacity]'");
    }
    EdgeSpec e;
    e.u = static_cast<Vertex>(parse_int(tok[0], "vertex id"));
    e.v = static_cast<Vertex>(parse_int(tok[1], "vertex id"));
    if (tok.size() == 3) e.capacity = parse_capacity(tok[2]);
    specs.push_back(e);
  }
  return build_graph(specs);
}

Graph graph_from_json(const Json& j) {
  try {
    const int n = j.at("n").get<int>();
    std::vector<EdgeSpec> specs;
    for (const Json& e : j.at("edges")) {
      if (!e.is_array() || e.size() < 2 || e.size() > 3) {
        throw InputError("edge entries must be [u, v] or [u, v, cap]");
      }
      EdgeSpec s;
      s.u = e[0].get<int>();
      s.v = e[1].get<int>();
      if (e.size() == 3) {
        if (e[2].is_string()) {
          s.capacity = parse_capacity(e[2].get<std::string>());
        } else if (e[2].is_number_integer()) {
          s.capacity = Capacity(e[2].get<std::int64_t>());
        } else {
          s.capacity = parse_capacity(format12(e[2].get<double>()));
        }
      }
      specs.push_back(s);
    }
    return build_graph(specs, n);
  } catch (const Json::exception& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
}

Graph read_graph_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (looks_like_json(text)) return graph_from_json(parse_json(text, path.string()));
  std::istringstream in(text);
  return read_graph_text(in);
}

Json graph_to_json(const Graph& g) {
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back(Json::array({e.u, e.v, capacity_string(e.capacity)}));
  return Json{{"n", g.num_vertices()}, {"edges", edges}};
}

DemandMatrix read_demands_csv(std::istream& in, int n) {
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw InputError("demand CSV is empty");
  DemandMatrix d = DemandMatrix::Zero(n, n);
  const auto header = split_csv(lines[0]);
  if (header.size() == 3 && header[0] == "source" && header[1] == "target" && header[2] == "volume") {
    for (std::size_t r = 1; r < lines.size(); ++r) {
      const auto cells = split_csv(lines[r]);
      if (cells.size() != 3) throw InputError("demand CSV row " + std::to_string(r) + ": expected 3 fields");
      const auto x = parse_int(cells[0], "source");
      const auto y = parse_int(cells[1], "target");
      if (x < 0 || y < 0 || x >= n || y >= n) throw InputError("demand CSV: vertex out of range");
      d(x, y) += parse_double(cells[2]);
    }
  } else {
    if (static_cast<int>(header.size()) != n || static_cast<int>(lines.size()) != n + 1) {
      throw InputError("demand CSV must hold a header and " + std::to_string(n) + " rows of " +
                       std::to_string(n) + " values");
    }
    for (int r = 0; r < n; ++r) {
      const auto cells = split_csv(lines[r + 1]);
      if (static_cast<int>(cells.size()) != n) {
        throw InputError("demand CSV row " + std::to_string(r + 1) + " has the wrong width");
      }
      for (int c = 0; c < n; ++c) d(r, c) = parse_double(cells[c]);
    }
  }
  validate_demand(d, n);
  return d;
}

DemandMatrix demands_from_json(const Json& j, int n) {
  try {
    DemandMatrix d = DemandMatrix::Zero(n, n);
    if (j.is_array()) {
      if (static_cast<int>(j.size()) != n) throw InputError("demand matrix has the wrong size");
      for (int r = 0; r < n; ++r) {
        if (static_cast<int>(j[r].size()) != n) throw InputError("demand matrix has the wrong size");
        for (int c = 0; c < n; ++c) d(r, c) = j[r][c].get<double>();
      }
    } else {
      for (const Json& e : j.at("entries")) {
        const int x = e.at(0).get<int>();
        const int y = e.at(1).get<int>();
        if (x < 0 || y < 0 || x >= n || y >= n) throw InputError("demand entry out of range");
        d(x, y) += e.at(2).get<double>();
      }
    }
    validate_demand(d, n);
    return d;
  } catch (const Json::exception& e) {
    throw InputError(std::string("demand JSON: ") + e.what());
  }
}

DemandMatrix read_demands_file(const std::filesystem::path& path, int n) {
  const std::string text = read_file(path);
  if (looks_like_json(text)) return demands_from_json(parse_json(text, path.string()), n);
  std::istringstream in(text);
  return read_demands_csv(in, n);
}

std::vector<Vertex> read_permutation_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<Vertex> sigma;
  if (looks_like_json(text)) {
    try {
      sigma = parse_json(text, path.string()).get<std::vector<Vertex>>();
    } catch (const Json::exception& e) {
      throw InputError(std::string("permutation JSON: ") + e.what());
    }
  } else {
    std::istringstream in(text);
    for (std::string t; in >> t;) sigma.push_back(static_cast<Vertex>(parse_int(t, "vertex id")));
  }
  return sigma;
}

Json spectral_to_json(const SpectralProfile& p) {
  return Json{{"lambda2", round12(p.lambda2)},   {"lambdaN", round12(p.lambdaN)},
              {"lambda", round12(p.lambda)},     {"lambda_bar", round12(p.lambda_bar)},
              {"lazified", p.lazified},          {"pi_min", round12(p.pi_min)},
              {"pi_max", round12(p.pi_max)},     {"k", p.k},
              {"log_base", "natural"}};
}

Json congestion_to_json(const CongestionReport& r, const Graph& g) {
  Json per = Json::object();
  for (int l = 0; l < g.num_links(); ++l) per[link_label(g.links()[l])] = round12(r.per_link[l]);
  Json j{{"max", round12(r.max)},
         {"argmax", r.argmax >= 0 ? Json(link_label(g.links()[r.argmax])) : Json(nullptr)},
         {"per_link", per}};
  if (r.opt) j["opt"] = round12(*r.opt);
  if (r.ratio) j["ratio"] = round12(*r.ratio);
  return j;
}

Json policy_to_json(const RoutingPolicy& policy) {
  const Graph& g = policy.graph;
  const int n = g.num_vertices();
  Json j = Json::object();
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < n; ++t) {
      if (i == t) continue;
      const CommodityFlow& f = policy.flow(i, t);
      Json entries = Json::array();
      for (int l = 0; l < g.num_links(); ++l) {
        const double x = round12(f.link_flow[l]);
        if (x != 0.0) entries.push_back(Json::array({g.links()[l].u, g.links()[l].v, x}));
      }
      j[std::to_string(i) + "->" + std::to_string(t)] = entries;
    }
  }
  return j;
}

Json space_to_json(const PathSpace& space) {
  Json buckets = Json::object();
  const int n = space.num_vertices();
  for (int x = 0; x < n; ++x) {
    for (int y = x; y < n; ++y) {
      Json list = Json::array();
      for (std::uint32_t id : space.bucket(x, y)) list.push_back(path_json(space.path(id)));
      buckets[std::to_string(x) + "-" + std::to_string(y)] = list;
    }
  }
  return Json{{"m", space.m()}, {"k", space.k()}, {"seed", space.seed()}, {"buckets", buckets}};
}

Json unsplittable_to_json(const UnsplittablePolicy& policy) {
  const int n = policy.num_vertices();
  Json j = Json::object();
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x != y) j[std::to_string(x) + "->" + std::to_string(y)] = policy.path(x, y).gamma;
    }
  }
  return j;
}

Json simulation_to_json(const SimulationResult& r, const Graph& g) {
  Json peak = Json::object();
  for (int l = 0; l < g.num_links(); ++l) {
    if (r.peak_queue[l] > 0) peak[link_label(g.links()[l])] = r.peak_queue[l];
  }
  return Json{{"delay", r.delay},
              {"arrivals", r.arrivals},
              {"peak_queue", peak},
              {"max_crossings", r.max_crossings},
              {"contention_events", r.contention_events},
              {"rounds", r.rounds}};
}

Json opt_to_json(const OptResult& r) {
  return Json{{"value", round12(r.value)}, {"method", to_string(r.method)}, {"tol", r.tolerance}};
}

Json audit_to_json(const RatioAudit& a) {
  return Json{{"cong", round12(a.cong)},
              {"opt", round12(a.opt)},
              {"ratio", round12(a.ratio)},
              {"bound", round12(a.bound)},
              {"flagged", a.flagged},
              {"constant", a.constant},
              {"constant_note", "empirical audit constant, not taken from the analysis"},
              {"M", round12(a.profile.m)},
              {"s", round12(a.profile.s)},
              {"degree_lower_bound", round12(a.profile.lower_bound())},
              {"decomposition_holds", a.decomposition_holds},
              {"decomposition_min_slack", round12(std::min(a.full.min_slack, a.first_leg.min_slack))},
              {"max_rank_load", round12(a.max_rank_load)}};
}

Json performance_to_json(const PerformanceReport& r) {
  Json entries = Json::array();
  for (const RatioEntry& e : r.entries) {
    entries.push_back(Json{{"label", e.label},
                           {"cong", round12(e.cong)},
                           {"opt", round12(e.opt)},
                           {"method", to_string(e.method)},
                           {"ratio", round12(e.ratio)}});
  }
  return Json{{"ratio", round12(r.ratio)},
              {"witness", r.witness >= 0 ? Json(r.entries[r.witness].label) : Json(nullptr)},
              {"lower_estimate", r.lower_estimate},
              {"entries", entries}};
}

std::string trace_csv(const SimulationResult& r) {
  std::string out = "round,packet,edge\n";
  for (const TraceEvent& e : r.trace) {
    out += std::to_string(e.round) + "," + std::to_string(e.packet) + "," + std::to_string(e.link) + "\n";
  }
  return out;
}

std::string load_csv(const Graph& walk, const Eigen::VectorXd& load) {
  std::string out = "edge,W_e\n";
  for (int l = 0; l < walk.num_links(); ++l) out += link_label(walk.links()[l]) + "," + format12(load[l]) + "\n";
  for (int x = 0; x < walk.num_vertices(); ++x) {
    const auto idx = walk.num_links() + x;
    if (idx < load.size()) out += std::to_string(x) + "-" + std::to_string(x) + "," + format12(load[idx]) + "\n";
  }
  return out;
}

std::string congestion_csv(const CongestionReport& r, const Graph& g) {
  std::string out = "edge,congestion\n";
  for (int l = 0; l < g.num_links(); ++l) out += link_label(g.links()[l]) + "," + format12(r.per_link[l]) + "\n";
  return out;
}

namespace {

void round_floats(Json& j) {
  if (j.is_number_float()) {
    j = round12(j.get<double>());
  } else if (j.is_structured()) {
    for (Json& child : j) round_floats(child);
  }
}

}  // namespace

std::string dump(const Json& j) {
  Json copy = j;
  round_floats(copy);
  return copy.dump(2) + "\n";
}

Json config_to_json(const ExperimentConfig& c) {
  Json j{{"command", c.command}};
  if (c.graph_file) j["graph"] = *c.graph_file;
  if (c.generate) j["generate"] = *c.generate;
  if (c.demands_file) j["demands"] = *c.demands_file;
  if (c.permutation_file) j["permutation"] = *c.permutation_file;
  j["random"] = c.random_permutation;
  if (c.seed) j["seed"] = *c.seed;
  if (c.out) j["out"] = *c.out;
  j["format"] = c.format == OutputFormat::Json ? "json" : "csv";
  j["threads"] = c.threads;
  j["suite"] = c.suite;
  j["trials"] = c.trials;
  j["audit_constant"] = c.audit_constant;
  j["per_direction"] = c.per_direction;
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "command") {
        c.command = value.get<std::string>();
      } else if (key == "graph") {
        c.graph_file = value.get<std::string>();
      } else if (key == "generate") {
        c.generate = value.get<std::string>();
      } else if (key == "demands") {
        c.demands_file = value.get<std::string>();
      } else if (key == "permutation") {
        c.permutation_file = value.get<std::string>();
      } else if (key == "random") {
        c.random_permutation = value.get<bool>();
      } else if (key == "seed") {
        if (!value.is_number_unsigned()) throw InputError("seed must be an unsigned integer");
        c.seed = value.get<std::uint64_t>();
      } else if (key == "out") {
        c.out = value.get<std::string>();
      } else if (key == "format") {
        const auto f = value.get<std::string>();
        if (f != "json" && f != "csv") throw InputError("format must be json or csv");
        c.format = f == "json" ? OutputFormat::Json : OutputFormat::Csv;
      } else if (key == "threads") {
        c.threads = value.get<unsigned>();
      } else if (key == "suite") {
        c.suite = value.get<std::string>();
      } else if (key == "trials") {
        c.trials = value.get<int>();
      } else if (key == "audit_constant") {
        c.audit_constant = value.get<double>();
      } else if (key == "per_direction") {
        c.per_direction = value.get<bool>();
      } else {
        throw InputError("unknown config key '" + key + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig read_config_file(const std::filesystem::path& path) {
  return config_from_json(parse_json(read_file(path), path.string()));
}

}  // namespace obroute
