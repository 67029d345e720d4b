#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "obroute/congestion.hpp"
#include "obroute/eval.hpp"
#include "obroute/graph.hpp"
#include "obroute/packet_sim.hpp"
#include "obroute/path_sampler.hpp"
#include "obroute/spectral.hpp"
#include "obroute/splittable.hpp"
#include "obroute/unsplittable.hpp"

namespace obroute {

using Json = nlohmann::ordered_json;

// Reports carry doubles rounded to 12 significant digits so that reruns are
// byte-identical across platforms.
double round12(double x);
std::string format12(double x);

// "3", "1.25" or "p/q"; exact.
Capacity parse_capacity(std::string_view text);
std::string capacity_string(const Capacity& c);

// Edge list: one `u v capacity` per line (capacity optional, default 1),
// `#` starts a comment.
Graph read_graph_text(std::istream& in);
// {"n": N, "edges": [[u, v, cap], ...]}; cap may be a number or a string.
Graph graph_from_json(const Json& j);
// Picks the format from a leading '{'.
Graph read_graph_file(const std::filesystem::path& path);
Json graph_to_json(const Graph& g);

// CSV: either a header of n column labels followed by n rows of n values, or
// the header `source,target,volume` followed by triplets. JSON: an n x n
// array, or {"entries": [[source, target, volume], ...]}.
DemandMatrix read_demands_csv(std::istream& in, int n);
DemandMatrix demands_from_json(const Json& j, int n);
DemandMatrix read_demands_file(const std::filesystem::path& path, int n);

// JSON array or whitespace separated ids.
std::vector<Vertex> read_permutation_file(const std::filesystem::path& path);

Json spectral_to_json(const SpectralProfile& p);
Json congestion_to_json(const CongestionReport& r, const Graph& g);
Json policy_to_json(const RoutingPolicy& policy);
Json space_to_json(const PathSpace& space);
Json unsplittable_to_json(const UnsplittablePolicy& policy);
Json simulation_to_json(const SimulationResult& r, const Graph& g);
Json opt_to_json(const OptResult& r);
Json audit_to_json(const RatioAudit& a);
Json performance_to_json(const PerformanceReport& r);

std::string trace_csv(const SimulationResult& r);
// edge,W_e over walk edges; loops are labelled "x-x".
std::string load_csv(const Graph& walk, const Eigen::VectorXd& load);
std::string congestion_csv(const CongestionReport& r, const Graph& g);

// Pretty JSON with a trailing newline; every float is rounded to 12
// significant digits.
std::string dump(const Json& j);

enum class OutputFormat { Json, Csv };

struct ExperimentConfig {
  std::string command;
  std::optional<std::string> graph_file;
  std::optional<std::string> generate;
  std::optional<std::string> demands_file;
  std::optional<std::string> permutation_file;
  bool random_permutation = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  OutputFormat format = OutputFormat::Json;
  unsigned threads = 0;
  std::string suite = "lemmas";
  int trials = 0;  // 0 picks each check's default
  double audit_constant = kDefaultAuditConstant;
  bool per_direction = false;
};

Json config_to_json(const ExperimentConfig& c);
// Throws InputError on unknown keys or wrong types.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig read_config_file(const std::filesystem::path& path);

}  // namespace obroute
