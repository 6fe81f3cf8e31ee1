#pragma once

// JSON problem documents for the discrete region search (schema 1) and
// serialization of search results.
//
// {
//   "schema": 1,
//   "alphabets": {"x": 2, "y": 2, "z_a": 2, "z_b": 2},
//   "pxy": [...],                       // row-major |X| x |Y|
//   "rounds": 1,
//   "f_a": [...], "f_b": [...],         // row-major |X| x |Y| symbol tables
//   "distortion": {"d_a": [...], ...},  // optional, Hamming by default
//   "targets": {"d_a": 0.1, "d_b": "inf", "d_ab": 0, "d_ba": 0},
//   "mode": "common" | "constrained",
//   "q": 4,
//   "aux_sizes": {"w_a": 1, "w_b": 1, "u": [3]},  // optional
//   "weights": [1.0],                              // optional
//   "budget": 100000000, "threads": 0              // optional
// }

#include <string>

#include <json.hpp>

#include "ircr/region_discrete.hpp"

namespace ircr {

struct DiscreteRequest {
  DiscreteProblem problem;
  SearchOptions options;
};

// Throws InputError naming the offending field.
DiscreteRequest parse_discrete_request(const nlohmann::json& doc);
DiscreteRequest load_discrete_request(const std::string& path);

std::string mode_name(DecoderMode m);

// Resolved request, defaults included.
nlohmann::json request_to_json(const DiscreteRequest& req);

nlohmann::json search_result_to_json(const SearchResult& r,
                                     const DiscreteRequest& req);

}  // namespace ircr
