#include "ircr/discrete_io.hpp"

#include <cmath>
#include <fstream>

#include "ircr/output.hpp"

namespace ircr {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key,
                    const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw InputError(path + key + " is required");
  }
  return obj.at(key);
}

std::size_t to_size(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw InputError(field + " must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::size_t to_positive(const json& j, const std::string& field) {
  const std::size_t v = to_size(j, field);
  if (v == 0) throw InputError(field + " must be positive");
  return v;
}

std::vector<double> to_doubles(const json& j, const std::string& field) {
  if (!j.is_array()) throw InputError(field + " must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw InputError(field + "[" + std::to_string(i) + "] must be a number");
    }
    out.push_back(j[i].get<double>());
  }
  return out;
}

std::vector<std::size_t> to_sizes(const json& j, const std::string& field) {
  if (!j.is_array()) throw InputError(field + " must be an array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(to_size(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// Re-throws validation errors with the document field prefix.
template <typename F>
void with_field(const std::string& prefix, F&& f) {
  try {
    f();
  } catch (const InputError& e) {
    throw InputError(prefix + ": " + e.what());
  }
}

json rows_to_json(const std::vector<double>& flat, std::size_t m) {
  json rows = json::array();
  for (std::size_t r = 0; r * m < flat.size(); ++r) {
    rows.push_back(std::vector<double>(flat.begin() + r * m,
                                       flat.begin() + (r + 1) * m));
  }
  return rows;
}

json distortions_to_json(const Distortions4& d) {
  return {{"d_a", json_number(d.d_a)},
          {"d_b", json_number(d.d_b)},
          {"d_ab", json_number(d.d_ab)},
          {"d_ba", json_number(d.d_ba)}};
}

}  // namespace

std::string mode_name(DecoderMode m) {
  return m == DecoderMode::kCommon ? "common" : "constrained";
}

DiscreteRequest parse_discrete_request(const json& doc) {
  if (!doc.is_object()) throw InputError("problem document must be a JSON object");
  const json& schema = require(doc, "schema", "");
  if (!schema.is_number_integer() || schema.get<int>() != 1) {
    throw InputError("schema must be 1");
  }

  DiscreteRequest req;
  DiscreteProblem& p = req.problem;
  const json& alph = require(doc, "alphabets", "");
  p.nx = to_positive(require(alph, "x", "alphabets."), "alphabets.x");
  p.ny = to_positive(require(alph, "y", "alphabets."), "alphabets.y");
  p.nz_a = to_positive(require(alph, "z_a", "alphabets."), "alphabets.z_a");
  p.nz_b = to_positive(require(alph, "z_b", "alphabets."), "alphabets.z_b");

  p.pxy = to_doubles(require(doc, "pxy", ""), "pxy");
  const json& rounds = require(doc, "rounds", "");
  if (!rounds.is_number_integer() || rounds.get<long long>() < 1 ||
      rounds.get<long long>() > 16) {
    throw InputError("rounds must be an integer in [1, 16]");
  }
  p.rounds = rounds.get<int>();
  p.f_a = to_sizes(require(doc, "f_a", ""), "f_a");
  p.f_b = to_sizes(require(doc, "f_b", ""), "f_b");

  p.d_a = hamming_table(p.nz_a);
  p.d_b = hamming_table(p.nz_b);
  p.d_ab = hamming_table(p.nz_a);
  p.d_ba = hamming_table(p.nz_b);
  if (doc.contains("distortion")) {
    const json& dist = doc.at("distortion");
    if (!dist.is_object()) throw InputError("distortion must be an object");
    for (const char* key : {"d_a", "d_b", "d_ab", "d_ba"}) {
      if (!dist.contains(key)) continue;
      std::vector<double> t = to_doubles(dist.at(key), std::string("distortion.") + key);
      const std::string k = key;
      if (k == "d_a") p.d_a = std::move(t);
      else if (k == "d_b") p.d_b = std::move(t);
      else if (k == "d_ab") p.d_ab = std::move(t);
      else p.d_ba = std::move(t);
    }
  }

  const json& tg = require(doc, "targets", "");
  p.targets.d_a = json_to_double(require(tg, "d_a", "targets."), "targets.d_a");
  p.targets.d_b = json_to_double(require(tg, "d_b", "targets."), "targets.d_b");
  p.targets.d_ab = json_to_double(require(tg, "d_ab", "targets."), "targets.d_ab");
  p.targets.d_ba = json_to_double(require(tg, "d_ba", "targets."), "targets.d_ba");

  with_field("problem", [&] { p.validate(); });

  SearchOptions& o = req.options;
  const json& mode = require(doc, "mode", "");
  if (mode == "common") {
    o.mode = DecoderMode::kCommon;
  } else if (mode == "constrained") {
    o.mode = DecoderMode::kConstrained;
  } else {
    throw InputError("mode must be \"common\" or \"constrained\"");
  }
  o.q = to_positive(require(doc, "q", ""), "q");

  o.sizes = default_sizes(p, o.mode);
  if (doc.contains("aux_sizes")) {
    const json& s = doc.at("aux_sizes");
    if (!s.is_object()) throw InputError("aux_sizes must be an object");
    if (s.contains("w_a")) o.sizes.w_a = to_positive(s.at("w_a"), "aux_sizes.w_a");
    if (s.contains("w_b")) o.sizes.w_b = to_positive(s.at("w_b"), "aux_sizes.w_b");
    if (s.contains("u")) o.sizes.u = to_sizes(s.at("u"), "aux_sizes.u");
  }
  with_field("aux_sizes", [&] { validate_sizes(p, o.sizes); });

  if (doc.contains("weights")) o.weights = to_doubles(doc.at("weights"), "weights");
  if (o.weights.empty()) o.weights.assign(p.rounds, 1.0);
  if (o.weights.size() != static_cast<std::size_t>(p.rounds)) {
    throw InputError("weights must have one entry per round");
  }
  for (double w : o.weights) {
    if (!(std::isfinite(w) && w >= 0.0)) {
      throw InputError("weights must be finite and nonnegative");
    }
  }
  if (doc.contains("budget")) o.budget = to_positive(doc.at("budget"), "budget");
  if (doc.contains("threads")) {
    o.threads = static_cast<unsigned>(to_size(doc.at("threads"), "threads"));
  }
  return req;
}

DiscreteRequest load_discrete_request(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("problem: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw InputError("problem: invalid JSON in '" + path + "': " + e.what());
  }
  return parse_discrete_request(doc);
}

nlohmann::json request_to_json(const DiscreteRequest& req) {
  const DiscreteProblem& p = req.problem;
  const SearchOptions& o = req.options;
  return {{"schema", 1},
          {"alphabets", {{"x", p.nx}, {"y", p.ny}, {"z_a", p.nz_a}, {"z_b", p.nz_b}}},
          {"pxy", p.pxy},
          {"rounds", p.rounds},
          {"f_a", p.f_a},
          {"f_b", p.f_b},
          {"distortion", {{"d_a", p.d_a}, {"d_b", p.d_b}, {"d_ab", p.d_ab}, {"d_ba", p.d_ba}}},
          {"targets", distortions_to_json(p.targets)},
          {"mode", mode_name(o.mode)},
          {"q", o.q},
          {"aux_sizes", {{"w_a", o.sizes.w_a}, {"w_b", o.sizes.w_b}, {"u", o.sizes.u}}},
          {"weights", o.weights},
          {"budget", o.budget},
          {"threads", o.threads}};
}

nlohmann::json search_result_to_json(const SearchResult& r,
                                     const DiscreteRequest& req) {
  json rounds = json::array();
  for (std::size_t j = 0; j < r.chain.round_channels.size(); ++j) {
    rounds.push_back(rows_to_json(r.chain.round_channels[j], r.chain.sizes.u[j]));
  }
  return {{"status", "ok"},
          {"rates_bits", r.point.rates},
          {"objective_bits", r.objective},
          {"distortions", distortions_to_json(r.point.distortions)},
          {"mode", mode_name(req.options.mode)},
          {"q", req.options.q},
          {"aux_sizes", {{"w_a", r.chain.sizes.w_a}, {"w_b", r.chain.sizes.w_b}, {"u", r.chain.sizes.u}}},
          {"cardinality_caps", r.caps},
          {"inner_bound", r.inner_bound},
          {"chain_index", r.chain_index},
          {"chains_evaluated", r.chains_evaluated},
          {"chain",
           {{"w_a_channel", rows_to_json(r.chain.w_a_channel, r.chain.sizes.w_a)},
            {"w_b_channel", rows_to_json(r.chain.w_b_channel, r.chain.sizes.w_b)},
            {"round_channels", rounds}}},
          {"decoders",
           {{"z_a", r.decoders.z_a},
            {"w_b", r.decoders.w_b},
            {"z_b", r.decoders.z_b},
            {"w_a", r.decoders.w_a}}},
          {"units", {{"rates_bits", "bits per source symbol"},
                     {"objective_bits", "bits per source symbol"},
                     {"distortions", "expected distortion (table units)"}}}};
}

}  // namespace ircr
