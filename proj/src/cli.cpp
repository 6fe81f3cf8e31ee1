#include "ircr/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <sstream>

#include "ircr/discrete_io.hpp"
#include "ircr/output.hpp"
#include "ircr/selftest.hpp"
#include "ircr/simulator.hpp"
#include "ircr/steinberg_compare.hpp"

namespace ircr {

namespace {

using nlohmann::json;

// Numeric flags are kept as text so that "inf" is accepted uniformly.
struct NumFlag {
  std::string name;
  std::string text;

  double value() const { return parse_double(text, name); }
};

struct SourceFlags {
  NumFlag sigma_x2{"--sigma-x2", "4"};
  NumFlag sigma_v2{"--sigma-v2", "4"};

  void add(CLI::App* app) {
    app->add_option(sigma_x2.name, sigma_x2.text, "variance of X")->capture_default_str();
    app->add_option(sigma_v2.name, sigma_v2.text, "variance of V, Y = X + V")->capture_default_str();
  }
  GaussianPair get() const {
    GaussianPair s{sigma_x2.value(), sigma_v2.value()};
    s.validate();
    return s;
  }
  json to_json() const { return {{"sigma_x2", sigma_x2.value()}, {"sigma_v2", sigma_v2.value()}}; }
};

struct FunctionFlags {
  NumFlag alpha_a{"--alpha-a", "0"};
  NumFlag beta_a{"--beta-a", "0"};
  NumFlag alpha_b{"--alpha-b", "1"};
  NumFlag beta_b{"--beta-b", "0"};

  void add(CLI::App* app) {
    app->add_option(alpha_a.name, alpha_a.text, "f_A coefficient of X")->capture_default_str();
    app->add_option(beta_a.name, beta_a.text, "f_A coefficient of Y")->capture_default_str();
    app->add_option(alpha_b.name, alpha_b.text, "f_B coefficient of X")->capture_default_str();
    app->add_option(beta_b.name, beta_b.text, "f_B coefficient of Y")->capture_default_str();
  }
  LinearFn fa() const { return checked(alpha_a, beta_a); }
  LinearFn fb() const { return checked(alpha_b, beta_b); }
  json to_json() const {
    return {{"alpha_a", alpha_a.value()}, {"beta_a", beta_a.value()},
            {"alpha_b", alpha_b.value()}, {"beta_b", beta_b.value()}};
  }

 private:
  static LinearFn checked(const NumFlag& a, const NumFlag& b) {
    LinearFn f{a.value(), b.value()};
    if (!std::isfinite(f.alpha)) throw InputError(a.name + " must be finite");
    if (!std::isfinite(f.beta)) throw InputError(b.name + " must be finite");
    return f;
  }
};

struct DistortionFlags {
  NumFlag d_a{"--d-a", "inf"};
  NumFlag d_b{"--d-b", "1"};

  void add(CLI::App* app) {
    app->add_option(d_a.name, d_a.text, "MSE target at A (inf = unconstrained)")->capture_default_str();
    app->add_option(d_b.name, d_b.text, "MSE target at B (inf = unconstrained)")->capture_default_str();
  }
  DistortionPair get() const {
    DistortionPair d{d_a.value(), d_b.value()};
    if (!(d.d_a > 0.0)) throw InputError("--d-a must be positive");
    if (!(d.d_b > 0.0)) throw InputError("--d-b must be positive");
    return d;
  }
  json to_json() const { return {{"d_a", json_number(d_a.value())}, {"d_b", json_number(d_b.value())}}; }
};

json kappa_to_json(const KappaVec& k) {
  return {{"kx_a", k.kx_a}, {"ky_a", k.ky_a}, {"kx_b", k.kx_b}, {"ky_b", k.ky_b}};
}

json sim_to_json(const SimResult& r) {
  return {{"d_a", r.d_a},
          {"d_b", r.d_b},
          {"se_a", r.se_a},
          {"se_b", r.se_b},
          {"agreement", r.agreement},
          {"schedule", schedule_name(r.config.schedule)},
          {"n", r.config.n},
          {"seed", r.config.seed}};
}

// Sends `text` to --out (or stdout). CSV files get a manifest sidecar.
void emit(const std::string& out_path, const std::string& text, std::ostream& out,
          const json* sidecar) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  write_text_file(out_path, text);
  if (sidecar) write_text_file(out_path + ".manifest.json", sidecar->dump(2) + "\n");
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  for (const std::string& c : cells) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s + '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Interactive rate-distortion with reconstruction constraints"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string out_path;
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "output file (default: stdout)");
  };

  // region-gaussian
  SourceFlags rg_src;
  FunctionFlags rg_f;
  DistortionFlags rg_d;
  int rg_grid = 33;
  auto* rg = app.add_subcommand("region-gaussian", "trace the (odd, even) sum-rate boundary (CSV)");
  rg_src.add(rg);
  rg_f.add(rg);
  rg_d.add(rg);
  rg->add_option("--grid", rg_grid, "number of weight angles")->capture_default_str();
  add_out(rg);

  // ratio-curve
  SourceFlags rc_src;
  int rc_grid = 64;
  auto* rc = app.add_subcommand("ratio-curve", "interactive vs one-way rate ratio (CSV)");
  rc_src.add(rc);
  rc->add_option("--grid", rc_grid, "number of distortion points")->capture_default_str();
  add_out(rc);

  // verify
  SourceFlags vf_src;
  FunctionFlags vf_f;
  DistortionFlags vf_d;
  auto* vf = app.add_subcommand("verify", "compare the linear scheme with the bound (JSON)");
  vf_src.add(vf);
  vf_f.add(vf);
  vf_d.add(vf);
  add_out(vf);

  // region-discrete
  std::string problem_path;
  auto* rd = app.add_subcommand("region-discrete", "exhaustive discrete region search (JSON)");
  rd->add_option("problem", problem_path, "problem JSON file")->required();
  add_out(rd);

  // simulate
  SourceFlags sm_src;
  FunctionFlags sm_f;
  std::string sm_kind = "linear";
  std::string sm_schedule;
  NumFlag a1{"--a1", "1"}, n1{"--n1", "1"}, a2{"--a2", "1"}, n2{"--n2", "1"};
  int rx_bits = 16;
  std::uint64_t sim_n = 1'000'000, seed = 1;
  auto* sm = app.add_subcommand("simulate", "Monte Carlo distortions (JSON)");
  sm->add_option("--kind", sm_kind, "linear or indicator")
      ->check(CLI::IsMember({"linear", "indicator"}))
      ->capture_default_str();
  sm_src.add(sm);
  sm_f.add(sm);
  for (NumFlag* f : {&a1, &n1, &a2, &n2}) {
    sm->add_option(f->name, f->text, "test channel parameter")->capture_default_str();
  }
  sm->add_option("--rx-bits", rx_bits, "quantizer bits for the indicator experiment")
      ->capture_default_str();
  sm->add_option("--schedule", sm_schedule,
                 "sequential-a, sequential-b or simultaneous (indicator default: "
                 "sequential-a and simultaneous)");
  sm->add_option("--n", sim_n, "sample count")->capture_default_str();
  sm->add_option("--seed", seed, "RNG seed")->capture_default_str();
  add_out(sm);

  auto* st = app.add_subcommand("selftest", "run the invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and --version
      std::ostringstream help;
      app.exit(e, help, help);
      out << help.str();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*rg) {
      const GaussianPair src = rg_src.get();
      const DistortionPair d = rg_d.get();
      if (rg_grid < 2) throw InputError("--grid must be >= 2");
      const KappaSearchConfig kcfg;
      const auto trace = boundary_trace(src, rg_f.fa(), rg_f.fb(), d, rg_grid, kcfg);
      std::string csv = "theta_rad,w_odd,w_even,r_odd_bits,r_even_bits\n";
      for (const TracePoint& p : trace) {
        csv += csv_row({csv_number(p.theta), csv_number(p.weights.w_odd),
                        csv_number(p.weights.w_even), csv_number(p.rates.r_odd),
                        csv_number(p.rates.r_even)});
      }
      json cfg = rg_src.to_json();
      cfg.update(rg_f.to_json());
      cfg.update(rg_d.to_json());
      cfg["grid"] = rg_grid;
      cfg["kappa_grid_points"] = kcfg.grid_points;
      cfg["kappa_margin"] = kcfg.margin;
      cfg["kappa_sweeps"] = kcfg.sweeps;
      json side = make_manifest("region-gaussian", cfg, 0).to_json();
      side["columns"] = {{"theta_rad", "radians"}, {"w_odd", "weight"}, {"w_even", "weight"},
                         {"r_odd_bits", "bits"}, {"r_even_bits", "bits"}};
      emit(out_path, csv, out, &side);
      return 0;
    }

    if (*rc) {
      const GaussianPair src = rc_src.get();
      if (rc_grid < 1) throw InputError("--grid must be >= 1");
      const auto grid = default_ratio_grid(src, rc_grid);
      std::string csv = "d,r_cr_bits,r_sum_star_bits,ratio\n";
      for (const RatioCurvePoint& p : ratio_curve(src, grid)) {
        csv += csv_row({csv_number(p.d), csv_number(p.r_cr), csv_number(p.r_sum_star),
                        csv_number(p.ratio)});
      }
      json cfg = rc_src.to_json();
      cfg["grid"] = rc_grid;
      cfg["d_min"] = grid.front();
      cfg["d_max"] = grid.back();
      cfg["spacing"] = "log";
      json side = make_manifest("ratio-curve", cfg, 0).to_json();
      side["columns"] = {{"d", "variance (MSE)"}, {"r_cr_bits", "bits"},
                         {"r_sum_star_bits", "bits"}, {"ratio", "dimensionless"}};
      emit(out_path, csv, out, &side);
      return 0;
    }

    if (*vf) {
      const GaussianPair src = vf_src.get();
      const DistortionPair d = vf_d.get();
      const AchievabilityConfig acfg;
      const AchievabilityReport r =
          verify_achievability(src, vf_f.fa(), vf_f.fb(), d, acfg);
      json cfg = vf_src.to_json();
      cfg.update(vf_f.to_json());
      cfg.update(vf_d.to_json());
      cfg["gain_range"] = {acfg.gain_min, acfg.gain_max};
      cfg["gain_step"] = acfg.gain_step;
      cfg["noise_range_times_sigma_x2"] = {acfg.noise_min, acfg.noise_max};
      cfg["match_tol_bits"] = acfg.match_tol_bits;
      json doc = {
          {"manifest", make_manifest("verify", cfg, 0).to_json()},
          {"found", r.found},
          {"channels", {{"a1", r.channels.a1}, {"n1", r.channels.n1},
                        {"a2", r.channels.a2}, {"n2", r.channels.n2}}},
          {"achieved", {{"r1_bits", json_number(r.achieved.r1)},
                        {"r2_bits", json_number(r.achieved.r2)},
                        {"d_a", r.achieved.d_a},
                        {"d_b", r.achieved.d_b},
                        {"kappa", kappa_to_json(r.achieved.kappa)}}},
          {"achieved_sum_rate_bits", json_number(r.achieved_sum_rate)},
          {"bound_sum_rate_bits", json_number(r.bound.objective)},
          {"bound_kappa", kappa_to_json(r.bound.kappa)},
          {"gap_bits", json_number(r.gap_bits)},
          {"never_below_bound", r.never_below_bound},
          {"within_match_tol", r.within_match_tol},
          {"closest_excess", json_number(r.closest_excess)},
          {"units", {{"rates", "bits"}, {"distortions", "variance (MSE)"},
                     {"kappa", "covariance"}}}};
      emit(out_path, doc.dump(2) + "\n", out, nullptr);
      if (!r.found) err << "no test channel meets the distortion targets\n";
      return r.found && r.never_below_bound && r.within_match_tol ? 0 : 1;
    }

    if (*rd) {
      const DiscreteRequest req = load_discrete_request(problem_path);
      const json manifest = make_manifest("region-discrete", request_to_json(req), 0).to_json();
      try {
        const SearchResult r = min_rates_search(req.problem, req.options);
        json doc = search_result_to_json(r, req);
        doc["manifest"] = manifest;
        emit(out_path, doc.dump(2) + "\n", out, nullptr);
        return 0;
      } catch (const InfeasibleError& e) {
        json doc = {{"status", "infeasible"}, {"message", e.what()}, {"manifest", manifest}};
        emit(out_path, doc.dump(2) + "\n", out, nullptr);
        err << "infeasible: " << e.what() << "\n";
        return 1;
      }
    }

    if (*sm) {
      const GaussianPair src = sm_src.get();
      SimConfig cfg;
      cfg.n = sim_n;
      cfg.seed = seed;
      cfg.validate();
      json conf = sm_src.to_json();
      conf["kind"] = sm_kind;
      conf["n"] = sim_n;
      conf["seed"] = seed;
      json doc;
      if (sm_kind == "linear") {
        const TestChannels tc{a1.value(), n1.value(), a2.value(), n2.value()};
        tc.validate();
        cfg.schedule = sm_schedule.empty() ? Schedule::kSequentialA : parse_schedule(sm_schedule);
        const SimResult r = simulate_linear(src, tc, sm_f.fa(), sm_f.fb(), cfg);
        const AchievedPoint ap = achieved_point(src, tc, sm_f.fa(), sm_f.fb());
        conf.update(sm_f.to_json());
        conf["channels"] = {{"a1", tc.a1}, {"n1", tc.n1}, {"a2", tc.a2}, {"n2", tc.n2}};
        conf["schedule"] = schedule_name(cfg.schedule);
        doc = {{"result", sim_to_json(r)},
               {"analytic", {{"d_a", ap.d_a}, {"d_b", ap.d_b}}}};
      } else {
        if (rx_bits < 1 || rx_bits > 52) throw InputError("--rx-bits must be in [1, 52]");
        conf["rx_bits"] = rx_bits;
        if (sm_schedule.empty()) {
          const IndicatorPair r = simulate_indicator(src, rx_bits, cfg);
          conf["schedule"] = "sequential-a,simultaneous";
          doc = {{"sequential", sim_to_json(r.sequential)},
                 {"simultaneous", sim_to_json(r.simultaneous)}};
        } else {
          cfg.schedule = parse_schedule(sm_schedule);
          conf["schedule"] = schedule_name(cfg.schedule);
          doc = {{"result", sim_to_json(simulate_indicator_schedule(src, rx_bits, cfg))}};
        }
      }
      doc["units"] = {{"d_a", sm_kind == "linear" ? "variance (MSE)" : "error probability"},
                      {"d_b", sm_kind == "linear" ? "variance (MSE)" : "error probability"},
                      {"agreement", "fraction"}};
      doc["manifest"] = make_manifest("simulate", conf, seed).to_json();
      emit(out_path, doc.dump(2) + "\n", out, nullptr);
      return 0;
    }

    if (*st) {
      bool all = true;
      for (const SelftestCheck& c : run_selftest()) {
        out << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << c.detail << "\n";
        all = all && c.passed;
      }
      return all ? 0 : 1;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ircr
