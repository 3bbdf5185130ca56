// Command-line front end: every solver, network, genie, and simulation entry
// point, with JSON inputs/outputs and reproducible seeding.
//
// Exit codes: 0 success, 2 invalid input, 3 solver failed to converge,
// 4 verification failure.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sepnet/json_io.hpp"

using namespace sepnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitVerificationFailed = 4;

struct Manifest {
  std::string command;
  std::map<std::string, std::string> input_hashes;
  std::uint64_t seed = 0, stream = 0;
  bool seeded = false;

  void record(const std::string& path) {
    if (!path.empty()) input_hashes[path] = file_content_hash(path);
  }
  Json to_json() const {
    Json j{{"tool", "sepnet"}, {"command", command}, {"inputs", input_hashes}};
    if (seeded) {
      j["seed"] = seed;
      j["stream"] = stream;
    }
    return j;
  }
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SEPNET_SEED")) return std::stoull(env);
  return 0;
}

void write_outputs(const std::string& out_path, const Json& result, const Manifest& man) {
  if (out_path.empty()) return;
  write_json_file(out_path, result);
  write_json_file(out_path + ".manifest.json", man.to_json());
}

Vec parse_csv_doubles(const std::string& s) {
  Vec v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  return v;
}

int finish_solver(const SolverResult& r, const std::string& out, Manifest& man,
                  const std::string& label) {
  Json j = dump_solver_result(r);
  write_outputs(out, j, man);
  std::cout << label << " = " << r.value << " bits  [" << r.lower_bound << ", "
            << r.upper_bound << "]  converged=" << (r.converged ? "yes" : "no") << "\n";
  return r.converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"separation-theorem toolkit"};
  app.require_subcommand(1);

  std::string in_a, in_b, in_c, in_d, out, cfg_path;
  double arg_D = 0, arg_R = 0, kappa = 1.0, delta = 0.1, epsilon = 0.0, rate_margin = 0.1;
  std::uint64_t seed = default_seed(), stream = 0;
  long trials = 100;
  std::size_t n_prime = 64;
  std::string list_arg, csv_out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out, "write the result JSON (plus .manifest.json) here");
    sub->add_option("--config", cfg_path, "solver configuration JSON");
  };
  auto load_cfg = [&]() {
    return cfg_path.empty() ? SolverConfig{} : load_solver_config(read_json_file(cfg_path));
  };

  // --- solver verbs ---
  auto* sc_cap = app.add_subcommand("capacity", "Shannon capacity of a channel");
  sc_cap->add_option("--channel", in_a, "channel JSON")->required();
  add_common(sc_cap);

  auto* sc_rd = app.add_subcommand("rd", "rate-distortion function R(D)");
  sc_rd->add_option("--source", in_a, "source law JSON")->required();
  sc_rd->add_option("--distortion", in_b, "distortion measure JSON")->required();
  sc_rd->add_option("--D", arg_D, "distortion budget")->required();
  add_common(sc_rd);

  auto* sc_dr = app.add_subcommand("dr", "distortion-rate function D(R)");
  sc_dr->add_option("--source", in_a, "source law JSON")->required();
  sc_dr->add_option("--distortion", in_b, "distortion measure JSON")->required();
  sc_dr->add_option("--R", arg_R, "rate budget in bits")->required();
  add_common(sc_dr);

  auto* sc_cdn = app.add_subcommand("cdn", "cost-constrained additive-noise capacity C(D,N)");
  sc_cdn->add_option("--noise", in_a, "noise law JSON")->required();
  sc_cdn->add_option("--structure", in_b, "additive structure JSON")->required();
  sc_cdn->add_option("--D", arg_D, "input cost budget")->required();
  add_common(sc_cdn);

  auto* sc_wn = app.add_subcommand("worst-noise", "minimax worst-noise capacity C_X(D)");
  sc_wn->add_option("--structure", in_a, "additive structure JSON")->required();
  sc_wn->add_option("--D", arg_D, "shared cost budget")->required();
  add_common(sc_wn);

  // --- network verbs ---
  auto* sc_ec = app.add_subcommand("edge-caps", "per-edge Shannon capacities of a network");
  sc_ec->add_option("--network", in_a, "network spec JSON")->required();
  add_common(sc_ec);

  auto* sc_sf = app.add_subcommand("sep-feasible",
                                   "separation feasibility of a unicast distortion tuple");
  sc_sf->add_option("--network", in_a, "network spec JSON")->required();
  sc_sf->add_option("--region", in_b, "capacity polytope JSON")->required();
  sc_sf->add_option("--D", list_arg, "comma-separated distortion budgets per source")
      ->required();
  add_common(sc_sf);

  auto* sc_opta = app.add_subcommand("opta", "point-to-point separation frontier D(kappa C)");
  sc_opta->add_option("--source", in_a, "source law JSON")->required();
  sc_opta->add_option("--distortion", in_b, "distortion measure JSON")->required();
  sc_opta->add_option("--channel", in_c, "channel JSON")->required();
  sc_opta->add_option("--kappa", kappa, "channel uses per source sample");
  sc_opta->add_option("--table", list_arg, "comma-separated kappa values for a frontier table");
  sc_opta->add_option("--csv", csv_out, "write the frontier table CSV here");
  add_common(sc_opta);

  // --- genie verbs ---
  auto* sc_gq = app.add_subcommand("genie-quadratic",
                                   "quadratic genie rate matrix (closed form, 1/2 bit)");
  sc_gq->add_option("--network", in_a, "network spec JSON (for the demand sets)")->required();
  sc_gq->add_option("--distortions", in_b, "distortion matrix JSON")->required();
  add_common(sc_gq);

  auto* sc_g = app.add_subcommand("genie", "genie rate matrix via the constrained solver");
  sc_g->add_option("--network", in_a, "network spec JSON (for the demand sets)")->required();
  sc_g->add_option("--distortions", in_b, "distortion matrix JSON")->required();
  sc_g->add_option("--chains", in_c,
                   "chain JSON {structure, distortion, chains:{src:{v_laws}}}")
      ->required();
  add_common(sc_g);

  auto* sc_dms = app.add_subcommand(
      "dms-rates", "degraded-message-set rates from a problem JSON "
                   "{source, structure, distortion, v_laws, D_row}");
  sc_dms->add_option("--problem", in_a, "problem JSON")->required();
  add_common(sc_dms);

  auto* sc_vl = app.add_subcommand(
      "verify-lemma1", "check the rate-loss inequalities for a problem JSON "
                       "{source, recon_channels, recon_budgets, structure, distortion, "
                       "v_laws, D_row}");
  sc_vl->add_option("--problem", in_a, "problem JSON")->required();
  add_common(sc_vl);

  // --- simulation verbs ---
  auto add_sim_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "root RNG seed (default: SEPNET_SEED env or 0)");
    sub->add_option("--stream", stream, "RNG stream id");
    sub->add_option("--trials", trials, "Monte-Carlo trials");
    sub->add_option("--n", n_prime, "blocklength");
    sub->add_option("--delta", delta, "typicality window");
    sub->add_option("--csv", csv_out, "write per-trial rows CSV here");
    add_common(sub);
  };

  auto* sc_cs = app.add_subcommand("sim-chansim", "single-edge channel-simulation experiment");
  sc_cs->add_option("--channel", in_a, "channel JSON")->required();
  sc_cs->add_option("--input", in_b, "channel input law JSON")->required();
  sc_cs->add_option("--rate-margin", rate_margin, "codebook rate margin over I(X;Y)");
  add_sim_common(sc_cs);

  auto* sc_dn = app.add_subcommand("sim-dnjscc",
                                   "network experiment with simulated channels");
  sc_dn->add_option("--network", in_a, "network spec JSON")->required();
  sc_dn->add_option("--base-code", in_b, "base joint code JSON (default: identity)");
  add_sim_common(sc_dn);

  auto* sc_uc = app.add_subcommand("sim-unicast", "super-channel source-coding experiment");
  sc_uc->add_option("--network", in_a, "network spec JSON")->required();
  sc_uc->add_option("--base-code", in_b, "base joint code JSON (default: identity)");
  sc_uc->add_option("--target-D", list_arg, "comma-separated target distortions")->required();
  sc_uc->add_option("--epsilon", epsilon, "distortion slack");
  add_sim_common(sc_uc);

  auto* sc_bl = app.add_subcommand("sim-baseline", "point-to-point separation baseline");
  sc_bl->add_option("--source", in_a, "source law JSON")->required();
  sc_bl->add_option("--distortion", in_b, "distortion measure JSON")->required();
  sc_bl->add_option("--channel", in_c, "channel JSON")->required();
  sc_bl->add_option("--kappa", kappa, "channel uses per source sample");
  sc_bl->add_option("--target-D", arg_D, "target distortion")->required();
  add_sim_common(sc_bl);

  CLI11_PARSE(app, argc, argv);

  Manifest man;
  for (const auto* sub : app.get_subcommands()) man.command = sub->get_name();

  try {
    man.record(in_a);
    man.record(in_b);
    man.record(in_c);
    man.record(in_d);
    man.record(cfg_path);

    if (sc_cap->parsed()) {
      auto r = channel_capacity(load_dmc(read_json_file(in_a)), load_cfg());
      return finish_solver(r, out, man, "C");
    }
    if (sc_rd->parsed()) {
      auto r = rate_distortion(load_pmf(read_json_file(in_a)),
                               load_distortion(read_json_file(in_b)), arg_D, load_cfg());
      return finish_solver(r, out, man, "R(D)");
    }
    if (sc_dr->parsed()) {
      auto r = distortion_rate(load_pmf(read_json_file(in_a)),
                               load_distortion(read_json_file(in_b)), arg_R, load_cfg());
      return finish_solver(r, out, man, "D(R)");
    }
    if (sc_cdn->parsed()) {
      auto r = constrained_additive_capacity(load_pmf(read_json_file(in_a)),
                                             load_additive_structure(read_json_file(in_b)),
                                             arg_D, load_cfg());
      return finish_solver(r, out, man, "C(D,N)");
    }
    if (sc_wn->parsed()) {
      auto r = worst_noise_capacity(load_additive_structure(read_json_file(in_a)), arg_D,
                                    load_cfg());
      return finish_solver(r, out, man, "C_X(D)");
    }

    if (sc_ec->parsed()) {
      auto spec = load_network_spec(read_json_file(in_a));
      auto caps = edge_capacities(spec, load_cfg());
      Json j{{"edge_capacities", caps}};
      write_outputs(out, j, man);
      for (std::size_t e = 0; e < caps.size(); ++e)
        std::cout << "edge " << e << " (" << spec.edges[e].from << "->" << spec.edges[e].to
                  << "): C = " << caps[e] << " bits\n";
      return kExitOk;
    }
    if (sc_sf->parsed()) {
      auto spec = load_network_spec(read_json_file(in_a));
      auto region = load_polytope(read_json_file(in_b));
      auto verdict = separation_feasible_unicast(spec, region, parse_csv_doubles(list_arg),
                                                 load_cfg());
      Json j{{"feasible", verdict.feasible},
             {"witness", verdict.witness},
             {"required_rates", verdict.required_rates}};
      write_outputs(out, j, man);
      std::cout << (verdict.feasible ? "feasible" : "infeasible") << "\n";
      return kExitOk;
    }
    if (sc_opta->parsed()) {
      auto src = load_pmf(read_json_file(in_a));
      auto dist = load_distortion(read_json_file(in_b));
      auto ch = load_dmc(read_json_file(in_c));
      auto cfg = load_cfg();
      Json j;
      if (!list_arg.empty()) {
        std::ostringstream csv;
        csv << "kappa,distortion\n";
        Json rows = Json::array();
        for (double k : parse_csv_doubles(list_arg)) {
          double d = separation_frontier_point_to_point(src, dist, ch, k, cfg);
          csv << k << ',' << d << '\n';
          rows.push_back(Json{{"kappa", k}, {"distortion", d}});
        }
        j["frontier"] = rows;
        if (!csv_out.empty()) {
          std::ofstream f(csv_out);
          f << csv.str();
        } else {
          std::cout << csv.str();
        }
      } else {
        double d = separation_frontier_point_to_point(src, dist, ch, kappa, cfg);
        j["distortion"] = d;
        std::cout << "D(kappa C) = " << d << "\n";
      }
      write_outputs(out, j, man);
      return kExitOk;
    }

    if (sc_gq->parsed() || sc_g->parsed()) {
      auto spec = load_network_spec(read_json_file(in_a));
      auto dm = load_distortion_matrix(read_json_file(in_b));
      auto orders = induce_orders(dm, spec.demands);
      GenieRateMatrix rm;
      if (sc_gq->parsed()) {
        rm = quadratic_genie_rate_matrix(dm, orders);
      } else {
        auto prob = read_json_file(in_c);
        auto structure = load_additive_structure(prob.at("structure"));
        auto dist = load_distortion(prob.at("distortion"));
        std::map<std::size_t, AuxChain> chains;
        for (auto it = prob.at("chains").begin(); it != prob.at("chains").end(); ++it) {
          std::size_t src = std::stoul(it.key());
          std::vector<Pmf> v_laws;
          for (const auto& v : it.value().at("v_laws")) v_laws.push_back(load_pmf(v));
          auto slots = orders.slots(src);
          Vec D_row;
          for (std::size_t node : slots) D_row.push_back(dm.at(src, node));
          chains.emplace(src, build_aux_chain(v_laws, structure.group, dist, D_row));
        }
        std::vector<AdditiveStructure> structures(dm.source_count, structure);
        rm = genie_rate_matrix(dm, orders, chains, structures, load_cfg());
      }
      Json j = dump_genie_rate_matrix(rm);
      j["orders"] = dump_order_vector(orders);
      j["aggregate_throughput"] = aggregate_throughput(rm, orders);
      write_outputs(out, j, man);
      std::cout << j.dump(2) << "\n";
      return kExitOk;
    }
    if (sc_dms->parsed()) {
      auto prob = read_json_file(in_a);
      auto src = load_pmf(prob.at("source"));
      auto structure = load_additive_structure(prob.at("structure"));
      auto dist = load_distortion(prob.at("distortion"));
      std::vector<Pmf> v_laws;
      for (const auto& v : prob.at("v_laws")) v_laws.push_back(load_pmf(v));
      Vec D_row;
      for (const auto& d : prob.at("D_row")) D_row.push_back(d.get<double>());
      auto chain = build_aux_chain(v_laws, structure.group, dist, D_row);
      auto rates = dms_rates(src, chain, structure, D_row, load_cfg());
      Json j{{"rates", rates}, {"chain", dump_aux_chain(chain)}};
      write_outputs(out, j, man);
      std::cout << "dms rates (bits):";
      for (double r : rates) std::cout << ' ' << r;
      std::cout << "\n";
      return kExitOk;
    }
    if (sc_vl->parsed()) {
      auto prob = read_json_file(in_a);
      auto src = load_pmf(prob.at("source"));
      auto structure = load_additive_structure(prob.at("structure"));
      auto dist = load_distortion(prob.at("distortion"));
      std::vector<Dmc> recon;
      for (const auto& c : prob.at("recon_channels")) recon.push_back(load_dmc(c));
      Vec budgets;
      for (const auto& b : prob.at("recon_budgets")) budgets.push_back(b.get<double>());
      std::vector<Pmf> v_laws;
      for (const auto& v : prob.at("v_laws")) v_laws.push_back(load_pmf(v));
      Vec D_row;
      for (const auto& d : prob.at("D_row")) D_row.push_back(d.get<double>());
      auto chain = build_aux_chain(v_laws, structure.group, dist, D_row);
      std::vector<RateLossSlack> slacks;
      try {
        slacks = verify_rate_loss_bounds(src, recon, budgets, chain, structure, dist,
                                         load_cfg());
      } catch (const std::runtime_error& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return kExitVerificationFailed;
      }
      Json rows = Json::array();
      double min_slack = 1e300;
      for (const auto& s : slacks) {
        rows.push_back(Json{{"recon", s.recon_index},
                            {"level", s.chain_index},
                            {"left", s.left},
                            {"bound", s.bound},
                            {"slack", s.slack}});
        min_slack = std::min(min_slack, s.slack);
      }
      Json j{{"inequalities", rows}, {"min_slack", min_slack}};
      write_outputs(out, j, man);
      std::cout << "all " << slacks.size() << " rate-loss inequalities hold; min slack = "
                << min_slack << " bits\n";
      return kExitOk;
    }

    auto finish_sim = [&](const SimReport& rep) {
      man.seeded = true;
      man.seed = seed;
      man.stream = stream;
      Json j = dump_sim_report(rep);
      write_outputs(out, j, man);
      if (!csv_out.empty()) {
        std::ofstream f(csv_out);
        f << rep.to_csv();
      }
      std::cout << "trials=" << rep.trials << " e1=" << rep.e1 << " e2=" << rep.e2
                << " e3=" << rep.e3 << " error_rate=" << rep.error_rate
                << " mean_tv=" << rep.mean_tv << "\n";
      for (const auto& [k, v] : rep.distortions)
        std::cout << "distortion[" << k << "] = " << v << "\n";
      return kExitOk;
    };

    if (sc_cs->parsed()) {
      SeededRng rng(seed, stream);
      return finish_sim(channel_simulation_experiment(load_dmc(read_json_file(in_a)),
                                                      load_pmf(read_json_file(in_b)), n_prime,
                                                      delta, rate_margin, trials, rng));
    }
    if (sc_dn->parsed()) {
      auto spec = load_network_spec(read_json_file(in_a));
      auto base = in_b.empty() ? BaseJointCode::identity_for(spec)
                               : load_base_code(read_json_file(in_b));
      SeededRng rng(seed, stream);
      return finish_sim(
          dnjscc_separation_experiment(spec, base, n_prime, delta, trials, rng, load_cfg()));
    }
    if (sc_uc->parsed()) {
      auto spec = load_network_spec(read_json_file(in_a));
      auto base = in_b.empty() ? BaseJointCode::identity_for(spec)
                               : load_base_code(read_json_file(in_b));
      SeededRng rng(seed, stream);
      return finish_sim(jscmud_superchannel_experiment(spec, base, parse_csv_doubles(list_arg),
                                                       epsilon, delta, n_prime, trials, rng,
                                                       load_cfg()));
    }
    if (sc_bl->parsed()) {
      SeededRng rng(seed, stream);
      return finish_sim(separation_baseline_experiment(
          load_pmf(read_json_file(in_a)), load_distortion(read_json_file(in_b)),
          load_dmc(read_json_file(in_c)), kappa, arg_D, delta, n_prime, trials, rng,
          load_cfg()));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
