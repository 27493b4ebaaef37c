// mcgeo: f-divergences, information projections and mixing diagnostics for
// multivariate Markov chains. JSON in, JSON out; see README.md for formats.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mcgeo/factorization.hpp"
#include "mcgeo/inequalities.hpp"
#include "mcgeo/json_io.hpp"
#include "mcgeo/projections.hpp"
#include "mcgeo/spectral.hpp"
#include "mcgeo/swapping.hpp"

using nlohmann::json;
using namespace mcgeo;

namespace {

std::vector<Index> parse_indices(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoll(tok) - 1);  // CLI surface is 1-based
    } catch (...) {
      throw Error("argument", "cannot parse coordinate list '" + text + "'");
    }
  }
  require(!out.empty(), "argument", "empty coordinate list");
  return out;
}

std::vector<CoordinateSubset> parse_subsets(const std::string& text, Index d) {
  std::vector<CoordinateSubset> out;
  std::stringstream ss(text);
  std::string block;
  while (std::getline(ss, block, '|')) out.emplace_back(d, parse_indices(block));
  require(!out.empty(), "argument", "empty subset list");
  return out;
}

std::vector<double> parse_betas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      throw Error("argument", "cannot parse inverse-temperature list '" + text + "'");
    }
  }
  return out;
}

DivergenceGenerator make_generator(const std::string& name, double alpha) {
  if (name == "kl") return DivergenceGenerator::kl();
  if (name == "rkl") return DivergenceGenerator::reverse_kl();
  if (name == "hellinger") return DivergenceGenerator::squared_hellinger();
  if (name == "alpha") return DivergenceGenerator::alpha(alpha);
  throw Error("argument", "unknown generator '" + name + "'");
}

Distribution pi_for(const ChainDocument& doc, const std::string& pi_path) {
  if (!pi_path.empty()) return load_distribution(pi_path);
  if (doc.pi) return *doc.pi;
  return stationary_distribution(doc.matrix);
}

json bracket_json(const LogSobolevBracket& b) {
  return json{{"lower", b.lower}, {"upper", b.upper}, {"numeric", b.numeric}};
}

json inequality_json(const InequalityReport& rep) {
  return json{{"lhs", extended_to_json(rep.lhs)},
              {"rhs", extended_to_json(rep.rhs)},
              {"slack", rep.slack_value},
              {"holds", rep.holds}};
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

SwapConfig swap_config_from(Index n, const std::string& betas_text,
                            const std::string& hamiltonian_path) {
  const auto betas = parse_betas(betas_text);
  const auto h = load_energy(hamiltonian_path);
  require(h.size() == (Index(1) << n), "shape_mismatch",
          "hamiltonian length must be 2^N = " + std::to_string(Index(1) << n));
  return SwapConfig(ProductStateSpace::hypercube(n), h, betas, hypercube_flip_walk<double>(n));
}

json speedup_json(const SpeedupReport& rep) {
  json doc;
  doc["N"] = rep.n_bits;
  doc["d"] = rep.d;
  doc["betas"] = rep.betas;
  doc["oscillation"] = rep.oscillation;
  doc["gamma_p0"] = rep.gamma_p0;
  doc["alpha_p0"] = bracket_json(rep.alpha_p0);
  doc["gamma_sw"] = rep.gamma_sw;
  doc["alpha_sw"] = bracket_json(rep.alpha_sw);
  doc["gamma_projection"] = rep.gamma_proj;
  doc["alpha_projection"] = bracket_json(rep.alpha_proj);
  doc["escape"] = rep.escape;
  doc["escape_formula_bound"] = rep.escape_formula;
  doc["restriction_residual"] = rep.restriction_residual;
  doc["gamma_restriction"] = rep.gamma_restriction;
  doc["gamma_restriction_residual"] = rep.gamma_restriction_residual;
  doc["asserted"] = {{"restriction_exact", rep.restriction_exact},
                     {"gamma_restriction_exact", rep.gamma_restriction_exact},
                     {"escape_ok", rep.escape_ok},
                     {"contraction", rep.contraction_holds},
                     {"relaxation_upper_display",
                      {{"lhs", rep.relax_le_lhs}, {"rhs", rep.relax_le_rhs}, {"holds", rep.relax_le_holds}}},
                     {"decomposition_lower",
                      {{"bound", rep.decomposition_lower}, {"holds", rep.decomposition_lower_holds}}},
                     {"tmix_projection_upper",
                      {{"tmix", rep.tmix_proj}, {"bound", rep.tmix_proj_bound}, {"holds", rep.tmix_upper_holds}}},
                     {"all_hold", rep.all_asserted_hold}};
  json recorded;
  recorded["threefold_gap"] = {{"lhs", rep.threefold_lhs},
                               {"rhs", rep.threefold_rhs},
                               {"holds", rep.threefold_holds}};
  if (rep.d == 2) {
    recorded["equality_gamma"] = {{"lhs", rep.equality_gamma_lhs},
                                  {"rhs", rep.equality_gamma_rhs},
                                  {"residual", rep.equality_gamma_residual}};
    recorded["equality_alpha_numeric"] = {{"lhs", rep.equality_alpha_lhs},
                                          {"rhs", rep.equality_alpha_rhs},
                                          {"residual", rep.equality_alpha_residual}};
  }
  recorded["relaxation_lower_display"] = {{"lhs", rep.relax_ge_lhs},
                                          {"rhs", rep.relax_ge_rhs},
                                          {"holds", rep.relax_ge_holds}};
  if (rep.tmix_sw) recorded["tmix_sw"] = *rep.tmix_sw;
  doc["recorded"] = recorded;
  doc["discrepancies"] = {{"gamma_p0_computed", rep.gamma_p0},
                                {"gamma_p0_display", rep.gamma_p0_display},
                                {"alpha_p0_numeric", rep.alpha_p0.numeric},
                                {"alpha_p0_display", rep.alpha_p0_display},
                                {"alpha_gamma_ratio", rep.alpha_gamma_ratio_p0},
                                {"notes", rep.notes}};
  return doc;
}

int run(int argc, char** argv) {
  CLI::App app{"information geometry of multivariate Markov chains"};
  app.require_subcommand(1);

  // ---- divergence ----
  auto* divergence = app.add_subcommand("divergence", "f-divergence between two chains");
  std::string div_f = "kl", div_pi, div_m, div_l;
  double div_alpha = 0.5;
  divergence->add_option("--f", div_f, "generator: kl|rkl|alpha|hellinger");
  divergence->add_option("--alpha", div_alpha, "alpha parameter");
  divergence->add_option("--pi", div_pi, "weight distribution document")->required();
  divergence->add_option("--m", div_m, "first chain document")->required();
  divergence->add_option("--l", div_l, "second chain document")->required();
  divergence->callback([&] {
    const auto pi = load_distribution(div_pi);
    const auto m = load_chain(div_m).matrix;
    const auto l = load_chain(div_l).matrix;
    emit(json{{"value", extended_to_json(f_div_chains(pi, m, l, make_generator(div_f, div_alpha)))}});
  });

  // ---- project ----
  auto* project = app.add_subcommand("project", "closest product chain");
  std::string prj_method = "kl", prj_pi, prj_p, prj_init;
  double prj_alpha = 0.5, prj_tol = 1e-10;
  Index prj_iters = 500;
  project->add_option("--method", prj_method, "kl|rkl|alpha");
  project->add_option("--alpha", prj_alpha, "alpha parameter");
  project->add_option("--pi", prj_pi, "weight distribution document")->required();
  project->add_option("--p", prj_p, "chain document")->required();
  project->add_option("--init", prj_init, "directory holding factor1.json ... factord.json");
  project->add_option("--tol", prj_tol, "per-sweep decrease tolerance");
  project->add_option("--max-iters", prj_iters, "sweep limit");
  project->callback([&] {
    const auto pi = load_distribution(prj_pi);
    const auto p = load_chain(prj_p).matrix;
    json doc;
    if (prj_method == "kl" && prj_init.empty()) {
      const auto res = closest_product_kl(p, pi);
      doc["divergence"] = res.divergence_to_input;
      doc["trace"] = json::array({res.divergence_to_input});
      json factors = json::array();
      for (const auto& f : res.factors) factors.push_back(matrix_to_json(f));
      doc["factors"] = factors;
    } else {
      std::optional<std::vector<StochasticMatrix>> init;
      if (!prj_init.empty()) {
        init.emplace();
        for (Index i = 0; i < p.space().dims(); ++i)
          init->push_back(
              load_chain(prj_init + "/factor" + std::to_string(i + 1) + ".json").matrix);
      }
      const auto res = coordinate_descent(p, pi, make_generator(prj_method, prj_alpha),
                                          std::move(init), prj_iters, prj_tol);
      doc["divergence"] = res.trace.back();
      doc["trace"] = res.trace;
      doc["sweeps"] = res.sweeps;
      doc["converged"] = res.converged;
      json factors = json::array();
      for (const auto& f : res.factors) factors.push_back(matrix_to_json(f));
      doc["factors"] = factors;
    }
    emit(doc);
  });

  // ---- marginal ----
  auto* marginal = app.add_subcommand("marginal", "keep-S-in transition matrix");
  std::string mrg_s, mrg_pi, mrg_p;
  marginal->add_option("--s", mrg_s, "coordinate list, e.g. 1,3")->required();
  marginal->add_option("--pi", mrg_pi, "weight distribution document")->required();
  marginal->add_option("--p", mrg_p, "chain document")->required();
  marginal->callback([&] {
    const auto pi = load_distribution(mrg_pi);
    const auto p = load_chain(mrg_p).matrix;
    const CoordinateSubset s(p.space().dims(), parse_indices(mrg_s));
    const auto proj = keep_in(p, pi, s);
    const auto margin = pi.marginal(s);
    emit(chain_to_json(proj, &margin));
  });

  // ---- factor ----
  auto* factor = app.add_subcommand("factor", "partition-factorizable projection");
  std::string fct_blocks, fct_pi, fct_p;
  factor->add_option("--blocks", fct_blocks, "partition, e.g. 1,2|3")->required();
  factor->add_option("--pi", fct_pi, "weight distribution document")->required();
  factor->add_option("--p", fct_p, "chain document")->required();
  factor->callback([&] {
    const auto pi = load_distribution(fct_pi);
    const auto p = load_chain(fct_p).matrix;
    const Index d = p.space().dims();
    Partition part(d, parse_subsets(fct_blocks, d));
    const auto res = partition_projection(p, pi, part);
    const auto dec = independence_decomposition(p, pi, part);
    json doc;
    doc["divergence_to_factorizability"] = res.divergence_to_input;
    json factors = json::array();
    for (const auto& f : res.factors) factors.push_back(matrix_to_json(f));
    doc["factors"] = factors;
    doc["product"] = matrix_to_json(res.product);
    doc["decomposition"] = {{"total", dec.total},
                            {"to_factorizability", dec.to_factorizability},
                            {"per_block", dec.per_block}};
    emit(doc);
  });

  // ---- clique ----
  auto* clique = app.add_subcommand("clique", "clique-factorizable candidate");
  std::string clq_graph, clq_cliques, clq_pi, clq_p;
  std::vector<std::string> clq_candidates;
  clique->add_option("--graph", clq_graph, "graph document")->required();
  clique->add_option("--cliques", clq_cliques, "clique list, e.g. 1,2|2,3")->required();
  clique->add_option("--pi", clq_pi, "weight distribution document")->required();
  clique->add_option("--p", clq_p, "chain document")->required();
  clique->add_option("--candidate", clq_candidates,
                     "candidate block documents for the Pythagorean check (repeatable)");
  clique->callback([&] {
    const auto pi = load_distribution(clq_pi);
    const auto p = load_chain(clq_p).matrix;
    const Index d = p.space().dims();
    CliqueCover cover(load_graph(clq_graph), parse_subsets(clq_cliques, d));
    const auto cand = clique_candidate(p, pi, cover);
    json doc;
    doc["P"] = matrix_to_json(cand.matrix);
    doc["normalizers"] = vector_json(cand.normalizers);
    if (!clq_candidates.empty()) {
      std::vector<StochasticMatrix> blocks;
      for (const auto& path : clq_candidates) blocks.push_back(load_chain(path).matrix);
      const auto rep = clique_pythagorean_check(p, pi, cover, blocks);
      json zs = json::array();
      for (char ok : rep.z_ok) zs.push_back(static_cast<bool>(ok));
      doc["check"] = {{"lhs", rep.lhs},
                      {"rhs", rep.rhs},
                      {"projection_term", rep.projection_term},
                      {"block_terms", rep.block_terms},
                      {"slack", rep.slack},
                      {"z_condition_per_state", zs},
                      {"z_margin_min", rep.z_margin_min},
                      {"asserted", rep.asserted},
                      {"holds", rep.holds}};
    }
    emit(doc);
  });

  // ---- check ----
  auto* check = app.add_subcommand("check", "divergence inequality checks");
  std::string chk_kind, chk_pi, chk_p, chk_l, chk_s, chk_subsets;
  std::vector<std::string> chk_factors;
  Index chk_r = 1;
  check->add_option("kind", chk_kind, "partition|shearer|han|shearer-ind")->required();
  check->add_option("--pi", chk_pi, "weight distribution document")->required();
  check->add_option("--p", chk_p, "chain document")->required();
  check->add_option("--l", chk_l, "comparison chain document (partition)");
  check->add_option("--l-factor", chk_factors, "factor documents (shearer/han, repeatable)");
  check->add_option("--s", chk_s, "coordinate subset (partition)");
  check->add_option("--subsets", chk_subsets, "subset family, e.g. 1,2|2,3|1,3");
  check->add_option("--r", chk_r, "covering multiplicity");
  check->callback([&] {
    const auto pi = load_distribution(chk_pi);
    const auto p = load_chain(chk_p).matrix;
    const Index d = p.space().dims();
    InequalityReport rep(Extended(0.0), Extended(0.0));
    if (chk_kind == "partition") {
      require(!chk_l.empty() && !chk_s.empty(), "argument",
              "partition check needs --l and --s");
      rep = partition_lemma_check(pi, p, load_chain(chk_l).matrix,
                                  CoordinateSubset(d, parse_indices(chk_s)));
    } else if (chk_kind == "shearer" || chk_kind == "han") {
      require(static_cast<Index>(chk_factors.size()) == d, "argument",
              "need one --l-factor per coordinate");
      std::vector<StochasticMatrix> ls;
      for (const auto& path : chk_factors) ls.push_back(load_chain(path).matrix);
      const auto cover = chk_kind == "han"
                             ? SubsetCoverSpec::han(d)
                             : SubsetCoverSpec(d, parse_subsets(chk_subsets, d), chk_r);
      rep = shearer_chain_check(pi, p, ls, cover);
    } else if (chk_kind == "shearer-ind") {
      const auto cover = chk_subsets.empty()
                             ? SubsetCoverSpec::han(d)
                             : SubsetCoverSpec(d, parse_subsets(chk_subsets, d), chk_r);
      rep = shearer_independence_check(pi, p, cover);
    } else {
      throw Error("argument", "unknown check kind '" + chk_kind + "'");
    }
    emit(inequality_json(rep));
  });

  // ---- scan ----
  auto* scan = app.add_subcommand("scan", "exhaustive modularity scan");
  std::string scn_functional = "entropy", scn_p;
  scan->add_option("--functional", scn_functional, "entropy|fact|ind");
  scan->add_option("--p", scn_p, "chain document")->required();
  scan->callback([&] {
    const auto p = load_chain(scn_p).matrix;
    ScanFunctional fn = ScanFunctional::EntropyRate;
    if (scn_functional == "fact") fn = ScanFunctional::FactorizabilityDistance;
    else if (scn_functional == "ind") fn = ScanFunctional::DistanceToIndependence;
    else require(scn_functional == "entropy", "argument",
                 "unknown functional '" + scn_functional + "'");
    const auto rep = modularity_scan(p, fn);
    json doc;
    doc["functional"] = scn_functional;
    doc["triple_count"] = rep.triple_count;
    doc["min_modularity_slack"] = rep.min_modularity_slack;
    if (fn == ScanFunctional::DistanceToIndependence)
      doc["min_monotonicity_slack"] = rep.min_monotonicity_slack;
    doc["max_identity_residual"] = rep.max_identity_residual;
    doc["holds"] = rep.holds;
    emit(doc);
  });

  // ---- sanov ----
  auto* sanov = app.add_subcommand("sanov", "large-deviation rate exponent");
  std::string snv_pi, snv_p;
  Index snv_i = 1;
  std::vector<std::string> snv_factors;
  sanov->add_option("--pi", snv_pi, "product distribution document")->required();
  sanov->add_option("--p", snv_p, "chain document")->required();
  sanov->add_option("--i", snv_i, "free coordinate (1-based)")->required();
  sanov->add_option("--l-factor", snv_factors, "prescribed factors in coordinate order");
  sanov->callback([&] {
    const auto pi = load_distribution(snv_pi);
    const auto p = load_chain(snv_p).matrix;
    std::vector<StochasticMatrix> others;
    for (const auto& path : snv_factors) others.push_back(load_chain(path).matrix);
    emit(json{{"rate", sanov_rate(p, pi, snv_i - 1, others)}});
  });

  // ---- spectral ----
  auto* spectral = app.add_subcommand("spectral", "gap, log-Sobolev bracket and hitting times");
  std::string spc_p, spc_pi;
  bool spc_cheeger = false, spc_hitting = false;
  spectral->add_option("--p", spc_p, "chain document")->required();
  spectral->add_option("--pi", spc_pi, "stationary distribution document (default: computed)");
  spectral->add_flag("--cheeger", spc_cheeger, "include the Cheeger constant");
  spectral->add_flag("--hitting", spc_hitting, "include hitting and commute times");
  spectral->callback([&] {
    const auto doc = load_chain(spc_p);
    const auto pi = pi_for(doc, spc_pi);
    const auto rep = spectral_report(doc.matrix, pi, spc_cheeger);
    json out;
    out["gamma"] = rep.gamma;
    out["t_rel"] = rep.t_rel;
    out["alpha"] = bracket_json(rep.alpha);
    if (rep.cheeger) out["cheeger"] = *rep.cheeger;
    if (spc_hitting) {
      const auto hits = hitting_analysis(doc.matrix, pi);
      json hit = json::array();
      for (Index x = 0; x < hits.hit.rows(); ++x) {
        json row = json::array();
        for (Index y = 0; y < hits.hit.cols(); ++y) row.push_back(hits.hit(x, y));
        hit.push_back(row);
      }
      out["hitting"] = {{"hit", hit}, {"t_c", hits.t_c}, {"t_av", hits.t_av}};
    }
    emit(out);
  });

  // ---- mix ----
  auto* mix = app.add_subcommand("mix", "L2 mixing time of the continuized chain");
  std::string mix_p, mix_pi;
  double mix_eps = 0.36787944117144233;
  mix->add_option("--p", mix_p, "chain document")->required();
  mix->add_option("--pi", mix_pi, "stationary distribution document (default: computed)");
  mix->add_option("--eps", mix_eps, "threshold");
  mix->callback([&] {
    const auto doc = load_chain(mix_p);
    const auto pi = pi_for(doc, mix_pi);
    emit(json{{"t_mix", l2_mixing_time(doc.matrix, pi, mix_eps)}, {"eps", mix_eps}});
  });

  // ---- swap ----
  auto* swap = app.add_subcommand("swap", "swapping chain and projection sampler");
  swap->require_subcommand(1);
  Index swp_n = 3, swp_d = 2;
  std::string swp_betas = "0,1", swp_h;
  for (auto* sub : {swap->add_subcommand("build", "assemble the swapping matrix"),
                    swap->add_subcommand("compare", "speedup report"),
                    swap->add_subcommand("sample", "projection sampler trajectory")}) {
    sub->add_option("--N", swp_n, "hypercube bits")->required();
    sub->add_option("--d", swp_d, "temperature count")->required();
    sub->add_option("--betas", swp_betas, "inverse temperatures, e.g. 0,1");
    sub->add_option("--hamiltonian", swp_h, "energy document")->required();
  }
  auto* swap_build = swap->get_subcommand("build");
  swap_build->callback([&] {
    const auto cfg = swap_config_from(swp_n, swp_betas, swp_h);
    const auto psw = build_swapping_matrix(cfg);
    const auto pisw = swap_stationary(cfg);
    json doc = chain_to_json(psw, &pisw);
    doc["stationarity_residual"] = stationarity_residual(psw, pisw);
    doc["reversibility_residual"] = reversibility_residual(psw, pisw);
    emit(doc);
  });
  auto* swap_compare = swap->get_subcommand("compare");
  swap_compare->callback([&] {
    const auto cfg = swap_config_from(swp_n, swp_betas, swp_h);
    emit(speedup_json(speedup_report(cfg)));
  });
  auto* swap_sample = swap->get_subcommand("sample");
  Index smp_steps = 100000;
  std::uint64_t smp_seed = 0;
  std::string smp_coordinate = "last";
  swap_sample->add_option("--steps", smp_steps, "step count");
  swap_sample->add_option("--seed", smp_seed, "RNG seed")->required();
  swap_sample->add_option("--coordinate", smp_coordinate, "tallied slot: 'last' or 1-based index");
  swap_sample->callback([&] {
    const auto cfg = swap_config_from(swp_n, swp_betas, swp_h);
    Index coord = -1;
    if (smp_coordinate != "last") {
      try {
        coord = std::stoll(smp_coordinate) - 1;
      } catch (...) {
        throw Error("argument", "coordinate must be 'last' or an integer");
      }
    }
    const auto run = simulate_projection_sampler(cfg, smp_seed, smp_steps, coord);
    json doc;
    doc["seed"] = run.seed;
    doc["steps"] = run.steps;
    doc["coordinate"] = run.coordinate + 1;
    doc["empirical"] = distribution_to_json(run.empirical);
    const auto target = gibbs_distribution(cfg.base_space, cfg.energy,
                                           cfg.betas[static_cast<std::size_t>(run.coordinate)]);
    doc["tv_to_exact"] = 0.5 * (run.empirical.mass() - target.mass()).cwiseAbs().sum();
    emit(doc);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    emit(json{{"error", e.kind()}, {"detail", e.what()}});
    return 1;
  } catch (const std::exception& e) {
    emit(json{{"error", "internal"}, {"detail", e.what()}});
    return 1;
  }
}
