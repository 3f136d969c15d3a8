// Command-line surface: validate/solve/check instances, export frontiers,
// generate seeded instances, run the small-instance oracle.
//
// Exit codes: 0 success (or certified stable), 1 unstable (check),
// 2 input error, 3 solver non-convergence.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "netex/io.hpp"
#include "netex/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnstable = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNoConvergence = 3;

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream out;
    out << std::cin.rdbuf();
    return out.str();
  }
  return netex::read_file(path);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-")
    std::cout << content;
  else
    netex::write_file_atomic(out_path, content);
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "netex: pairwise-stable bilateral exchanges on bipartite networks"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string out_path;
  double opt_tol = 1e-6;
  double opt_step = 1e-3;
  std::string opt_side = "buyer";
  std::uint64_t opt_seed = 0;
  app.add_option("--out", out_path, "output file (default: stdout)");
  auto* tol_opt = app.add_option("--tol", opt_tol, "stability tolerance");
  auto* step_opt = app.add_option("--step", opt_step, "concession step");
  auto* side_opt = app.add_option("--propose-side", opt_side,
                                  "proposing side: buyer or seller");
  app.add_option("--seed", opt_seed, "generator seed");

  auto* c_validate = app.add_subcommand("validate", "validate an instance");
  std::string validate_path;
  c_validate->add_option("instance", validate_path)->required();

  auto* c_solve =
      app.add_subcommand("solve", "compute a certified stable outcome");
  std::string solve_path;
  c_solve->add_option("instance", solve_path)->required();

  auto* c_check = app.add_subcommand("check", "re-certify an outcome file");
  std::string check_instance, check_outcome;
  c_check->add_option("instance", check_instance)->required();
  c_check->add_option("outcome", check_outcome)->required();

  auto* c_frontier =
      app.add_subcommand("frontier", "export one edge's RQ path as CSV");
  std::string frontier_path, frontier_buyer, frontier_seller;
  int frontier_samples = 101;
  c_frontier->add_option("instance", frontier_path)->required();
  c_frontier->add_option("--buyer", frontier_buyer)->required();
  c_frontier->add_option("--seller", frontier_seller)->required();
  c_frontier->add_option("--samples", frontier_samples);

  auto* c_gen = app.add_subcommand("gen", "generate a seeded instance");
  int gen_buyers = 2, gen_sellers = 2;
  double gen_density = 1.0;
  std::string gen_families = "additive_power,shifted_cobb_douglas,ces";
  c_gen->add_option("--buyers", gen_buyers);
  c_gen->add_option("--sellers", gen_sellers);
  c_gen->add_option("--density", gen_density);
  c_gen->add_option("--families", gen_families,
                    "comma list: additive_power, shifted_cobb_douglas, ces, "
                    "canonical-sqrt");

  auto* c_oracle =
      app.add_subcommand("oracle", "enumerate stable outcomes (small instances)");
  std::string oracle_path;
  double oracle_grid = 0.05;
  int oracle_cap = 8;
  c_oracle->add_option("instance", oracle_path)->required();
  c_oracle->add_option("--grid-step", oracle_grid);
  c_oracle->add_option("--cap", oracle_cap);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_validate) {
      netex::ValidationReport report;
      try {
        netex::parse_instance(slurp(validate_path), &report);
      } catch (const netex::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitInputError;
      }
      std::cout << "valid, " << report.warning_count() << " warning(s)\n";
      if (!report.issues.empty()) std::cout << report.summary();
      return kExitOk;
    }

    if (*c_solve) {
      const std::string text = slurp(solve_path);
      netex::InstanceDocument doc = netex::parse_instance_document(text);
      netex::SolverConfig config;
      doc.overrides.apply(config);
      if (tol_opt->count()) config.tol = opt_tol;
      if (step_opt->count()) config.step = opt_step;
      if (side_opt->count())
        config.propose_side =
            opt_side == "seller" ? netex::Side::Seller : netex::Side::Buyer;
      netex::StableOutcome outcome;
      try {
        outcome = netex::solve(doc.instance, config);
      } catch (const netex::SolveError& e) {
        std::cerr << e.what();
        return kExitNoConvergence;
      }
      emit(out_path, netex::serialize_outcome(doc.instance, outcome));
      return kExitOk;
    }

    if (*c_check) {
      const netex::Instance instance = netex::parse_instance(slurp(check_instance));
      const netex::StableOutcome recorded =
          netex::parse_outcome(instance, slurp(check_outcome));
      netex::FrontierSet frontiers(instance);
      const double tol =
          tol_opt->count() ? opt_tol : instance.numerics().stability_tol;
      const netex::BlockingReport report =
          netex::certify(instance, frontiers, recorded, tol);
      std::cout << report.describe() << "\n";
      if (report.stable() != recorded.certificate.stable())
        std::cout << "note: recorded verdict disagrees with re-certification\n";
      const netex::PayoffMap payoffs =
          netex::payoff_profile(instance, recorded.profile);
      for (const auto& [id, u] : payoffs) {
        const auto it = recorded.payoffs.find(id);
        if (it == recorded.payoffs.end() ||
            std::abs(it->second - u) > 10.0 * tol) {
          std::cout << "note: recorded payoff of " << id
                    << " differs from recomputation\n";
        }
      }
      return report.stable() ? kExitOk : kExitUnstable;
    }

    if (*c_frontier) {
      const netex::Instance instance = netex::parse_instance(slurp(frontier_path));
      netex::FrontierSet frontiers(instance);
      emit(out_path,
           netex::export_frontier(instance, frontiers,
                                  {frontier_buyer, frontier_seller},
                                  frontier_samples));
      return kExitOk;
    }

    if (*c_gen) {
      netex::GenParams params;
      params.n_buyers = gen_buyers;
      params.n_sellers = gen_sellers;
      params.edge_density = gen_density;
      params.families = split_list(gen_families);
      params.seed = opt_seed;
      emit(out_path, netex::serialize_instance(netex::generate_instance(params)));
      return kExitOk;
    }

    if (*c_oracle) {
      const netex::Instance instance = netex::parse_instance(slurp(oracle_path));
      const double tol =
          tol_opt->count() ? opt_tol : instance.numerics().stability_tol;
      const auto outcomes =
          netex::brute_force_solve(instance, oracle_grid, oracle_cap, tol);
      std::cout << outcomes.size() << " stable outcome(s)\n";
      if (!out_path.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& o : outcomes)
          arr.push_back(
              nlohmann::json::parse(netex::serialize_outcome(instance, o)));
        emit(out_path, arr.dump(2) + "\n");
      }
      return kExitOk;
    }
  } catch (const netex::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
