// Command-line driver: sampling from the truncation models, fitting and
// aggregating series estimators, scoring against exact truths, and running
// full benchmark specs.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "aese/aggregate.hpp"
#include "aese/bench.hpp"
#include "aese/metrics.hpp"
#include "aese/mle.hpp"
#include "aese/truncmodel.hpp"

namespace {

std::vector<int> parse_degrees(const std::string& text) {
  std::vector<int> out;
  std::istringstream is(text);
  std::string cell;
  while (std::getline(is, cell, ',')) out.push_back(std::stoi(cell));
  if (out.empty()) throw CLI::ValidationError("--m", "empty degree list");
  return out;
}

std::string sniff_header(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open model file: " + path);
  std::string line;
  std::getline(is, line);
  return line;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"additive exponential series estimation on the ordered simplex"};
  app.require_subcommand(1);
  app.fallthrough();  // --panels/--nodes may follow the subcommand

  int panels = 64, nodes = 10;
  app.add_option("--panels", panels, "quadrature panels on [0,1]")->capture_default_str();
  app.add_option("--nodes", nodes, "Gauss nodes per panel")->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw a sample from a built-in truncation model");
  std::string sim_model = "beta", sim_out;
  int sim_n = 1000, sim_d = 2;
  uint64_t sim_seed = 1;
  sim->add_option("--model", sim_model, "beta | gumbel | normal_mix | uniform")->capture_default_str();
  sim->add_option("--n", sim_n, "sample size")->capture_default_str();
  sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
  sim->add_option("--d", sim_d, "dimension (uniform model only)")->capture_default_str();
  sim->add_option("--out", sim_out, "output CSV path")->required();

  // fit
  auto* fitc = app.add_subcommand("fit", "fit the series model of a fixed index to a sample");
  std::string fit_in, fit_m = "3,3", fit_out;
  fitc->add_option("--in", fit_in, "input sample CSV")->required();
  fitc->add_option("--m", fit_m, "per-coordinate degrees, e.g. 3,3")->capture_default_str();
  fitc->add_option("--out", fit_out, "output model file")->required();

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "split, fit candidates, select convex weights");
  std::string agg_in, agg_grid = "1,2,3,4", agg_out;
  double agg_ce = 0.8;
  uint64_t agg_seed = 1;
  agg->add_option("--in", agg_in, "input sample CSV")->required();
  agg->add_option("--grid", agg_grid, "candidate degrees '1,2,3,4' or 'auto:N'")->capture_default_str();
  agg->add_option("--ce", agg_ce, "estimation fraction of the split")->capture_default_str();
  agg->add_option("--seed", agg_seed, "split shuffle seed")->capture_default_str();
  agg->add_option("--out", agg_out, "output model file")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "score a saved model against a built-in truth");
  std::string ev_model, ev_truth = "beta", ev_metric = "kl";
  int ev_d = 2;
  ev->add_option("--model", ev_model, "saved model file (fit or aggregate output)")->required();
  ev->add_option("--truth", ev_truth, "built-in truth model name")->capture_default_str();
  ev->add_option("--metric", ev_metric, "kl | l2")->capture_default_str();
  ev->add_option("--d", ev_d, "dimension (uniform truth only)")->capture_default_str();

  // bench
  auto* be = app.add_subcommand("bench", "run a benchmark spec file");
  std::string be_spec, be_out_dir = ".";
  be->add_option("--spec", be_spec, "experiment spec file")->required();
  be->add_option("--out-dir", be_out_dir, "output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const aese::QuadratureGrid grid(panels, nodes);

    if (sim->parsed()) {
      const auto model = aese::build_model(aese::builtin_model(sim_model, sim_d), grid);
      const auto s = aese::sample(model, sim_n, sim_seed);
      s.to_csv_file(sim_out);
      std::cout << "wrote " << s.size() << " points (d=" << s.dim() << ", acceptance mass "
                << model.alpha << ") to " << sim_out << '\n';
    } else if (fitc->parsed()) {
      const auto s = aese::SimplexSample::from_csv_file(fit_in);
      const aese::ModelIndex index(parse_degrees(fit_m));
      const aese::FitResult r = aese::fit(s, index, grid);
      std::ofstream os(fit_out);
      if (!os) throw std::runtime_error("cannot open output file: " + fit_out);
      r.density.save(os);
      std::cout << (r.converged ? "converged" : "NOT converged") << " in " << r.iterations
                << " iterations, residual " << r.residual << ", psi " << r.density.log_norm()
                << '\n';
      if (!r.converged) return 2;
    } else if (agg->parsed()) {
      const auto s = aese::SimplexSample::from_csv_file(agg_in);
      auto [part1, part2] = aese::split_sample(s, agg_ce, agg_seed);
      std::vector<int> degrees;
      if (agg_grid.rfind("auto:", 0) == 0)
        degrees = aese::build_candidates(s.size(), s.dim(), std::stoi(agg_grid.substr(5))).degrees;
      else
        degrees = parse_degrees(agg_grid);
      std::vector<aese::SeriesDensity> cands;
      bool all_ok = true;
      for (int v : degrees) {
        auto fr = aese::fit(part1, aese::ModelIndex::uniform(s.dim(), v), grid);
        all_ok = all_ok && fr.converged;
        cands.push_back(std::move(fr.density));
      }
      const auto sel = aese::select_weights(cands, part2, grid);
      std::ofstream os(agg_out);
      if (!os) throw std::runtime_error("cannot open output file: " + agg_out);
      sel.density.save(os);
      std::cout << "candidates {";
      for (size_t c = 0; c < degrees.size(); ++c) std::cout << (c ? "," : "") << degrees[c];
      std::cout << "}, weights [" << sel.density.lambda().transpose() << "], criterion "
                << sel.criterion << (all_ok ? "" : " (some candidate fits did not converge)") << '\n';
    } else if (ev->parsed()) {
      const auto truth = aese::build_model(aese::builtin_model(ev_truth, ev_d), grid);
      const std::string header = sniff_header(ev_model);
      std::ifstream is(ev_model);
      const aese::SeriesDensity loaded = header == "aese-agg v1"
                                             ? aese::AggregateDensity::load(is, grid).blended()
                                             : aese::SeriesDensity::load(is);
      const auto t = aese::as_density(truth);
      const auto est = aese::as_density(loaded);
      double v = 0.0;
      if (truth.dim() == 2) {
        const aese::TriangleRule rule(grid);
        v = ev_metric == "l2" ? aese::l2_distance(t, est, rule)
                              : aese::kl_divergence(t, est, rule);
      } else {
        // higher dimensions go through the recursive rule on a coarser grid
        const aese::QuadratureGrid coarse(16, 8);
        v = ev_metric == "l2" ? aese::l2_distance(t, est, coarse, truth.dim())
                              : aese::kl_divergence(t, est, coarse, truth.dim());
      }
      std::cout << ev_metric << " " << v << '\n';
    } else if (be->parsed()) {
      const auto spec = aese::ExperimentSpec::parse_file(be_spec);
      std::filesystem::create_directories(be_out_dir);
      const auto records = aese::run_experiment(spec);
      if (records.empty()) throw std::runtime_error("bench: every replication failed");
      const auto rows = aese::summarize(records);
      {
        std::ofstream os(be_out_dir + "/records.csv");
        aese::write_records_csv(records, os);
      }
      {
        std::ofstream os(be_out_dir + "/summary.csv");
        aese::write_summary_csv(rows, os);
      }
      if (spec.d == 2) {
        std::ofstream os(be_out_dir + "/surface_" + spec.model + ".csv");
        aese::write_surface_csv(spec, os);
      }
      std::cout << aese::format_summary_table(rows, "kl") << '\n'
                << aese::format_summary_table(rows, "ise") <<'\n';
      if (spec.sizes.size() >= 3) {
        for (const auto& est : {std::string("aese"), std::string("kernel")}) {
          try {
            std::cout << "log-log KL slope (" << est << "): "
                      << aese::rate_diagnostic(records, est) << '\n';
          } catch (const std::exception&) {
          }
        }
      }
      std::cout << "outputs in " << be_out_dir << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
