#include "aese/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "aese/aggregate.hpp"
#include "aese/metrics.hpp"
#include "aese/mle.hpp"
#include "aese/rng.hpp"

namespace aese {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string cell;
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(cell.substr(b, e - b + 1));
  }
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<MarginalSpec> builtin_model(const std::string& name, int d) {
  if (name == "beta")
    return {MarginalSpec::parse("beta:1,6,-1,2"), MarginalSpec::parse("beta:3,5,-1,2")};
  if (name == "gumbel")
    return {MarginalSpec::parse("gumbel:4,0.3"), MarginalSpec::parse("gumbel:2.4,0.7")};
  if (name == "normal_mix")
    return {MarginalSpec::parse("normalmix:0.2,0.01,0.6,0.01,0.5"),
            MarginalSpec::parse("normal:0.8,0.04")};
  if (name == "uniform") {
    if (d < 2) throw std::invalid_argument("builtin_model: uniform needs d >= 2");
    return std::vector<MarginalSpec>(d, MarginalSpec(UniformSpec{}));
  }
  throw std::invalid_argument("unknown model '" + name +
                              "' (built-ins: beta, gumbel, normal_mix, uniform)");
}

void ExperimentSpec::resolve() {
  if (marginals.empty()) marginals = builtin_model(model, d);
  d = static_cast<int>(marginals.size());
  if (replications < 1) throw std::invalid_argument("spec: replications must be >= 1");
  for (int n : sizes)
    if (n < 4) throw std::invalid_argument("spec: sizes must be >= 4");
  if (fixed_degrees.empty() && formula_nn <= 0)
    throw std::invalid_argument("spec: need a candidate policy (degrees list or auto:N)");
}

ExperimentSpec ExperimentSpec::parse(std::istream& is) {
  ExperimentSpec spec;
  std::map<int, MarginalSpec> custom;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::runtime_error("spec line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "model") {
        spec.model = value;
      } else if (key == "d") {
        spec.d = std::stoi(value);
      } else if (key == "sizes") {
        spec.sizes.clear();
        for (const auto& c : split_list(value)) spec.sizes.push_back(std::stoi(c));
      } else if (key == "replications") {
        spec.replications = std::stoi(value);
      } else if (key == "ce") {
        spec.ce = std::stod(value);
      } else if (key == "candidates") {
        if (value.rfind("auto:", 0) == 0) {
          spec.formula_nn = std::stoi(value.substr(5));
          spec.fixed_degrees.clear();
        } else {
          spec.fixed_degrees.clear();
          for (const auto& c : split_list(value)) spec.fixed_degrees.push_back(std::stoi(c));
          spec.formula_nn = 0;
        }
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else if (key == "panels") {
        spec.panels = std::stoi(value);
      } else if (key == "nodes") {
        spec.nodes = std::stoi(value);
      } else if (key == "score_panels") {
        spec.score_panels = std::stoi(value);
      } else if (key == "score_nodes") {
        spec.score_nodes = std::stoi(value);
      } else if (key == "estimators") {
        spec.run_aese = spec.run_kernel = spec.score_candidates = false;
        for (const auto& c : split_list(value)) {
          if (c == "aese") spec.run_aese = true;
          else if (c == "kernel") spec.run_kernel = true;
          else if (c == "candidates") spec.score_candidates = true;
          else throw std::runtime_error("unknown estimator '" + c + "'");
        }
      } else if (key == "threads") {
        spec.threads = std::stoi(value);
      } else if (key.rfind("marginal", 0) == 0) {
        const int idx = std::stoi(key.substr(8));
        custom.emplace(idx, MarginalSpec::parse(value));
      } else {
        throw std::runtime_error("unknown key '" + key + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("spec line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!custom.empty()) {
    int expect = 1;
    for (const auto& [idx, m] : custom) {
      if (idx != expect)
        throw std::runtime_error("spec: marginal keys must be consecutive from marginal1");
      spec.marginals.push_back(m);
      ++expect;
    }
    spec.model = "custom";
  }
  spec.resolve();
  return spec;
}

ExperimentSpec ExperimentSpec::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open spec file: " + path);
  return parse(is);
}

namespace {

std::vector<int> candidate_degrees(const ExperimentSpec& spec, int n) {
  if (spec.formula_nn > 0) return build_candidates(n, spec.d, spec.formula_nn).degrees;
  return spec.fixed_degrees;
}

struct RepOutput {
  std::vector<ReplicationRecord> records;
};

RepOutput run_replication(const ExperimentSpec& spec, const TruncationModel& truth,
                          const TriangleScorer& scorer, const QuadratureGrid& grid, int n,
                          int rep) {
  RepOutput out;
  const uint64_t rep_seed =
      derive_seed(spec.seed, {hash_name(spec.model), static_cast<uint64_t>(n), static_cast<uint64_t>(rep)});
  const SimplexSample full = sample(truth, n, rep_seed);

  if (spec.run_aese || spec.score_candidates) {
    const auto t0 = std::chrono::steady_clock::now();
    auto [part1, part2] = split_sample(full, spec.ce, derive_seed(rep_seed, {0xA11C}));
    std::vector<SeriesDensity> cands;
    std::vector<int> degrees = candidate_degrees(spec, n);
    std::vector<bool> cand_ok;
    for (int v : degrees) {
      FitResult fr = fit(part1, ModelIndex::uniform(spec.d, v), grid);
      cand_ok.push_back(fr.converged);
      cands.push_back(std::move(fr.density));
    }
    WeightSelection sel = select_weights(cands, part2, grid);
    const double ms = elapsed_ms(t0);

    if (spec.run_aese) {
      const auto sc = scorer.score(as_density(sel.density));
      ReplicationRecord r{spec.model, n, rep, "aese", sc.kl, sc.ise, ms, true, {}};
      r.converged = std::all_of(cand_ok.begin(), cand_ok.end(), [](bool b) { return b; });
      r.lambda.assign(sel.density.lambda().data(),
                      sel.density.lambda().data() + sel.density.lambda().size());
      out.records.push_back(std::move(r));
    }
    if (spec.score_candidates) {
      for (size_t c = 0; c < cands.size(); ++c) {
        const auto sc = scorer.score(as_density(cands[c]));
        out.records.push_back(ReplicationRecord{spec.model, n, rep,
                                                "aese_m" + std::to_string(degrees[c]), sc.kl, sc.ise,
                                                0.0, cand_ok[c],
                                                {}});
      }
    }
  }

  if (spec.run_kernel) {
    const auto t0 = std::chrono::steady_clock::now();
    const KernelEstimate kde = kernel_fit(full, grid);
    const double ms = elapsed_ms(t0);
    const auto sc = scorer.score(kde);
    out.records.push_back(ReplicationRecord{spec.model, n, rep, "kernel", sc.kl, sc.ise, ms, true, {}});
  }
  return out;
}

}  // namespace

std::vector<ReplicationRecord> run_experiment(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  spec.resolve();

  const QuadratureGrid grid(spec.panels, spec.nodes);
  const QuadratureGrid score_grid(spec.score_panels, spec.score_nodes);
  const TriangleRule rule(score_grid);
  const TruncationModel truth = build_model(spec.marginals, grid);
  const TriangleScorer scorer(as_density(truth), rule);

  struct Job {
    int n, rep;
  };
  std::vector<Job> jobs;
  for (int n : spec.sizes)
    for (int rep = 0; rep < spec.replications; ++rep) jobs.push_back({n, rep});

  std::vector<ReplicationRecord> records;
  std::mutex mu;
  std::atomic<size_t> next{0};
  const unsigned workers =
      spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                       : std::max(1u, std::thread::hardware_concurrency());

  auto worker = [&]() {
    for (;;) {
      const size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        RepOutput out = run_replication(spec, truth, scorer, grid, jobs[j].n, jobs[j].rep);
        std::lock_guard<std::mutex> lk(mu);
        for (auto& r : out.records) records.push_back(std::move(r));
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lk(mu);
        std::cerr << "replication (n=" << jobs[j].n << ", rep=" << jobs[j].rep
                  << ") failed and was skipped: " << e.what() << '\n';
      }
    }
  };

  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::sort(records.begin(), records.end(), [](const ReplicationRecord& a, const ReplicationRecord& b) {
    return std::tie(a.model, a.n, a.rep, a.estimator) < std::tie(b.model, b.n, b.rep, b.estimator);
  });
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<ReplicationRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  std::map<std::tuple<std::string, int, std::string>, std::vector<const ReplicationRecord*>> groups;
  for (const auto& r : records) groups[{r.model, r.n, r.estimator}].push_back(&r);

  std::vector<SummaryRow> rows;
  for (const auto& [key, group] : groups) {
    SummaryRow row;
    row.model = std::get<0>(key);
    row.n = std::get<1>(key);
    row.estimator = std::get<2>(key);
    row.count = static_cast<int>(group.size());
    double kl = 0.0, ise = 0.0;
    for (const auto* r : group) {
      kl += r->kl;
      ise += r->ise;
    }
    row.kl_mean = kl / row.count;
    row.ise_mean = ise / row.count;
    if (row.count > 1) {
      double vk = 0.0, vl = 0.0;
      for (const auto* r : group) {
        vk += (r->kl - row.kl_mean) * (r->kl - row.kl_mean);
        vl += (r->ise - row.ise_mean) * (r->ise - row.ise_mean);
      }
      row.kl_var = vk / (row.count - 1);
      row.ise_var = vl / (row.count - 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double rate_diagnostic(const std::vector<ReplicationRecord>& records, const std::string& estimator) {
  std::map<int, std::pair<double, int>> by_n;
  for (const auto& r : records)
    if (r.estimator == estimator) {
      by_n[r.n].first += r.kl;
      by_n[r.n].second += 1;
    }
  if (by_n.size() < 3)
    throw std::invalid_argument("rate_diagnostic: need at least three distinct sizes");
  // least squares of log(mean KL) on log(n)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& [n, acc] : by_n) {
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(acc.first / acc.second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void write_records_csv(const std::vector<ReplicationRecord>& records, std::ostream& os) {
  os << "model,n,rep,estimator,kl,ise,fit_ms,converged,lambda\n";
  char buf[40];
  for (const auto& r : records) {
    os << r.model << ',' << r.n << ',' << r.rep << ',' << r.estimator << ',';
    std::snprintf(buf, sizeof(buf), "%.10g", r.kl);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.10g", r.ise);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.4g", r.fit_ms);
    os << buf << ',' << (r.converged ? 1 : 0) << ',';
    for (size_t c = 0; c < r.lambda.size(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.6g", r.lambda[c]);
      os << (c ? ";" : "") << buf;
    }
    os << '\n';
  }
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& os) {
  os << "model,n,estimator,kl_mean,kl_var,ise_mean,ise_var,count\n";
  char buf[40];
  for (const auto& r : rows) {
    os << r.model << ',' << r.n << ',' << r.estimator << ',';
    std::snprintf(buf, sizeof(buf), "%.6g", r.kl_mean);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.4g", r.kl_var);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.6g", r.ise_mean);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.4g", r.ise_var);
    os << buf << ',' << r.count << '\n';
  }
}

std::string format_summary_table(const std::vector<SummaryRow>& rows, const std::string& metric) {
  const bool use_kl = metric == "kl";
  if (!use_kl && metric != "ise")
    throw std::invalid_argument("format_summary_table: metric must be kl or ise");

  std::vector<int> sizes;
  std::vector<std::string> models, estimators;
  for (const auto& r : rows) {
    if (std::find(sizes.begin(), sizes.end(), r.n) == sizes.end()) sizes.push_back(r.n);
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
    if (std::find(estimators.begin(), estimators.end(), r.estimator) == estimators.end())
      estimators.push_back(r.estimator);
  }
  std::sort(sizes.begin(), sizes.end());

  auto find_row = [&](const std::string& model, int n, const std::string& est) -> const SummaryRow* {
    for (const auto& r : rows)
      if (r.model == model && r.n == n && r.estimator == est) return &r;
    return nullptr;
  };

  std::ostringstream os;
  char buf[64];
  os << (use_kl ? "KL distances" : "Integrated squared errors") << '\n';
  std::snprintf(buf, sizeof(buf), "%-12s", "");
  os << buf;
  for (int n : sizes)
    for (const auto& est : estimators) {
      std::snprintf(buf, sizeof(buf), "%14s", (est + "@" + std::to_string(n)).c_str());
      os << buf;
    }
  os << '\n';
  for (const auto& model : models) {
    std::snprintf(buf, sizeof(buf), "%-12s", model.c_str());
    os << buf;
    for (int n : sizes)
      for (const auto& est : estimators) {
        const SummaryRow* r = find_row(model, n, est);
        if (r) {
          std::snprintf(buf, sizeof(buf), "%14.4f", use_kl ? r->kl_mean : r->ise_mean);
        } else {
          std::snprintf(buf, sizeof(buf), "%14s", "-");
        }
        os << buf;
      }
    os << '\n';
    std::snprintf(buf, sizeof(buf), "%-12s", "  (var)");
    os << buf;
    for (int n : sizes)
      for (const auto& est : estimators) {
        const SummaryRow* r = find_row(model, n, est);
        if (r) {
          std::snprintf(buf, sizeof(buf), "%14.2e", use_kl ? r->kl_var : r->ise_var);
        } else {
          std::snprintf(buf, sizeof(buf), "%14s", "-");
        }
        os << buf;
      }
    os << '\n';
  }
  return os.str();
}

void write_surface_csv(const ExperimentSpec& spec_in, std::ostream& os, int grid_points) {
  ExperimentSpec spec = spec_in;
  spec.resolve();
  if (spec.d != 2) throw std::invalid_argument("write_surface_csv: d = 2 only");
  const int n = *std::max_element(spec.sizes.begin(), spec.sizes.end());

  const QuadratureGrid grid(spec.panels, spec.nodes);
  const TruncationModel truth = build_model(spec.marginals, grid);
  const uint64_t rep_seed =
      derive_seed(spec.seed, {hash_name(spec.model), static_cast<uint64_t>(n), 0});
  const SimplexSample full = sample(truth, n, rep_seed);
  auto [part1, part2] = split_sample(full, spec.ce, derive_seed(rep_seed, {0xA11C}));

  std::vector<SeriesDensity> cands;
  for (int v : candidate_degrees(spec, n))
    cands.push_back(fit(part1, ModelIndex::uniform(spec.d, v), grid).density);
  const WeightSelection sel = select_weights(cands, part2, grid);
  const KernelEstimate kde = kernel_fit(full, grid);

  os << "x1,x2,f0,aese,kernel\n";
  char buf[40];
  for (int a = 0; a < grid_points; ++a)
    for (int b = 0; b < grid_points; ++b) {
      const double x[2] = {a / (grid_points - 1.0), b / (grid_points - 1.0)};
      const std::span<const double> pt(x, 2);
      os << x[0] << ',' << x[1];
      for (const double lv :
           {truth.true_log_density(pt), sel.density.log_density(pt), kde.log_density(pt)}) {
        std::snprintf(buf, sizeof(buf), "%.8g", std::isfinite(lv) ? std::exp(lv) : 0.0);
        os << ',' << buf;
      }
      os << '\n';
    }
}

}  // namespace aese
