#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "latsort/analysis.hpp"
#include "latsort/datagen.hpp"
#include "latsort/io.hpp"
#include "latsort/latent_sort.hpp"
#include "latsort/metrics.hpp"
#include "latsort/rng.hpp"
#include "latsort/sorters.hpp"
#include "latsort/tokenize.hpp"
#include "latsort/tspbench.hpp"
#include "latsort/version.hpp"

namespace {

using namespace latsort;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    write_text(path, content);
}

std::vector<int> parse_sizes(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(part, &used);
      if (used != part.size() || v <= 0) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("invalid layer size list: " + s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SortArgs {
  std::string scheme, in, model, out;
};

void run_sort(const SortArgs& a) {
  if (!is_known_scheme(a.scheme)) throw UsageError("unknown scheme: " + a.scheme);
  if (a.scheme == "latent" && a.model.empty()) throw UsageError("--scheme latent requires --model");
  if (a.scheme != "latent" && !a.model.empty()) throw UsageError("--model is only used with --scheme latent");

  std::vector<SortedSequence> seqs;
  std::vector<std::string> ids;
  if (scheme_kind(a.scheme) == SchemeKind::TraversalBased) {
    for (const auto& g : read_graphs(a.in)) seqs.push_back(a.scheme == "bfs" ? bfs_sort(g) : dfs_sort(g));
  } else {
    const auto sets = read_token_sets(a.in);
    std::optional<LatentSortModel> model;
    if (a.scheme == "latent") model = load_model(a.model);
    for (const auto& s : sets) {
      for (const auto& w : s.validate()) std::cerr << "warning: " << w << "\n";
      seqs.push_back(model ? latent_sort(*model, s) : sort_with_scheme(a.scheme, s));
      ids.push_back(s.id());
    }
  }
  write_sequences(a.out, seqs, ids);
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string in, out, history, hidden = "64,64", recon = "l2";
  TrainConfig cfg;
};

std::string default_history_path(const std::string& model_path) {
  std::filesystem::path p(model_path);
  p.replace_extension(".history.csv");
  return p.string();
}

void run_train(TrainArgs a) {
  a.cfg.hidden_sizes = parse_sizes(a.hidden);
  if (a.recon == "l2")
    a.cfg.recon = ReconLoss::L2;
  else if (a.recon == "l1")
    a.cfg.recon = ReconLoss::L1;
  else
    throw UsageError("--recon must be l1 or l2");
  const auto sets = read_token_sets(a.in);
  const auto result = train(sets, a.cfg);
  save_model(result.model, a.out);
  write_text(a.history.empty() ? default_history_path(a.out) : a.history, history_csv(result.history));
}

// ---------------------------------------------------------------------------

struct GridArgs {
  std::string model, scheme, out;
  int res = 64;
};

void run_grid(const GridArgs& a) {
  if (a.model.empty() == a.scheme.empty()) throw UsageError("give exactly one of --model or --scheme");
  if (a.res < 1) throw UsageError("--res must be positive");
  const auto r = static_cast<std::size_t>(a.res);
  std::vector<Token> pts;
  pts.reserve(r * r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      const double x1 = r == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(r - 1);
      const double x2 = r == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(r - 1);
      pts.push_back({x1, x2});
    }
  std::vector<double> keys;
  if (!a.model.empty()) {
    const auto m = load_model(a.model);
    if (m.token_dim != 2) throw Error("ambiguity grid needs a model with token dimension 2");
    keys = encode_batch(m, pts);
  } else {
    if (!is_known_scheme(a.scheme)) throw UsageError("unknown scheme: " + a.scheme);
    const auto f = dr_mapping(a.scheme);
    for (const auto& p : pts) keys.push_back(f(p));
  }
  keys = minmax_normalize(keys);
  std::string out = "x1,x2,key\n";
  for (std::size_t k = 0; k < pts.size(); ++k)
    out += format_double(pts[k][0]) + "," + format_double(pts[k][1]) + "," + format_double(keys[k]) + "\n";
  emit(a.out, out);
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string in, scheme, model, report;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
};

void run_analyze(const AnalyzeArgs& a) {
  if (!is_known_scheme(a.scheme)) throw UsageError("unknown scheme: " + a.scheme);
  if (scheme_kind(a.scheme) == SchemeKind::TraversalBased)
    throw UsageError("analyze works on token sets; traversal schemes have no keys");
  if ((a.scheme == "latent") == a.model.empty())
    throw UsageError("--model is required with, and only with, --scheme latent");
  const auto sets = read_token_sets(a.in);
  std::optional<LatentSortModel> model;
  if (!a.model.empty()) model = load_model(a.model);

  std::string out = "{\"scheme\":" + json_quote(a.scheme) + ",\"reports\":[";
  std::vector<Token> all;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const auto seq = model ? latent_sort(*model, sets[k]) : sort_with_scheme(a.scheme, sets[k]);
    if (k) out += ",";
    out += report_json(analyze_sequence(seq, sets[k].id()));
    all.insert(all.end(), sets[k].begin(), sets[k].end());
  }
  out += "]";
  if (model && !all.empty()) {
    const auto c = empirical_constants(*model, all, a.samples, a.seed);
    out += ",\"constants\":{\"K_e\":" + format_double(c.k_e) + ",\"K_d\":" + format_double(c.k_d) +
           ",\"B\":" + format_double(c.b) + "}";
  }
  out += "}\n";
  write_text(a.report, out);
}

// ---------------------------------------------------------------------------

struct Item {
  std::string id;
  TokenSet tokens;
  std::optional<Graph> graph;
};

std::vector<Item> read_items(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<Item> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      std::istringstream one(line);
      Item it;
      it.id = obj.is_object() && obj.contains("id") ? obj.at("id").get<std::string>()
                                                    : std::to_string(items.size());
      if (obj.is_object() && obj.contains("nodes")) {
        it.graph = parse_graphs(one).front();
        it.tokens = tokenize_edges(*it.graph);
      } else {
        it.tokens = parse_token_sets(one).front();
      }
      items.push_back(std::move(it));
    } catch (const nlohmann::json::exception& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": malformed line: " + e.what());
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return items;
}

struct MetricsArgs {
  std::string pred, gt, out;
  double match_tol = 0.0;
  SinkhornConfig sinkhorn;
};

void run_metrics(const MetricsArgs& a) {
  const auto pred = read_items(a.pred);
  const auto gt = read_items(a.gt);
  if (pred.size() != gt.size())
    throw Error("prediction and ground-truth files hold different numbers of entries");
  std::vector<MetricsRow> rows;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    MetricsRow r;
    r.id = pred[k].id;
    r.emd = emd(pred[k].tokens, gt[k].tokens);
    r.ehd = ehd(pred[k].tokens, gt[k].tokens);
    if (pred[k].graph && gt[k].graph && pred[k].graph->node_dim() == 2 && gt[k].graph->node_dim() == 2)
      r.smd = smd(*pred[k].graph, *gt[k].graph, a.sinkhorn);
    r.prf = set_prf(pred[k].tokens, gt[k].tokens, a.match_tol);
    r.size_diff = size_diff(pred[k].tokens, gt[k].tokens);
    rows.push_back(std::move(r));
  }
  emit(a.out, metrics_csv(rows));
}

// ---------------------------------------------------------------------------

struct TspArgs {
  TspBenchConfig cfg;
  std::string lgp = "on", out;
};

void run_tsp(TspArgs a) {
  if (a.lgp == "on")
    a.cfg.with_lgp = true;
  else if (a.lgp == "off")
    a.cfg.with_lgp = false;
  else
    throw UsageError("--lgp must be on or off");
  emit(a.out, tsp_csv(a.cfg, run_tsp_benchmark(a.cfg)));
}

// ---------------------------------------------------------------------------

struct PlanarArgs {
  PlanarGenConfig cfg;
  int count = 1;
  std::string out;
};

void run_planar(const PlanarArgs& a) {
  if (a.count < 0) throw UsageError("--count must be non-negative");
  std::string content;
  for (int k = 0; k < a.count; ++k) {
    PlanarGenConfig c = a.cfg;
    c.seed = derive_seed(a.cfg.seed, "graph", static_cast<std::uint64_t>(k));
    content += graph_line(generate_planar_graph(c)) + "\n";
  }
  emit(a.out, content);
}

struct UniformArgs {
  std::size_t m = 8, n = 2, count = 100;
  std::uint64_t seed = 0;
  std::string out;
};

void run_uniform(const UniformArgs& a) {
  std::string content;
  for (const auto& s : generate_uniform_sets(a.m, a.n, a.count, a.seed)) content += token_set_line(s) + "\n";
  emit(a.out, content);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Token ordering toolkit: DR-based sorting, latent sort, analysis and metrics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("latsort ") + latsort::kVersion);

  SortArgs sort_args;
  auto* sort = app.add_subcommand("sort", "Order every token set (or graph) in a file");
  sort->add_option("--scheme", sort_args.scheme, "mean-squared | lex | svd | sum | bfs | dfs | latent")->required();
  sort->add_option("--in", sort_args.in, "Token-set file (graph file for bfs/dfs)")->required();
  sort->add_option("--model", sort_args.model, "Model file for --scheme latent");
  sort->add_option("--out", sort_args.out, "Sorted-sequence file")->required();

  TrainArgs train_args;
  auto* tr = app.add_subcommand("train-latent", "Train a latent-sort autoencoder");
  tr->add_option("--in", train_args.in, "Token-set file")->required();
  tr->add_option("--out", train_args.out, "Model file")->required();
  tr->add_option("--history", train_args.history, "History CSV (default: <out>.history.csv)");
  tr->add_option("--epochs", train_args.cfg.epochs)->capture_default_str();
  tr->add_option("--batch-size", train_args.cfg.batch_size)->capture_default_str();
  tr->add_option("--lr", train_args.cfg.peak_lr, "Peak learning rate")->capture_default_str();
  tr->add_option("--lgp", train_args.cfg.lgp_coefficient, "LGP coefficient")->capture_default_str();
  tr->add_option("--alpha", train_args.cfg.lgp.alpha)->capture_default_str();
  tr->add_option("--beta", train_args.cfg.lgp.beta)->capture_default_str();
  tr->add_flag("--literal-range", train_args.cfg.lgp.literal_range, "LGP over pairs 2..M-1 only");
  tr->add_option("--hidden", train_args.hidden, "Hidden sizes, comma separated")->capture_default_str();
  tr->add_option("--recon", train_args.recon, "l2 | l1")->capture_default_str();
  tr->add_option("--weight-decay", train_args.cfg.weight_decay)->capture_default_str();
  tr->add_option("--seed", train_args.cfg.seed)->capture_default_str();

  GridArgs grid_args;
  auto* grid = app.add_subcommand("ambiguity-grid", "Export keys on a grid over [0,1]^2");
  grid->add_option("--model", grid_args.model, "Model file");
  grid->add_option("--scheme", grid_args.scheme, "mean-squared | sum");
  grid->add_option("--res", grid_args.res, "Grid resolution")->capture_default_str();
  grid->add_option("--out", grid_args.out, "CSV file (default stdout)");

  AnalyzeArgs an_args;
  auto* an = app.add_subcommand("analyze", "Ambiguity analysis report");
  an->add_option("--in", an_args.in, "Token-set file")->required();
  an->add_option("--scheme", an_args.scheme, "mean-squared | lex | svd | sum | latent")->required();
  an->add_option("--model", an_args.model, "Model file for --scheme latent");
  an->add_option("--report", an_args.report, "JSON report file")->required();
  an->add_option("--samples", an_args.samples, "Pairs sampled for model constants")->capture_default_str();
  an->add_option("--seed", an_args.seed)->capture_default_str();

  MetricsArgs met_args;
  auto* met = app.add_subcommand("metrics", "Compare predictions with ground truth");
  met->add_option("--pred", met_args.pred, "Token-set or graph file")->required();
  met->add_option("--gt", met_args.gt, "Token-set or graph file")->required();
  met->add_option("--out", met_args.out, "CSV file (default stdout)");
  met->add_option("--match-tol", met_args.match_tol)->capture_default_str();
  met->add_option("--epsilon", met_args.sinkhorn.epsilon, "Sinkhorn regularization")->capture_default_str();
  met->add_option("--samples", met_args.sinkhorn.samples, "Points sampled per graph")->capture_default_str();

  TspArgs tsp_args;
  auto* tsp = app.add_subcommand("tsp-bench", "Percentage of open paths longer than the latent-sort path");
  tsp->add_option("--n", tsp_args.cfg.n_points)->capture_default_str();
  tsp->add_option("--runs", tsp_args.cfg.n_runs)->capture_default_str();
  tsp->add_option("--lgp", tsp_args.lgp, "on | off")->capture_default_str();
  tsp->add_option("--seed", tsp_args.cfg.seed)->capture_default_str();
  tsp->add_option("--corpus", tsp_args.cfg.corpus_size, "Training sets per run")->capture_default_str();
  tsp->add_option("--epochs", tsp_args.cfg.train.epochs)->capture_default_str();
  tsp->add_option("--out", tsp_args.out, "CSV file (default stdout)");

  PlanarArgs pl_args;
  auto* pl = app.add_subcommand("gen-planar", "Generate planar graphs");
  pl->add_option("--count", pl_args.count)->capture_default_str();
  pl->add_option("--seed", pl_args.cfg.seed)->capture_default_str();
  pl->add_option("--n-init", pl_args.cfg.n_init)->capture_default_str();
  pl->add_option("--collapse", pl_args.cfg.collapse_distance)->capture_default_str();
  pl->add_option("--angle", pl_args.cfg.min_edge_angle_degrees)->capture_default_str();
  pl->add_option("--out", pl_args.out, "Graph file (default stdout)");

  UniformArgs un_args;
  auto* un = app.add_subcommand("gen-sets", "Generate uniform random token sets");
  un->add_option("--m", un_args.m, "Tokens per set")->capture_default_str();
  un->add_option("--n", un_args.n, "Token dimension")->capture_default_str();
  un->add_option("--count", un_args.count)->capture_default_str();
  un->add_option("--seed", un_args.seed)->capture_default_str();
  un->add_option("--out", un_args.out, "Token-set file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sort) run_sort(sort_args);
    if (*tr) run_train(train_args);
    if (*grid) run_grid(grid_args);
    if (*an) run_analyze(an_args);
    if (*met) run_metrics(met_args);
    if (*tsp) run_tsp(tsp_args);
    if (*pl) run_planar(pl_args);
    if (*un) run_uniform(un_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
