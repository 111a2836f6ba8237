#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "latsort/analysis.hpp"
#include "latsort/datagen.hpp"
#include "latsort/latent_sort.hpp"
#include "latsort/metrics.hpp"
#include "latsort/sorters.hpp"
#include "latsort/tokenize.hpp"
#include "latsort/tspbench.hpp"
#include "latsort/version.hpp"

namespace py = pybind11;
using namespace latsort;

namespace {

py::dict seq_dict(const SortedSequence& s) {
  py::dict d;
  d["tokens"] = s.rows;
  d["keys"] = s.keys ? py::cast(*s.keys) : py::none();
  d["order"] = s.order;
  return d;
}

SortedSequence seq_from(const std::vector<Token>& rows) {
  SortedSequence s;
  s.rows = rows;
  return s;
}

py::dict graph_dict(const Graph& g) {
  py::dict d;
  d["nodes"] = g.nodes();
  d["edges"] = g.edges();
  d["directed"] = g.directed();
  return d;
}

}  // namespace

PYBIND11_MODULE(latsort, m) {
  m.doc() = "Set-to-sequence sorting with learned latent keys";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "LatsortError", PyExc_ValueError);

  m.def(
      "sort",
      [](const std::string& scheme, const std::vector<Token>& tokens) {
        return seq_dict(sort_with_scheme(scheme, TokenSet(tokens)));
      },
      py::arg("scheme"), py::arg("tokens"), "Sort a token set with mean-squared, lex, svd or sum.");
  m.def(
      "sort_graph",
      [](const std::string& scheme, const std::vector<Token>& nodes, const std::vector<Edge>& edges, bool directed) {
        Graph g(nodes, edges, directed);
        if (scheme == "bfs") return seq_dict(bfs_sort(g));
        if (scheme == "dfs") return seq_dict(dfs_sort(g));
        throw Error("graph schemes are bfs and dfs");
      },
      py::arg("scheme"), py::arg("nodes"), py::arg("edges"), py::arg("directed") = false);
  m.def(
      "tokenize_edges",
      [](const std::vector<Token>& nodes, const std::vector<Edge>& edges, bool directed) {
        return tokenize_edges(Graph(nodes, edges, directed)).tokens();
      },
      py::arg("nodes"), py::arg("edges"), py::arg("directed") = false);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("peak_lr", &TrainConfig::peak_lr)
      .def_readwrite("lgp_coefficient", &TrainConfig::lgp_coefficient)
      .def_property(
          "alpha", [](const TrainConfig& c) { return c.lgp.alpha; }, [](TrainConfig& c, double v) { c.lgp.alpha = v; })
      .def_property(
          "beta", [](const TrainConfig& c) { return c.lgp.beta; }, [](TrainConfig& c, double v) { c.lgp.beta = v; })
      .def_readwrite("weight_decay", &TrainConfig::weight_decay)
      .def_readwrite("hidden_sizes", &TrainConfig::hidden_sizes)
      .def_readwrite("seed", &TrainConfig::seed);

  py::class_<LatentSortModel>(m, "Model")
      .def_static(
          "init",
          [](std::size_t dim, const std::vector<int>& hidden, std::uint64_t seed) { return init_model(dim, hidden, seed); },
          py::arg("token_dim"), py::arg("hidden_sizes"), py::arg("seed") = 0)
      .def_static("load", [](const std::string& path) { return load_model(path); })
      .def("save", [](const LatentSortModel& mdl, const std::string& path) { save_model(mdl, path); })
      .def("to_json", &model_to_json)
      .def_readonly("token_dim", &LatentSortModel::token_dim)
      .def("encode", &encode)
      .def("decode", &decode)
      .def("sort",
           [](const LatentSortModel& mdl, const std::vector<Token>& tokens) {
             return seq_dict(latent_sort(mdl, TokenSet(tokens)));
           });

  m.def(
      "train",
      [](const std::vector<std::vector<Token>>& sets, const TrainConfig& cfg) {
        std::vector<TokenSet> data;
        for (const auto& s : sets) data.emplace_back(s);
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train(data, cfg);
        }
        py::list hist;
        for (const auto& e : r.history) {
          py::dict d;
          d["epoch"] = e.epoch;
          d["recon"] = e.recon;
          d["lgp"] = e.lgp;
          d["total"] = e.total;
          d["lr"] = e.lr;
          hist.append(d);
        }
        return py::make_tuple(r.model, hist);
      },
      py::arg("sets"), py::arg("config") = TrainConfig{}, "Train a latent-sort model; returns (model, history).");

  m.def(
      "ambiguity_sets",
      [](const std::vector<Token>& tokens, const std::vector<double>& keys, double tol) {
        return ambiguity_sets(TokenSet(tokens), keys, tol);
      },
      py::arg("tokens"), py::arg("keys"), py::arg("tol") = kAmbiguityTol);
  m.def(
      "ambiguity_error",
      [](const std::vector<Token>& rows, const Groups& g) { return ambiguity_error(seq_from(rows), g); },
      py::arg("rows"), py::arg("groups"));
  m.def("uniform_ambiguity_P", &uniform_ambiguity_P, py::arg("groups"), py::arg("m"));
  m.def(
      "sorting_error",
      [](const Eigen::MatrixXd& P, const std::vector<Token>& rows) { return sorting_error(P, seq_from(rows)); },
      py::arg("P"), py::arg("rows"));
  m.def("swap_probability", &swap_probability);
  m.def(
      "rank_probability_matrix",
      [](const std::vector<double>& mean, const std::vector<double>& var, bool normalize) {
        return rank_probability_matrix({mean, var}, normalize);
      },
      py::arg("mean"), py::arg("var"), py::arg("normalize_rows") = false);
  m.def(
      "tridiagonal_P",
      [](const std::vector<double>& mean, const std::vector<double>& var) { return tridiagonal_P({mean, var}); },
      py::arg("mean"), py::arg("var"));
  m.def(
      "neighbor_error_bound",
      [](const std::vector<Token>& rows, const Eigen::MatrixXd& P) {
        const auto b = neighbor_error_bound(seq_from(rows), P);
        py::dict d;
        d["exact"] = b.exact;
        d["upper"] = b.upper;
        d["split"] = b.split;
        return d;
      },
      py::arg("rows"), py::arg("P"));

  m.def(
      "emd", [](const std::vector<Token>& x, const std::vector<Token>& y) { return emd(TokenSet(x), TokenSet(y)); });
  m.def(
      "ehd", [](const std::vector<Token>& x, const std::vector<Token>& y) { return ehd(TokenSet(x), TokenSet(y)); });
  m.def(
      "set_prf",
      [](const std::vector<Token>& x, const std::vector<Token>& y, double tol) {
        const auto r = set_prf(TokenSet(x), TokenSet(y), tol);
        return py::make_tuple(r.precision, r.recall, r.f1);
      },
      py::arg("x"), py::arg("y"), py::arg("match_tol") = 0.0);
  m.def(
      "smd",
      [](const py::dict& a, const py::dict& b, double epsilon, std::size_t samples) {
        auto to_graph = [](const py::dict& d) {
          return Graph(d["nodes"].cast<std::vector<Token>>(), d["edges"].cast<std::vector<Edge>>(),
                       d.contains("directed") && d["directed"].cast<bool>());
        };
        SinkhornConfig cfg;
        cfg.epsilon = epsilon;
        cfg.samples = samples;
        return smd(to_graph(a), to_graph(b), cfg);
      },
      py::arg("a"), py::arg("b"), py::arg("epsilon") = 0.01, py::arg("samples") = 100);

  m.def(
      "path_length",
      [](const std::vector<Token>& pts, const std::vector<std::size_t>& order) {
        return path_length(TokenSet(pts), order);
      });
  m.def(
      "percentile_longer",
      [](const std::vector<Token>& pts, const std::vector<std::size_t>& order) {
        return percentile_longer(TokenSet(pts), order);
      });
  m.def(
      "tsp_benchmark",
      [](int n, int runs, bool with_lgp, std::uint64_t seed, int corpus, int epochs) {
        TspBenchConfig cfg;
        cfg.n_points = n;
        cfg.n_runs = runs;
        cfg.with_lgp = with_lgp;
        cfg.seed = seed;
        cfg.corpus_size = corpus;
        if (epochs >= 0) cfg.train.epochs = epochs;
        TspBenchResult r;
        {
          py::gil_scoped_release release;
          r = run_tsp_benchmark(cfg);
        }
        return py::make_tuple(r.mean, r.std, r.percentiles);
      },
      py::arg("n") = 8, py::arg("runs") = 10, py::arg("with_lgp") = true, py::arg("seed") = 0,
      py::arg("corpus") = 2000, py::arg("epochs") = -1, "Returns (mean, std, per-run percentiles).");

  m.def(
      "generate_planar_graph",
      [](std::uint64_t seed, int n_init, double collapse, double angle) {
        PlanarGenConfig cfg;
        cfg.seed = seed;
        cfg.n_init = n_init;
        cfg.collapse_distance = collapse;
        cfg.min_edge_angle_degrees = angle;
        return graph_dict(generate_planar_graph(cfg));
      },
      py::arg("seed") = 0, py::arg("n_init") = 15, py::arg("collapse_distance") = 0.1,
      py::arg("min_edge_angle_degrees") = 30.0);
  m.def(
      "generate_uniform_sets",
      [](std::size_t mm, std::size_t n, std::size_t count, std::uint64_t seed) {
        std::vector<std::vector<Token>> out;
        for (const auto& s : generate_uniform_sets(mm, n, count, seed)) out.push_back(s.tokens());
        return out;
      },
      py::arg("m"), py::arg("n"), py::arg("count"), py::arg("seed") = 0);
  m.def(
      "delaunay",
      [](const std::vector<Point2>& pts) {
        const auto t = delaunay(pts);
        return py::make_tuple(t.points, t.triangles);
      },
      "Returns (deduplicated points, counter-clockwise triangles).");
}
