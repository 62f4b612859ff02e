// Python bindings for the memload core: CoNLL-U parsing, the sentence-level
// measures, dataset assembly and the REML mixed-model fitter.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "memload/conllu.hpp"
#include "memload/dataset.hpp"
#include "memload/depgraph.hpp"
#include "memload/formula.hpp"
#include "memload/lmm.hpp"
#include "memload/metrics.hpp"
#include "memload/report.hpp"

namespace py = pybind11;
using namespace memload;

namespace {

MetricConfig make_config(const std::vector<std::string>& nominal,
                         const std::vector<std::string>& clausal,
                         const std::string& intervener_mode) {
  MetricConfig cfg;
  if (!nominal.empty()) cfg.nominal_deprels = {nominal.begin(), nominal.end()};
  if (!clausal.empty()) cfg.clausal_upos = {clausal.begin(), clausal.end()};
  if (intervener_mode == "heads_only")
    cfg.intervener_mode = IntervenerMode::kHeadsOnly;
  else if (intervener_mode == "all_nodes")
    cfg.intervener_mode = IntervenerMode::kAllNodes;
  else
    throw py::value_error("intervener_mode must be 'heads_only' or 'all_nodes'");
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sentence-level syntactic memory-load measures and a random-intercept "
            "REML mixed-model fitter over CoNLL-U treebanks.";

  py::register_exception<FormulaError>(m, "FormulaSyntaxError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ConlluParseError", PyExc_ValueError);
  py::register_exception<Error>(m, "MemloadError", PyExc_RuntimeError);

  py::class_<TokenRow>(m, "TokenRow")
      .def_readonly("id", &TokenRow::id)
      .def_readonly("form", &TokenRow::form)
      .def_readonly("lemma", &TokenRow::lemma)
      .def_readonly("upos", &TokenRow::upos)
      .def_readonly("head", &TokenRow::head)
      .def_readonly("deprel", &TokenRow::deprel)
      .def("__repr__", [](const TokenRow& t) {
        return "TokenRow(id=" + std::to_string(t.id) + ", form='" + t.form + "', head=" +
               std::to_string(t.head) + ", deprel='" + t.deprel + "')";
      });

  py::class_<SentenceRecord>(m, "SentenceRecord")
      .def_readonly("language", &SentenceRecord::language)
      .def_readonly("sent_id", &SentenceRecord::sent_id)
      .def_readonly("tokens", &SentenceRecord::tokens)
      .def_readonly("mwt_spans", &SentenceRecord::mwt_spans)
      .def_readonly("empty_nodes", &SentenceRecord::empty_nodes)
      .def_property_readonly("metadata",
                             [](const SentenceRecord& r) {
                               py::dict d;
                               for (const auto& [k, v] : r.metadata) d[py::str(k)] = v;
                               return d;
                             })
      .def_property_readonly("text", &sentence_text)
      .def("__len__", [](const SentenceRecord& r) { return r.tokens.size(); });

  m.def(
      "parse_conllu",
      [](const std::string& text, const std::string& language, bool strict) {
        return parse_document(text, language,
                              strict ? ParsePolicy::kStrict : ParsePolicy::kLenient);
      },
      py::arg("text"), py::arg("language") = "und", py::arg("strict") = false,
      "Parse CoNLL-U text into sentence records.");

  py::class_<DepGraph>(m, "DepGraph")
      .def_readonly("n", &DepGraph::n)
      .def_readonly("arcs", &DepGraph::arcs)
      .def_readonly("root", &DepGraph::root)
      .def_readonly("head", &DepGraph::head)
      .def_readonly("upos", &DepGraph::upos)
      .def_readonly("deprel", &DepGraph::deprel);

  m.def("build_graph", &build_graph, py::arg("record"));
  m.def("head_positions", &head_positions, py::arg("graph"));

  py::class_<MetricConfig>(m, "MetricConfig")
      .def(py::init(&make_config), py::arg("nominal_deprels") = std::vector<std::string>{},
           py::arg("clausal_upos") = std::vector<std::string>{},
           py::arg("intervener_mode") = "heads_only");

  py::class_<FeatureRow>(m, "FeatureRow")
      .def(py::init([](std::string language, std::string sent_id, long long memory_load,
                       long long dependency_length, long long intervener_complexity,
                       long long sentence_length) {
             return FeatureRow{std::move(language), std::move(sent_id),     memory_load,
                               dependency_length,   intervener_complexity, sentence_length};
           }),
           py::arg("language"), py::arg("sent_id"), py::arg("memory_load"),
           py::arg("dependency_length"), py::arg("intervener_complexity"),
           py::arg("sentence_length"))
      .def_readonly("language", &FeatureRow::language)
      .def_readonly("sent_id", &FeatureRow::sent_id)
      .def_readonly("memory_load", &FeatureRow::memory_load)
      .def_readonly("dependency_length", &FeatureRow::dependency_length)
      .def_readonly("intervener_complexity", &FeatureRow::intervener_complexity)
      .def_readonly("sentence_length", &FeatureRow::sentence_length);

  const MetricConfig default_cfg;
  m.def("dependency_length", &dependency_length, py::arg("graph"));
  m.def("intervener_complexity", &intervener_complexity, py::arg("graph"),
        py::arg("config") = default_cfg);
  m.def("feature_interference", &feature_interference, py::arg("graph"));
  m.def("feature_misbinding", &feature_misbinding, py::arg("graph"),
        py::arg("config") = default_cfg);
  m.def("memory_load", &memory_load, py::arg("graph"), py::arg("config") = default_cfg);
  m.def("sentence_length", &sentence_length, py::arg("graph"));
  m.def(
      "featurize",
      [](const SentenceRecord& record, const MetricConfig& cfg) { return featurize(record, cfg); },
      py::arg("record"), py::arg("config") = default_cfg);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def_readonly("response", &ModelSpec::response)
      .def_readonly("fixed_terms", &ModelSpec::fixed_terms)
      .def_readonly("group", &ModelSpec::group)
      .def("__repr__", [](const ModelSpec& s) { return render_formula(s); });
  m.def("parse_formula", &parse_formula, py::arg("text"));
  m.def("render_formula", &render_formula, py::arg("spec"));

  py::class_<LmmFit>(m, "LmmFit")
      .def_readonly("beta", &LmmFit::beta)
      .def_readonly("beta_cov", &LmmFit::beta_cov)
      .def_readonly("sigma2_e", &LmmFit::sigma2_e)
      .def_readonly("sigma2_b", &LmmFit::sigma2_b)
      .def_readonly("theta", &LmmFit::theta)
      .def_readonly("blups", &LmmFit::blups)
      .def_readonly("reml_criterion", &LmmFit::reml_criterion)
      .def_readonly("n_obs", &LmmFit::n_obs)
      .def_readonly("n_groups", &LmmFit::n_groups)
      .def_readonly("boundary", &LmmFit::boundary)
      .def_readonly("term_names", &LmmFit::term_names)
      .def_readonly("group_labels", &LmmFit::group_labels)
      .def("summary", [](const LmmFit& fit) {
        py::list rows;
        for (const SummaryRow& r : summarize(fit)) {
          py::dict d;
          d["term"] = r.term;
          d["estimate"] = r.estimate;
          d["std_error"] = r.std_error;
          d["z"] = r.z;
          d["p"] = r.p;
          d["ci_low"] = r.ci_low;
          d["ci_high"] = r.ci_high;
          rows.append(d);
        }
        return rows;
      });

  m.def(
      "fit_lmm",
      [](const std::vector<FeatureRow>& rows, const std::string& formula) {
        Dataset ds;
        ds.rows = rows;
        const ModelSpec spec = parse_formula(formula);
        return fit_reml(build_design(ds, spec));
      },
      py::arg("rows"), py::arg("formula"),
      "Fit the random-intercept model on feature rows by REML.");

  m.def(
      "fit_lmm_arrays",
      [](const Eigen::VectorXd& y, const Eigen::MatrixXd& x_terms,
         const std::vector<std::string>& groups) {
        if (y.size() != x_terms.rows() ||
            y.size() != static_cast<Eigen::Index>(groups.size()))
          throw py::value_error("y, x_terms and groups must have matching lengths");
        DesignData d;
        d.y = y;
        d.X = Eigen::MatrixXd::Ones(y.size(), x_terms.cols() + 1);
        d.X.rightCols(x_terms.cols()) = x_terms;
        d.term_names.push_back("(Intercept)");
        for (Eigen::Index j = 0; j < x_terms.cols(); ++j)
          d.term_names.push_back("x" + std::to_string(j + 1));
        std::map<std::string, int> code;
        for (const std::string& g : groups) {
          auto [it, inserted] = code.try_emplace(g, static_cast<int>(d.group_labels.size()));
          if (inserted) {
            d.group_labels.push_back(g);
            d.group_sizes.push_back(0);
          }
          d.groups.push_back(it->second);
          ++d.group_sizes[static_cast<std::size_t>(it->second)];
        }
        if (d.n_groups() < 2) throw py::value_error("need at least 2 groups");
        return fit_reml(d);
      },
      py::arg("y"), py::arg("x_terms"), py::arg("groups"),
      "Fit a random-intercept model from raw arrays (an intercept column is "
      "prepended to x_terms).");

  m.def(
      "fit_statistics",
      [](const Eigen::VectorXd& observed, const Eigen::VectorXd& predicted) {
        const FitStats s = fit_statistics(observed, predicted);
        py::dict d;
        d["r2"] = s.r2;
        d["mse"] = s.mse;
        d["mae"] = s.mae;
        return d;
      },
      py::arg("observed"), py::arg("predicted"));

  m.def(
      "read_features_csv",
      [](const std::filesystem::path& path) { return read_csv(path).rows; },
      py::arg("path"));
  m.def(
      "write_features_csv",
      [](const std::vector<FeatureRow>& rows, const std::filesystem::path& path) {
        Dataset ds;
        ds.rows = rows;
        write_csv(ds, path);
      },
      py::arg("rows"), py::arg("path"));

  m.attr("__version__") = "0.1.0";
}
