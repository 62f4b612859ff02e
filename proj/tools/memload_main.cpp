#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "memload/csv.hpp"
#include "memload/dataset.hpp"
#include "memload/lmm.hpp"
#include "memload/numfmt.hpp"
#include "memload/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kDefaultFormula =
    "memory_load ~ dependency_length + intervener_complexity + sentence_length + (1|language)";

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  fs::path manifest;
  std::size_t per_language_target = 500;
  std::optional<std::uint64_t> seed;
  bool strict = false;
  std::string formula = kDefaultFormula;
  fs::path out_dir = "out";
  fs::path features_csv;  // empty -> out_dir/features.csv
  fs::path fit_json;      // empty -> out_dir/fit.json
  memload::MetricConfig metrics;

  fs::path features_path() const {
    return features_csv.empty() ? out_dir / "features.csv" : features_csv;
  }
  fs::path fit_path() const { return fit_json.empty() ? out_dir / "fit.json" : fit_json; }
};

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

void load_config_file(const fs::path& path, RunConfig& cfg) {
  if (!fs::exists(path)) throw memload::IoError("config not found: " + path.string());
  json doc;
  try {
    doc = json::parse(memload::read_text_file(path));
  } catch (const json::exception& e) {
    throw memload::IoError("config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object())
    throw memload::IoError("config " + path.string() + ": expected a JSON object");

  const fs::path base = path.parent_path();
  static const std::set<std::string> known = {
      "manifest", "per_language_target", "seed",        "strict",
      "formula",  "out_dir",             "features_csv", "fit_json",
      "metrics"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key))
      std::cerr << "warning: unknown config key '" << key << "' ignored\n";
  }

  if (doc.contains("manifest")) cfg.manifest = resolve(base, doc["manifest"].get<std::string>());
  if (doc.contains("per_language_target"))
    cfg.per_language_target = doc["per_language_target"].get<std::size_t>();
  if (doc.contains("seed") && !doc["seed"].is_null())
    cfg.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("strict")) cfg.strict = doc["strict"].get<bool>();
  if (doc.contains("formula")) cfg.formula = doc["formula"].get<std::string>();
  if (doc.contains("out_dir")) cfg.out_dir = resolve(base, doc["out_dir"].get<std::string>());
  if (doc.contains("features_csv"))
    cfg.features_csv = resolve(base, doc["features_csv"].get<std::string>());
  if (doc.contains("fit_json")) cfg.fit_json = resolve(base, doc["fit_json"].get<std::string>());

  if (doc.contains("metrics")) {
    const json& m = doc["metrics"];
    if (m.contains("nominal_deprels")) {
      cfg.metrics.nominal_deprels.clear();
      for (const auto& s : m["nominal_deprels"]) cfg.metrics.nominal_deprels.insert(s.get<std::string>());
    }
    if (m.contains("clausal_upos")) {
      cfg.metrics.clausal_upos.clear();
      for (const auto& s : m["clausal_upos"]) cfg.metrics.clausal_upos.insert(s.get<std::string>());
    }
    if (m.contains("intervener_mode")) {
      const std::string mode = m["intervener_mode"].get<std::string>();
      if (mode == "heads_only")
        cfg.metrics.intervener_mode = memload::IntervenerMode::kHeadsOnly;
      else if (mode == "all_nodes")
        cfg.metrics.intervener_mode = memload::IntervenerMode::kAllNodes;
      else
        throw memload::IoError("config: intervener_mode must be 'heads_only' or 'all_nodes'");
    }
    if (cfg.metrics.nominal_deprels.empty() || cfg.metrics.clausal_upos.empty())
      throw memload::IoError("config: metric label sets must be non-empty");
  }
}

ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["manifest"] = cfg.manifest.string();
  j["per_language_target"] = cfg.per_language_target;
  if (cfg.seed)
    j["seed"] = *cfg.seed;
  else
    j["seed"] = nullptr;
  j["strict"] = cfg.strict;
  j["formula"] = cfg.formula;
  j["out_dir"] = cfg.out_dir.string();
  j["features_csv"] = cfg.features_path().string();
  j["fit_json"] = cfg.fit_path().string();
  ordered_json m;
  m["nominal_deprels"] = cfg.metrics.nominal_deprels;
  m["clausal_upos"] = cfg.metrics.clausal_upos;
  m["intervener_mode"] = cfg.metrics.intervener_mode == memload::IntervenerMode::kHeadsOnly
                             ? "heads_only"
                             : "all_nodes";
  j["metrics"] = m;
  return j;
}

void require_seed(const RunConfig& cfg) {
  if (!cfg.seed)
    throw memload::IoError("a seed is required (--seed or config \"seed\"); "
                           "sampling is never seeded from the clock");
}

memload::CorpusManifest load_manifest_checked(const RunConfig& cfg) {
  if (cfg.manifest.empty())
    throw memload::IoError("a manifest is required (--manifest or config \"manifest\")");
  return memload::load_manifest(cfg.manifest, cfg.per_language_target, *cfg.seed);
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw memload::IoError("cannot write file: " + path.string());
  out << body;
  if (!out) throw memload::IoError("write failed: " + path.string());
}

void emit_warnings(const memload::Provenance& prov) {
  for (const std::string& w : prov.warnings) std::cerr << "warning: " << w << "\n";
}

ordered_json provenance_to_json(const memload::Provenance& prov, std::size_t row_count,
                                const RunConfig& cfg) {
  ordered_json j;
  j["seed"] = prov.seed;
  j["config_digest"] = cfg.metrics.digest();
  j["per_language_target"] = cfg.per_language_target;
  j["rows"] = row_count;
  ordered_json langs;
  for (const auto& [code, lp] : prov.per_language) {
    langs[code] = {{"available", lp.available},
                   {"sampled", lp.sampled},
                   {"skipped", lp.skipped},
                   {"shortfall", lp.shortfall}};
  }
  j["languages"] = std::move(langs);
  j["warnings"] = prov.warnings;
  return j;
}

int cmd_extract(const RunConfig& cfg) {
  require_seed(cfg);
  const memload::CorpusManifest manifest = load_manifest_checked(cfg);
  const auto policy =
      cfg.strict ? memload::ParsePolicy::kStrict : memload::ParsePolicy::kLenient;

  memload::Provenance prov;
  std::vector<memload::ExtractedSentence> sentences;
  try {
    sentences = memload::extract_sentences(manifest, policy, &prov);
  } catch (const memload::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  emit_warnings(prov);

  std::string csv = "language,sent_id,text\n";
  for (const auto& s : sentences) {
    csv += memload::csv_escape(s.language);
    csv += ',';
    csv += memload::csv_escape(s.sent_id);
    csv += ',';
    csv += memload::csv_escape(s.text);
    csv += '\n';
  }
  fs::create_directories(cfg.out_dir);
  const fs::path out = cfg.out_dir / "corpus.csv";
  write_text(out, csv);
  std::cerr << "extract: wrote " << sentences.size() << " sentences to " << out.string()
            << "\n";
  return 0;
}

int cmd_featurize(const RunConfig& cfg) {
  require_seed(cfg);
  const memload::CorpusManifest manifest = load_manifest_checked(cfg);
  const auto policy =
      cfg.strict ? memload::ParsePolicy::kStrict : memload::ParsePolicy::kLenient;

  memload::Dataset ds;
  try {
    ds = memload::assemble(manifest, cfg.metrics, policy);
  } catch (const memload::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  emit_warnings(ds.provenance);

  fs::create_directories(cfg.out_dir);
  memload::write_csv(ds, cfg.features_path());
  write_text(cfg.out_dir / "featurize_log.json",
             provenance_to_json(ds.provenance, ds.rows.size(), cfg).dump(2) + "\n");
  std::cerr << "featurize: wrote " << ds.rows.size() << " rows to "
            << cfg.features_path().string() << "\n";
  return 0;
}

int cmd_fit(const RunConfig& cfg) {
  memload::Dataset ds = memload::read_csv(cfg.features_path());
  const memload::ModelSpec spec = memload::parse_formula(cfg.formula);

  memload::FitDocument doc;
  doc.spec = spec;
  try {
    const memload::DesignData d = memload::build_design(ds, spec);
    doc.fit = memload::fit_reml(d);
    doc.conditional = memload::fit_statistics(d.y, memload::predict(doc.fit, d, true));
    doc.marginal = memload::fit_statistics(d.y, memload::predict(doc.fit, d, false));
  } catch (const memload::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  fs::create_directories(cfg.out_dir);
  memload::save_fit(doc, cfg.fit_path());
  write_text(cfg.out_dir / "summary.csv", memload::summary_csv(doc));
  std::cerr << "fit: converged in " << doc.fit.iterations << " evaluations"
            << (doc.fit.boundary ? " (boundary: sigma2_b = 0)" : "") << "; wrote "
            << cfg.fit_path().string() << "\n";
  return 0;
}

int cmd_report(const RunConfig& cfg) {
  memload::Dataset ds = memload::read_csv(cfg.features_path());
  memload::FitDocument doc = memload::load_fit(cfg.fit_path());

  // Schema consistency: the fit's columns must exist in the features table.
  try {
    memload::build_design(ds, doc.spec);
  } catch (const memload::FitError& e) {
    throw memload::IoError(std::string("features/fit mismatch: ") + e.what());
  }

  try {
    memload::write_report_files(ds, doc, cfg.out_dir);
  } catch (const memload::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  std::cout << memload::text_summary(doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"syntactic memory-load pipeline over CoNLL-U treebanks"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::size_t> per_lang_flag;
  std::optional<std::string> formula_flag;
  std::optional<std::string> out_flag;
  std::optional<std::string> manifest_flag;
  std::optional<std::string> features_flag;
  std::optional<std::string> fit_flag;
  bool strict_flag = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed_flag, "sampling seed (required for extract/featurize)");
    sub->add_option("--per-lang", per_lang_flag, "sentences sampled per language");
    sub->add_flag("--strict", strict_flag, "abort on malformed or invalid sentences");
    sub->add_option("--formula", formula_flag, "model formula");
    sub->add_option("--out", out_flag, "output directory");
    sub->add_option("--manifest", manifest_flag, "corpus manifest JSON");
    sub->add_option("--features", features_flag, "features CSV path");
    sub->add_option("--fit", fit_flag, "fit JSON path");
  };

  CLI::App* sub_print = app.add_subcommand("print-config", "print the effective configuration");
  CLI::App* sub_extract =
      app.add_subcommand("extract", "sample sentences and write their raw text");
  CLI::App* sub_featurize =
      app.add_subcommand("featurize", "sample, featurize and write the analysis table");
  CLI::App* sub_fit = app.add_subcommand("fit", "fit the mixed model on a features CSV");
  CLI::App* sub_report = app.add_subcommand("report", "write plot-ready report files");
  for (CLI::App* sub : {sub_print, sub_extract, sub_featurize, sub_fit, sub_report})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) load_config_file(config_path, cfg);
    if (seed_flag) cfg.seed = *seed_flag;
    if (per_lang_flag) cfg.per_language_target = *per_lang_flag;
    if (strict_flag) cfg.strict = true;
    if (formula_flag) cfg.formula = *formula_flag;
    if (out_flag) cfg.out_dir = *out_flag;
    if (manifest_flag) cfg.manifest = *manifest_flag;
    if (features_flag) cfg.features_csv = *features_flag;
    if (fit_flag) cfg.fit_json = *fit_flag;

    if (sub_print->parsed()) {
      std::cout << config_to_json(cfg).dump(2) << "\n";
      return 0;
    }
    if (sub_extract->parsed()) return cmd_extract(cfg);
    if (sub_featurize->parsed()) return cmd_featurize(cfg);
    if (sub_fit->parsed()) return cmd_fit(cfg);
    if (sub_report->parsed()) return cmd_report(cfg);
  } catch (const memload::FormulaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const memload::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const memload::DatasetError& e) {
    // Bad manifest/CSV inputs are usage-class problems.
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const memload::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
