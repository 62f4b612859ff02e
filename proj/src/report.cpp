#include "memload/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "memload/csv.hpp"
#include "memload/numfmt.hpp"

namespace memload {
namespace {

double quantile_linear(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = static_cast<double>(n - 1) * q;
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::map<std::string, std::vector<std::size_t>> rows_by_language(const Dataset& dataset) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < dataset.rows.size(); ++i)
    out[dataset.rows[i].language].push_back(i);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path.string());
  out << body;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::vector<LanguageSummary> language_distributions(const Dataset& dataset) {
  if (dataset.rows.empty()) throw DatasetError("language_distributions: empty dataset");
  std::vector<LanguageSummary> out;
  for (const auto& [language, idx] : rows_by_language(dataset)) {
    std::vector<double> v;
    v.reserve(idx.size());
    for (std::size_t i : idx) v.push_back(static_cast<double>(dataset.rows[i].memory_load));
    std::sort(v.begin(), v.end());

    LanguageSummary s;
    s.language = language;
    s.n = v.size();
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    s.min = v.front();
    s.q1 = quantile_linear(v, 0.25);
    s.median = quantile_linear(v, 0.5);
    s.q3 = quantile_linear(v, 0.75);
    s.max = v.back();
    out.push_back(std::move(s));
  }
  return out;  // std::map iteration is already sorted by language
}

std::vector<ObsPredRow> observed_vs_predicted(const Dataset& dataset, const FitDocument& doc) {
  const DesignData d = build_design(dataset, doc.spec);
  const Eigen::VectorXd pred = predict(doc.fit, d, /*conditional=*/true);

  std::vector<ObsPredRow> out;
  for (const auto& [language, idx] : rows_by_language(dataset)) {
    ObsPredRow r;
    r.language = language;
    double obs = 0.0, prd = 0.0;
    for (std::size_t i : idx) {
      obs += d.y(static_cast<Eigen::Index>(i));
      prd += pred(static_cast<Eigen::Index>(i));
    }
    r.observed_mean = obs / static_cast<double>(idx.size());
    r.predicted_mean = prd / static_cast<double>(idx.size());
    r.abs_gap = std::abs(r.observed_mean - r.predicted_mean);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MarginalPoint> marginal_effect_lines(const Dataset& dataset, const FitDocument& doc,
                                                 const std::string& term,
                                                 std::size_t grid_size) {
  const auto& terms = doc.spec.fixed_terms;
  const auto it = std::find(terms.begin(), terms.end(), term);
  if (it == terms.end()) throw FitError("marginal_effect_lines: unknown term '" + term + "'");
  const Eigen::Index term_col = 1 + (it - terms.begin());  // after the intercept
  if (grid_size < 2) throw FitError("marginal_effect_lines: grid_size must be >= 2");

  const DesignData d = build_design(dataset, doc.spec);
  const Eigen::VectorXd col_means = d.X.colwise().mean();
  const double x_min = d.X.col(term_col).minCoeff();
  const double x_max = d.X.col(term_col).maxCoeff();
  const double x_bar = col_means(term_col);

  // Baseline: intercept plus every other term at its dataset mean.
  double base = doc.fit.beta(0);
  for (Eigen::Index j = 1; j < d.n_fixed(); ++j) {
    if (j == term_col) continue;
    base += doc.fit.beta(j) * col_means(j);
  }
  const double slope = doc.fit.beta(term_col);
  const double se = std::sqrt(doc.fit.beta_cov(term_col, term_col));

  std::vector<MarginalPoint> out;
  out.reserve(grid_size);
  for (std::size_t k = 0; k < grid_size; ++k) {
    MarginalPoint p;
    p.x = x_min + (x_max - x_min) * static_cast<double>(k) /
                      static_cast<double>(grid_size - 1);
    p.y_hat = base + slope * p.x;
    const double half = 1.96 * se * std::abs(p.x - x_bar);
    p.y_lo = p.y_hat - half;
    p.y_hi = p.y_hat + half;
    out.push_back(p);
  }
  return out;
}

std::string violin_csv(const std::vector<LanguageSummary>& summaries) {
  std::string out = "language,n,mean,sd,min,q1,median,q3,max\n";
  for (const LanguageSummary& s : summaries) {
    out += csv_escape(s.language);
    out += ',' + std::to_string(s.n);
    out += ',' + format_sig(s.mean);
    out += ',' + format_sig(s.sd);
    out += ',' + format_sig(s.min);
    out += ',' + format_sig(s.q1);
    out += ',' + format_sig(s.median);
    out += ',' + format_sig(s.q3);
    out += ',' + format_sig(s.max);
    out += '\n';
  }
  return out;
}

std::string obs_vs_pred_csv(const std::vector<ObsPredRow>& rows) {
  std::string out = "language,observed_mean,predicted_mean,abs_gap\n";
  for (const ObsPredRow& r : rows) {
    out += csv_escape(r.language);
    out += ',' + format_sig(r.observed_mean);
    out += ',' + format_sig(r.predicted_mean);
    out += ',' + format_sig(r.abs_gap);
    out += '\n';
  }
  return out;
}

std::string marginal_csv(const std::vector<MarginalPoint>& points) {
  std::string out = "x,y_hat,y_lo,y_hi\n";
  for (const MarginalPoint& p : points) {
    out += format_sig(p.x);
    out += ',' + format_sig(p.y_hat);
    out += ',' + format_sig(p.y_lo);
    out += ',' + format_sig(p.y_hi);
    out += '\n';
  }
  return out;
}

std::vector<std::filesystem::path> write_report_files(const Dataset& dataset,
                                                      const FitDocument& doc,
                                                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  const auto violin_path = out_dir / "violin.csv";
  write_file(violin_path, violin_csv(language_distributions(dataset)));
  written.push_back(violin_path);

  const auto ovp_path = out_dir / "obs_vs_pred.csv";
  write_file(ovp_path, obs_vs_pred_csv(observed_vs_predicted(dataset, doc)));
  written.push_back(ovp_path);

  for (const std::string& term : doc.spec.fixed_terms) {
    const auto path = out_dir / ("marginal_" + term + ".csv");
    write_file(path, marginal_csv(marginal_effect_lines(dataset, doc, term, 50)));
    written.push_back(path);
  }
  return written;
}

std::string summary_csv(const FitDocument& doc) {
  std::string out = "term,estimate,std_error,z_value,p_value,ci_low,ci_high\n";
  for (const SummaryRow& r : summarize(doc.fit)) {
    out += csv_escape(r.term);
    out += ',' + format_sig(r.estimate);
    out += ',' + format_sig(r.std_error);
    out += ',' + format_sig(r.z);
    out += ',' + format_sig(r.p);
    out += ',' + format_sig(r.ci_low);
    out += ',' + format_sig(r.ci_high);
    out += '\n';
  }
  out += "sigma2_b," + format_sig(doc.fit.sigma2_b) + ",,,,,\n";
  out += "sigma2_e," + format_sig(doc.fit.sigma2_e) + ",,,,,\n";
  out += "reml_criterion," + format_sig(doc.fit.reml_criterion) + ",,,,,\n";
  return out;
}

std::string text_summary(const FitDocument& doc) {
  std::string out;
  out += "Model: " + render_formula(doc.spec) + "\n";
  out += "N = " + std::to_string(doc.fit.n_obs) +
         ", groups = " + std::to_string(doc.fit.n_groups) +
         ", REML criterion = " + format_sig(doc.fit.reml_criterion) + "\n\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-24s %12s %12s %10s %12s\n", "term", "estimate",
                "std_error", "z", "p");
  out += line;
  for (const SummaryRow& r : summarize(doc.fit)) {
    std::snprintf(line, sizeof(line), "%-24s %12s %12s %10s %12s\n", r.term.c_str(),
                  format_sig(r.estimate).c_str(), format_sig(r.std_error).c_str(),
                  format_sig(r.z, 4).c_str(), format_sig(r.p, 3).c_str());
    out += line;
  }
  out += "\nGroup Var (sigma2_b) = " + format_sig(doc.fit.sigma2_b) +
         ", Residual Var (sigma2_e) = " + format_sig(doc.fit.sigma2_e) + "\n";
  if (doc.fit.boundary)
    out += "note: variance ratio converged to the lower boundary (sigma2_b = 0)\n";
  out += "R2 (conditional) = " + format_sig(doc.conditional.r2) +
         ", MSE = " + format_sig(doc.conditional.mse) +
         ", MAE = " + format_sig(doc.conditional.mae) + "\n";
  out += "R2 (marginal)    = " + format_sig(doc.marginal.r2) +
         ", MSE = " + format_sig(doc.marginal.mse) +
         ", MAE = " + format_sig(doc.marginal.mae) + "\n";
  return out;
}

}  // namespace memload
