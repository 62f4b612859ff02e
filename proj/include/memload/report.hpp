#ifndef MEMLOAD_REPORT_HPP
#define MEMLOAD_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "memload/dataset.hpp"
#include "memload/lmm.hpp"

namespace memload {

// Five-number summary (plus mean/sd) of memory_load for one language.
// Quantiles use linear interpolation on the sorted sample: at probability q
// the value is v[floor(h)] + frac(h) * (v[floor(h)+1] - v[floor(h)]) with
// h = (n - 1) q.
struct LanguageSummary {
  std::string language;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample sd (n-1 divisor); 0 for a single row
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

// One summary per language, sorted by language code. Plot-ready replacement
// for per-language violins.
std::vector<LanguageSummary> language_distributions(const Dataset& dataset);

struct ObsPredRow {
  std::string language;
  double observed_mean = 0.0;
  double predicted_mean = 0.0;  // conditional predictions (with BLUPs)
  double abs_gap = 0.0;
};

// Per-language mean observed vs mean predicted memory load.
std::vector<ObsPredRow> observed_vs_predicted(const Dataset& dataset, const FitDocument& doc);

struct MarginalPoint {
  double x = 0.0;
  double y_hat = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;
};

// Marginal-effect line for one fixed term: a grid over the term's observed
// range with the other fixed terms held at their dataset means. The band is
// +- 1.96 SE(beta_term) |x - mean(term)| around the line (single-coefficient
// SE; the covariance row is deliberately not used).
std::vector<MarginalPoint> marginal_effect_lines(const Dataset& dataset,
                                                 const FitDocument& doc,
                                                 const std::string& term,
                                                 std::size_t grid_size);

// File emitters (6-significant-digit decimal formatting, LF endings).
std::string violin_csv(const std::vector<LanguageSummary>& summaries);
std::string obs_vs_pred_csv(const std::vector<ObsPredRow>& rows);
std::string marginal_csv(const std::vector<MarginalPoint>& points);

// Writes violin.csv, obs_vs_pred.csv and marginal_<term>.csv for every fixed
// term into `out_dir`. Returns the paths written.
std::vector<std::filesystem::path> write_report_files(const Dataset& dataset,
                                                      const FitDocument& doc,
                                                      const std::filesystem::path& out_dir);

// One-screen text summary: coefficients with z and p, variance components,
// and the fit statistics.
std::string text_summary(const FitDocument& doc);

// summary.csv body for the inference table.
std::string summary_csv(const FitDocument& doc);

}  // namespace memload

#endif  // MEMLOAD_REPORT_HPP
