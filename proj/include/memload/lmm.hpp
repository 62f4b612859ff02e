#ifndef MEMLOAD_LMM_HPP
#define MEMLOAD_LMM_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "memload/dataset.hpp"
#include "memload/errors.hpp"
#include "memload/formula.hpp"

namespace memload {

// Response, fixed-effects design and group coding for a random-intercept model.
struct DesignData {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;  // first column all ones
  std::vector<int> groups;              // 0-based code per observation
  std::vector<int> group_sizes;         // per code
  std::vector<std::string> group_labels;  // code -> label, first-appearance order
  std::vector<std::string> term_names;    // "(Intercept)", then fixed terms

  Eigen::Index n_obs() const { return y.size(); }
  Eigen::Index n_fixed() const { return X.cols(); }
  int n_groups() const { return static_cast<int>(group_sizes.size()); }
};

// y and X from a dataset and a parsed formula: intercept column plus the fixed
// terms in formula order, raw unstandardized values; groups coded by first
// appearance. Requires every column to exist, >= 2 groups, N > p + 1 and a
// numerically full-rank X.
DesignData build_design(const Dataset& dataset, const ModelSpec& spec);

struct LmmFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd beta_cov;
  double sigma2_e = 0.0;
  double sigma2_b = 0.0;
  double theta = 0.0;  // sigma2_b / sigma2_e at the optimum
  Eigen::VectorXd blups;  // per-group intercept deviations, code order
  double reml_criterion = 0.0;
  Eigen::Index n_obs = 0;
  int n_groups = 0;
  Eigen::Index n_fixed = 0;
  bool boundary = false;  // theta converged to the lower bound; sigma2_b = 0
  int iterations = 0;
  std::vector<std::string> term_names;
  std::vector<std::string> group_labels;
};

// Profiled REML objective at variance ratio theta >= 0. With
// V0 = I + theta * Z Z^T (block diagonal by group):
//   beta(theta) = (X' V0^-1 X)^-1 X' V0^-1 y
//   sigma2(theta) = r' V0^-1 r / (N - p),  r = y - X beta(theta)
//   d(theta) = (N - p) log sigma2 + log|V0| + log|X' V0^-1 X|
// Evaluated with the per-group closed forms
//   V0_g^-1 = I - theta/(1 + theta m_g) J,  log|V0| = sum_g log(1 + theta m_g),
// so cost is O(N + G p^2) per call. Throws NumericalError (carrying theta)
// on a non-finite result.
double profiled_reml_criterion(double theta, const DesignData& d);

struct FitOptions {
  double tol = 1e-9;         // relative tolerance on log(theta)
  int max_iter = 200;        // refinement iterations
  double theta_min = 1e-10;  // search bounds for theta
  double theta_max = 1e6;
};

// Minimizes the profiled criterion over log(theta) by a coarse bracket scan
// followed by golden-section refinement. A minimum at the lower bound is a
// legal boundary solution reported as sigma2_b = 0.
LmmFit fit_reml(const DesignData& d, const FitOptions& opts = {});

struct SummaryRow {
  std::string term;
  double estimate = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double p = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Normal-approximation inference: z = estimate/SE, two-sided p from the
// standard normal, 95% interval estimate +- 1.96 SE.
std::vector<SummaryRow> summarize(const LmmFit& fit);

// Conditional: X beta + blup[group]; marginal: X beta. Groups unseen at fit
// time fall back to the marginal prediction and are reported via `unseen`.
Eigen::VectorXd predict(const LmmFit& fit, const DesignData& d, bool conditional,
                        std::vector<std::string>* unseen = nullptr);

struct FitStats {
  double r2 = 0.0;
  double mse = 0.0;
  double mae = 0.0;
};

// R2 = 1 - SS_res/SS_tot, mean squared error, mean absolute error.
// Requires equal lengths >= 2 and a non-constant observed vector.
FitStats fit_statistics(const Eigen::VectorXd& observed, const Eigen::VectorXd& predicted);

// Two-sided normal p-value for a z statistic.
double z_to_p(double z);

// A fitted model plus the context needed to reuse it: the formula and the
// dataset-level accuracy statistics (conditional and marginal variants).
struct FitDocument {
  ModelSpec spec;
  LmmFit fit;
  FitStats conditional;
  FitStats marginal;
};

std::string fit_to_json(const FitDocument& doc);
FitDocument fit_from_json(const std::string& text);
void save_fit(const FitDocument& doc, const std::filesystem::path& path);
FitDocument load_fit(const std::filesystem::path& path);

}  // namespace memload

#endif  // MEMLOAD_LMM_HPP
