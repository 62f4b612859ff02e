#include "memload/lmm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "json.hpp"
#include "memload/numfmt.hpp"

namespace memload {
namespace {

bool numeric_field(const FeatureRow& r, const std::string& name, double& out) {
  if (name == "memory_load") out = static_cast<double>(r.memory_load);
  else if (name == "dependency_length") out = static_cast<double>(r.dependency_length);
  else if (name == "intervener_complexity") out = static_cast<double>(r.intervener_complexity);
  else if (name == "sentence_length") out = static_cast<double>(r.sentence_length);
  else return false;
  return true;
}

const std::string* label_field(const FeatureRow& r, const std::string& name) {
  if (name == "language") return &r.language;
  if (name == "sent_id") return &r.sent_id;
  return nullptr;
}

// Sufficient statistics reused across criterion evaluations: X'X, X'y, y'y
// plus per-group column sums of X and y.
struct Workspace {
  const DesignData& d;
  Eigen::MatrixXd XtX;
  Eigen::VectorXd Xty;
  double yty;
  Eigen::MatrixXd S;  // G x p, row g = sum of x_i over group g
  Eigen::VectorXd t;  // G, group sums of y
  Eigen::VectorXd m;  // G, group sizes

  explicit Workspace(const DesignData& dd) : d(dd) {
    const auto p = d.n_fixed();
    const int G = d.n_groups();
    XtX = d.X.transpose() * d.X;
    Xty = d.X.transpose() * d.y;
    yty = d.y.dot(d.y);
    S = Eigen::MatrixXd::Zero(G, p);
    t = Eigen::VectorXd::Zero(G);
    m = Eigen::VectorXd::Zero(G);
    for (Eigen::Index i = 0; i < d.n_obs(); ++i) {
      const int g = d.groups[static_cast<std::size_t>(i)];
      S.row(g) += d.X.row(i);
      t(g) += d.y(i);
      m(g) += 1.0;
    }
  }

  struct Eval {
    double criterion;
    Eigen::VectorXd beta;
    Eigen::MatrixXd A;  // X' V0^-1 X
    double sigma2;
    Eigen::VectorXd group_resid_sums;  // sum of GLS residuals per group
    Eigen::VectorXd w;                 // theta / (1 + theta m_g)
  };

  Eval eval(double theta) const {
    const auto n = d.n_obs();
    const auto p = d.n_fixed();
    const int G = d.n_groups();

    Eval e;
    e.w = Eigen::VectorXd(G);
    double logdet_v0 = 0.0;
    for (int g = 0; g < G; ++g) {
      e.w(g) = theta / (1.0 + theta * m(g));
      logdet_v0 += std::log1p(theta * m(g));
    }

    e.A = XtX - S.transpose() * e.w.asDiagonal() * S;
    const Eigen::VectorXd b = Xty - S.transpose() * (e.w.cwiseProduct(t));

    Eigen::LLT<Eigen::MatrixXd> llt(e.A);
    if (llt.info() != Eigen::Success)
      throw NumericalError("X' V0^-1 X not positive definite at theta=" +
                               std::to_string(theta), theta);
    e.beta = llt.solve(b);

    const Eigen::VectorXd r = d.y - d.X * e.beta;
    e.group_resid_sums = Eigen::VectorXd::Zero(G);
    Eigen::VectorXd rss(G);
    rss.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      const int g = d.groups[static_cast<std::size_t>(i)];
      rss(g) += r(i) * r(i);
      e.group_resid_sums(g) += r(i);
    }
    double quad = 0.0;
    for (int g = 0; g < G; ++g)
      quad += rss(g) - e.w(g) * e.group_resid_sums(g) * e.group_resid_sums(g);

    e.sigma2 = quad / static_cast<double>(n - p);
    if (!(e.sigma2 > 0.0) || !std::isfinite(e.sigma2))
      throw NumericalError("non-positive profiled variance at theta=" + std::to_string(theta),
                           theta);

    double logdet_a = 0.0;
    const auto& L = llt.matrixLLT();
    for (Eigen::Index j = 0; j < p; ++j) logdet_a += 2.0 * std::log(L(j, j));

    e.criterion = static_cast<double>(n - p) * std::log(e.sigma2) + logdet_v0 + logdet_a;
    if (!std::isfinite(e.criterion))
      throw NumericalError("non-finite REML criterion at theta=" + std::to_string(theta),
                           theta);
    return e;
  }
};

}  // namespace

DesignData build_design(const Dataset& dataset, const ModelSpec& spec) {
  const auto& rows = dataset.rows;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(spec.fixed_terms.size()) + 1;
  if (n <= p + 1)
    throw FitError("not enough observations: N=" + std::to_string(n) +
                   " must exceed p+1=" + std::to_string(p + 1));

  // Validate column names up front so the error names the missing column.
  double probe;
  if (!numeric_field(rows.front(), spec.response, probe))
    throw FitError("response column '" + spec.response + "' not found or not numeric");
  for (const std::string& term : spec.fixed_terms) {
    if (!numeric_field(rows.front(), term, probe))
      throw FitError("fixed-term column '" + term + "' not found or not numeric");
  }
  if (!label_field(rows.front(), spec.group))
    throw FitError("grouping column '" + spec.group +
                   "' not found (must be a categorical column)");

  DesignData d;
  d.y = Eigen::VectorXd(n);
  d.X = Eigen::MatrixXd::Ones(n, p);
  d.term_names.push_back("(Intercept)");
  for (const std::string& term : spec.fixed_terms) d.term_names.push_back(term);

  std::map<std::string, int> code_of;
  d.groups.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const FeatureRow& r = rows[static_cast<std::size_t>(i)];
    double v = 0.0;
    numeric_field(r, spec.response, v);
    d.y(i) = v;
    for (Eigen::Index j = 1; j < p; ++j) {
      numeric_field(r, spec.fixed_terms[static_cast<std::size_t>(j - 1)], v);
      d.X(i, j) = v;
    }
    const std::string& label = *label_field(r, spec.group);
    auto [it, inserted] = code_of.try_emplace(label, static_cast<int>(d.group_labels.size()));
    if (inserted) {
      d.group_labels.push_back(label);
      d.group_sizes.push_back(0);
    }
    d.groups[static_cast<std::size_t>(i)] = it->second;
    ++d.group_sizes[static_cast<std::size_t>(it->second)];
  }

  if (d.n_groups() < 2)
    throw FitError("grouping column '" + spec.group + "' has a single level; need >= 2 groups");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p)
    throw FitError("rank-deficient fixed-effects matrix: collinear columns (rank " +
                   std::to_string(qr.rank()) + " < " + std::to_string(p) + ")");
  return d;
}

double profiled_reml_criterion(double theta, const DesignData& d) {
  if (theta < 0.0) throw NumericalError("theta must be >= 0", theta);
  return Workspace(d).eval(theta).criterion;
}

LmmFit fit_reml(const DesignData& d, const FitOptions& opts) {
  const Workspace ws(d);
  const double inf = std::numeric_limits<double>::infinity();
  int evals = 0;
  auto objective = [&](double u) -> double {
    ++evals;
    try {
      return ws.eval(std::exp(u)).criterion;
    } catch (const NumericalError&) {
      return inf;
    }
  };

  // Coarse scan over log(theta), then golden-section on the winning bracket.
  const double u_lo = std::log(opts.theta_min);
  const double u_hi = std::log(opts.theta_max);
  constexpr int kGridPoints = 81;
  std::vector<double> us(kGridPoints), vals(kGridPoints);
  int best = 0;
  for (int k = 0; k < kGridPoints; ++k) {
    us[k] = u_lo + (u_hi - u_lo) * k / (kGridPoints - 1);
    vals[k] = objective(us[k]);
    if (vals[k] < vals[best]) best = k;
  }
  if (!std::isfinite(vals[best]))
    throw FitError("REML criterion not finite anywhere on the theta grid");

  double a = us[std::max(0, best - 1)];
  double b = us[std::min(kGridPoints - 1, best + 1)];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  int iter = 0;
  const double tol_u = opts.tol * std::max(1.0, (std::abs(u_lo) + std::abs(u_hi)) / 2.0);
  while (b - a > tol_u && iter < opts.max_iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = objective(x2);
    }
    ++iter;
  }
  if (iter >= opts.max_iter)
    throw FitError("REML optimizer did not converge within " + std::to_string(opts.max_iter) +
                   " iterations");

  double theta_hat = std::exp((a + b) / 2.0);
  const bool boundary = theta_hat <= opts.theta_min * 2.0;
  if (boundary) theta_hat = 0.0;  // legal parameter-space boundary: sigma2_b = 0

  const Workspace::Eval e = ws.eval(theta_hat);

  LmmFit fit;
  fit.beta = e.beta;
  fit.sigma2_e = e.sigma2;
  fit.theta = theta_hat;
  fit.sigma2_b = theta_hat * e.sigma2;
  fit.reml_criterion = e.criterion;
  fit.n_obs = d.n_obs();
  fit.n_groups = d.n_groups();
  fit.n_fixed = d.n_fixed();
  fit.boundary = boundary;
  fit.iterations = evals;
  fit.term_names = d.term_names;
  fit.group_labels = d.group_labels;

  Eigen::LLT<Eigen::MatrixXd> llt(e.A);
  fit.beta_cov =
      e.sigma2 * llt.solve(Eigen::MatrixXd::Identity(d.n_fixed(), d.n_fixed()));

  // BLUP for group g: theta/(1 + theta m_g) * (sum of GLS residuals in g).
  fit.blups = e.w.cwiseProduct(e.group_resid_sums);
  return fit;
}

double z_to_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

std::vector<SummaryRow> summarize(const LmmFit& fit) {
  std::vector<SummaryRow> rows;
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
    SummaryRow r;
    r.term = j < static_cast<Eigen::Index>(fit.term_names.size())
                 ? fit.term_names[static_cast<std::size_t>(j)]
                 : "beta" + std::to_string(j);
    r.estimate = fit.beta(j);
    r.std_error = std::sqrt(fit.beta_cov(j, j));
    r.z = r.std_error > 0.0 ? r.estimate / r.std_error
                            : std::numeric_limits<double>::infinity();
    r.p = z_to_p(r.z);
    r.ci_low = r.estimate - 1.96 * r.std_error;
    r.ci_high = r.estimate + 1.96 * r.std_error;
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::VectorXd predict(const LmmFit& fit, const DesignData& d, bool conditional,
                        std::vector<std::string>* unseen) {
  if (d.X.cols() != fit.beta.size())
    throw FitError("predict: design has " + std::to_string(d.X.cols()) +
                   " columns but the fit has " + std::to_string(fit.beta.size()));
  Eigen::VectorXd out = d.X * fit.beta;
  if (!conditional) return out;

  std::map<std::string, Eigen::Index> blup_of;
  for (std::size_t g = 0; g < fit.group_labels.size(); ++g)
    blup_of[fit.group_labels[g]] = static_cast<Eigen::Index>(g);

  std::vector<char> warned(d.group_labels.size(), 0);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const int code = d.groups[static_cast<std::size_t>(i)];
    const std::string& label = d.group_labels[static_cast<std::size_t>(code)];
    auto it = blup_of.find(label);
    if (it == blup_of.end()) {
      if (unseen && !warned[static_cast<std::size_t>(code)]) {
        unseen->push_back(label);
        warned[static_cast<std::size_t>(code)] = 1;
      }
      continue;  // marginal fallback for groups unseen at fit time
    }
    out(i) += fit.blups(it->second);
  }
  return out;
}

FitStats fit_statistics(const Eigen::VectorXd& observed, const Eigen::VectorXd& predicted) {
  if (observed.size() != predicted.size())
    throw FitError("fit_statistics: length mismatch");
  if (observed.size() < 2) throw FitError("fit_statistics: need at least 2 observations");
  const double mean = observed.mean();
  const double ss_tot = (observed.array() - mean).square().sum();
  if (ss_tot == 0.0)
    throw FitError("fit_statistics: observed vector is constant; R2 undefined");
  const Eigen::ArrayXd err = (observed - predicted).array();
  FitStats s;
  s.r2 = 1.0 - err.square().sum() / ss_tot;
  s.mse = err.square().mean();
  s.mae = err.abs().mean();
  return s;
}

namespace {

nlohmann::ordered_json stats_to_json(const FitStats& s) {
  return {{"r2", json_round(s.r2)}, {"mse", json_round(s.mse)}, {"mae", json_round(s.mae)}};
}

FitStats stats_from_json(const nlohmann::json& j) {
  FitStats s;
  s.r2 = j.at("r2").get<double>();
  s.mse = j.at("mse").get<double>();
  s.mae = j.at("mae").get<double>();
  return s;
}

}  // namespace

std::string fit_to_json(const FitDocument& doc) {
  nlohmann::ordered_json j;
  j["formula"] = render_formula(doc.spec);
  j["response"] = doc.spec.response;
  j["fixed_terms"] = doc.spec.fixed_terms;
  j["group"] = doc.spec.group;

  nlohmann::ordered_json coefs = nlohmann::ordered_json::array();
  for (const SummaryRow& r : summarize(doc.fit)) {
    coefs.push_back({{"term", r.term},
                     {"estimate", json_round(r.estimate)},
                     {"std_error", json_round(r.std_error)},
                     {"z", json_round(r.z)},
                     {"p", json_round(r.p)},
                     {"ci_low", json_round(r.ci_low)},
                     {"ci_high", json_round(r.ci_high)}});
  }
  j["coefficients"] = std::move(coefs);

  nlohmann::ordered_json cov = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < doc.fit.beta_cov.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < doc.fit.beta_cov.cols(); ++c)
      row.push_back(json_round(doc.fit.beta_cov(r, c)));
    cov.push_back(std::move(row));
  }
  j["beta_cov"] = std::move(cov);

  j["variance_components"] = {{"sigma2_b", json_round(doc.fit.sigma2_b)},
                              {"sigma2_e", json_round(doc.fit.sigma2_e)},
                              {"theta", json_round(doc.fit.theta)}};

  // Sorted by label so output is stable regardless of coding order.
  std::vector<std::size_t> order(doc.fit.group_labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return doc.fit.group_labels[x] < doc.fit.group_labels[y];
  });
  nlohmann::ordered_json blups;
  for (std::size_t i : order)
    blups[doc.fit.group_labels[i]] = json_round(doc.fit.blups(static_cast<Eigen::Index>(i)));
  j["random_intercepts"] = std::move(blups);

  j["fit"] = {{"reml_criterion", json_round(doc.fit.reml_criterion)},
              {"n_obs", static_cast<long long>(doc.fit.n_obs)},
              {"n_groups", doc.fit.n_groups},
              {"n_fixed", static_cast<long long>(doc.fit.n_fixed)},
              {"boundary", doc.fit.boundary},
              {"iterations", doc.fit.iterations}};
  j["fit_statistics"] = {{"conditional", stats_to_json(doc.conditional)},
                         {"marginal", stats_to_json(doc.marginal)}};
  return j.dump(2) + "\n";
}

FitDocument fit_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed fit JSON: ") + e.what());
  }
  try {
    FitDocument doc;
    doc.spec.response = j.at("response").get<std::string>();
    doc.spec.fixed_terms = j.at("fixed_terms").get<std::vector<std::string>>();
    doc.spec.group = j.at("group").get<std::string>();

    const auto& coefs = j.at("coefficients");
    const Eigen::Index p = static_cast<Eigen::Index>(coefs.size());
    doc.fit.beta = Eigen::VectorXd(p);
    doc.fit.term_names.clear();
    for (Eigen::Index k = 0; k < p; ++k) {
      const auto& c = coefs[static_cast<std::size_t>(k)];
      doc.fit.term_names.push_back(c.at("term").get<std::string>());
      doc.fit.beta(k) = c.at("estimate").get<double>();
    }
    doc.fit.beta_cov = Eigen::MatrixXd(p, p);
    const auto& cov = j.at("beta_cov");
    for (Eigen::Index r = 0; r < p; ++r)
      for (Eigen::Index c = 0; c < p; ++c)
        doc.fit.beta_cov(r, c) =
            cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();

    const auto& vc = j.at("variance_components");
    doc.fit.sigma2_b = vc.at("sigma2_b").get<double>();
    doc.fit.sigma2_e = vc.at("sigma2_e").get<double>();
    doc.fit.theta = vc.at("theta").get<double>();

    const auto& blups = j.at("random_intercepts");
    doc.fit.blups = Eigen::VectorXd(static_cast<Eigen::Index>(blups.size()));
    Eigen::Index g = 0;
    for (const auto& [label, value] : blups.items()) {
      doc.fit.group_labels.push_back(label);
      doc.fit.blups(g++) = value.get<double>();
    }

    const auto& f = j.at("fit");
    doc.fit.reml_criterion = f.at("reml_criterion").get<double>();
    doc.fit.n_obs = f.at("n_obs").get<long long>();
    doc.fit.n_groups = f.at("n_groups").get<int>();
    doc.fit.n_fixed = f.at("n_fixed").get<long long>();
    doc.fit.boundary = f.at("boundary").get<bool>();
    doc.fit.iterations = f.at("iterations").get<int>();

    doc.conditional = stats_from_json(j.at("fit_statistics").at("conditional"));
    doc.marginal = stats_from_json(j.at("fit_statistics").at("marginal"));
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("fit JSON missing or mistyped field: ") + e.what());
  }
}

void save_fit(const FitDocument& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path.string());
  out << fit_to_json(doc);
  if (!out) throw IoError("write failed: " + path.string());
}

FitDocument load_fit(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("fit JSON not found: " + path.string());
  return fit_from_json(read_text_file(path));
}

}  // namespace memload
