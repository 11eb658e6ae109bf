#include "surrogate/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "surrogate/error.hpp"

namespace surrogate {

nlohmann::json SvmParams::to_json() const {
  nlohmann::json j{{"c", c}, {"degree", degree}, {"coef0", coef0}, {"tol", tol}, {"max_passes", max_passes}};
  j["gamma"] = gamma ? nlohmann::json(*gamma) : nlohmann::json("scale");
  return j;
}

SvmParams SvmParams::from_json(const nlohmann::json& j) {
  SvmParams p;
  p.c = j.value("c", p.c);
  p.degree = j.value("degree", p.degree);
  p.coef0 = j.value("coef0", p.coef0);
  p.tol = j.value("tol", p.tol);
  p.max_passes = j.value("max_passes", p.max_passes);
  if (j.contains("gamma") && j.at("gamma").is_number()) p.gamma = j.at("gamma").get<double>();
  return p;
}

double poly_kernel(std::span<const double> x, std::span<const double> z, double gamma, double coef0, int degree) {
  if (x.size() != z.size()) throw Error(ErrorCode::DimensionMismatch, "kernel arguments differ in length");
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
  const double base = gamma * dot + coef0;
  double out = 1.0;
  for (int k = 0; k < degree; ++k) out *= base;
  return out;
}

double scale_gamma(const Matrix& X) {
  const auto& data = X.data();
  if (data.empty()) return 1.0;
  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= static_cast<double>(data.size());
  double var = 0.0;
  for (double v : data) var += (v - mean) * (v - mean);
  var /= static_cast<double>(data.size());
  return var > 0.0 ? 1.0 / (static_cast<double>(X.cols()) * var) : 1.0;
}

namespace {

class SmoSolver {
 public:
  SmoSolver(const Matrix& X, std::span<const int> y, const SvmParams& p, double gamma)
      : n_(X.rows()), y_(y.begin(), y.end()), c_(p.c), tol_(p.tol), record_(p.record_dual_trace),
        alpha_(n_, 0.0), grad_(n_, 0.0), gram_(n_ * n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        const double k = poly_kernel(X.row(i), X.row(j), gamma, p.coef0, p.degree);
        gram_[i * n_ + j] = k;
        gram_[j * n_ + i] = k;
      }
    }
  }

  SmoSolution run(std::size_t max_passes) {
    SmoSolution out;
    bool examine_all = true;
    std::size_t changed = 0;
    while (changed > 0 || examine_all) {
      if (passes_ >= max_passes) break;
      ++passes_;
      changed = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        if (examine_all || non_bound(i)) changed += examine(i) ? 1 : 0;
      }
      if (examine_all) examine_all = false;
      else if (changed == 0) examine_all = true;
    }
    out.converged = changed == 0 && !examine_all;
    out.alpha = alpha_;
    out.bias = bias_;
    out.updates = updates_;
    out.passes = passes_;
    out.dual_objective = objective_;
    out.min_update_gain = min_gain_;
    out.dual_trace = std::move(trace_);
    return out;
  }

 private:
  double k(std::size_t i, std::size_t j) const { return gram_[i * n_ + j]; }
  bool non_bound(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < c_; }
  double error(std::size_t i) const { return grad_[i] + bias_ - y_[i]; }

  bool examine(std::size_t i2) {
    const double e2 = error(i2);
    const double r2 = e2 * y_[i2];
    if (!((r2 < -tol_ && alpha_[i2] < c_) || (r2 > tol_ && alpha_[i2] > 0.0))) return false;

    // Second-choice heuristic: the non-bound partner with the largest |E1 - E2|.
    std::size_t best = n_;
    double best_gap = -1.0;
    std::size_t non_bound_count = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!non_bound(i)) continue;
      ++non_bound_count;
      const double gap = std::abs(error(i) - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (non_bound_count > 1 && best < n_ && step(best, i2)) return true;

    for (std::size_t off = 0; off < n_; ++off) {
      const std::size_t i1 = (i2 + 1 + off) % n_;
      if (non_bound(i1) && step(i1, i2)) return true;
    }
    for (std::size_t off = 0; off < n_; ++off) {
      const std::size_t i1 = (i2 + 1 + off) % n_;
      if (step(i1, i2)) return true;
    }
    return false;
  }

  // Objective change for moving (alpha1, alpha2) by (d1, d2).
  double gain(std::size_t i1, std::size_t i2, double d1, double d2) const {
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double q11 = k(i1, i1);
    const double q22 = k(i2, i2);
    const double q12 = y1 * y2 * k(i1, i2);
    return d1 + d2 - y1 * grad_[i1] * d1 - y2 * grad_[i2] * d2 -
           0.5 * (q11 * d1 * d1 + 2.0 * q12 * d1 * d2 + q22 * d2 * d2);
  }

  bool step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1_old = alpha_[i1];
    const double a2_old = alpha_[i2];
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double s = y1 * y2;
    const double e1 = error(i1);
    const double e2 = error(i2);

    double lo;
    double hi;
    if (s < 0) {
      lo = std::max(0.0, a2_old - a1_old);
      hi = std::min(c_, c_ + a2_old - a1_old);
    } else {
      lo = std::max(0.0, a2_old + a1_old - c_);
      hi = std::min(c_, a2_old + a1_old);
    }
    if (lo >= hi) return false;

    const double k11 = k(i1, i1);
    const double k12 = k(i1, i2);
    const double k22 = k(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2;
    if (eta > 0.0) {
      a2 = std::clamp(a2_old + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      const double at_lo = gain(i1, i2, s * (a2_old - lo), lo - a2_old);
      const double at_hi = gain(i1, i2, s * (a2_old - hi), hi - a2_old);
      if (at_lo > at_hi + kEps) a2 = lo;
      else if (at_hi > at_lo + kEps) a2 = hi;
      else a2 = a2_old;
    }
    if (std::abs(a2 - a2_old) < kEps * (a2 + a2_old + kEps)) return false;

    double a1 = a1_old + s * (a2_old - a2);
    if (a1 < 0.0) {
      a2 += s * a1;
      a1 = 0.0;
    } else if (a1 > c_) {
      a2 += s * (a1 - c_);
      a1 = c_;
    }
    a2 = std::clamp(a2, 0.0, c_);

    const double d1 = a1 - a1_old;
    const double d2 = a2 - a2_old;
    const double delta = gain(i1, i2, d1, d2);
    if (!(delta > 0.0)) return false;

    const double b1 = bias_ - e1 - y1 * d1 * k11 - y2 * d2 * k12;
    const double b2 = bias_ - e2 - y1 * d1 * k12 - y2 * d2 * k22;
    if (a1 > 0.0 && a1 < c_) bias_ = b1;
    else if (a2 > 0.0 && a2 < c_) bias_ = b2;
    else bias_ = 0.5 * (b1 + b2);

    for (std::size_t i = 0; i < n_; ++i) grad_[i] += y1 * d1 * k(i1, i) + y2 * d2 * k(i2, i);
    alpha_[i1] = a1;
    alpha_[i2] = a2;

    objective_ += delta;
    min_gain_ = updates_ == 0 ? delta : std::min(min_gain_, delta);
    ++updates_;
    if (record_) trace_.push_back(objective_);
    return true;
  }

  static constexpr double kEps = 1e-12;

  std::size_t n_;
  std::vector<double> y_;
  double c_;
  double tol_;
  bool record_;
  std::vector<double> alpha_;
  std::vector<double> grad_;  // sum_j alpha_j y_j K(i, j)
  std::vector<double> gram_;
  double bias_ = 0.0;
  double objective_ = 0.0;
  double min_gain_ = 0.0;
  std::size_t updates_ = 0;
  std::size_t passes_ = 0;
  std::vector<double> trace_;
};

}  // namespace

SmoSolution smo_train(const Matrix& X, std::span<const int> y_pm, const SvmParams& params) {
  if (X.rows() == 0) throw Error(ErrorCode::EmptyData, "SVM training set is empty");
  if (X.rows() < 2) throw Error(ErrorCode::SingleSample, "SVM needs at least two samples");
  if (y_pm.size() != X.rows()) throw Error(ErrorCode::LengthMismatch, "X and y row counts differ");
  if (!(params.c > 0.0) || params.degree < 1 || !(params.tol > 0.0) || (params.gamma && !(*params.gamma > 0.0))) {
    throw Error(ErrorCode::InvalidParams, "SVM requires c > 0, degree >= 1, tol > 0 and gamma > 0");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (int v : y_pm) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else throw Error(ErrorCode::InvalidParams, "SMO labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) throw Error(ErrorCode::SingleClass, "SVM training needs both classes");

  const double gamma = params.gamma.value_or(scale_gamma(X));
  SmoSolver solver(X, y_pm, params, gamma);
  auto sol = solver.run(params.max_passes);
  sol.gamma = gamma;
  return sol;
}

double platt_probability(double decision, double a, double b) noexcept {
  const double f = decision * a + b;
  return f >= 0.0 ? std::exp(-f) / (1.0 + std::exp(-f)) : 1.0 / (1.0 + std::exp(f));
}

PlattFit platt_fit(std::span<const double> decision_values, std::span<const int> labels) {
  if (decision_values.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "scores and labels differ");
  double prior1 = 0.0;
  double prior0 = 0.0;
  for (int l : labels) (l == 1 ? prior1 : prior0) += 1.0;
  if (prior1 == 0.0 || prior0 == 0.0) throw Error(ErrorCode::SingleClass, "Platt scaling needs both labels");

  constexpr std::size_t kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);
  const std::size_t n = labels.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] == 1 ? hi_target : lo_target;

  auto loss = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = decision_values[i] * a + b;
      f += z >= 0.0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  PlattFit fit;
  fit.a = 0.0;
  fit.b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = loss(fit.a, fit.b);
  fit.loss_trace.push_back(fval);

  for (; fit.iterations < kMaxIter; ++fit.iterations) {
    double h11 = kSigma;
    double h22 = kSigma;
    double h21 = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = decision_values[i];
      const double z = s * fit.a + fit.b;
      double p;
      double q;
      if (z >= 0.0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += s * s * d2;
      h22 += d2;
      h21 += s * d2;
      const double d1 = t[i] - p;
      g1 += s * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;

    double stepsize = 1.0;
    bool accepted = false;
    while (stepsize >= kMinStep) {
      const double na = fit.a + stepsize * da;
      const double nb = fit.b + stepsize * db;
      const double nf = loss(na, nb);
      if (std::isfinite(nf) && nf < fval + 1e-4 * stepsize * gd) {
        fit.a = na;
        fit.b = nb;
        fval = nf;
        accepted = true;
        break;
      }
      stepsize /= 2.0;
    }
    if (!accepted) break;  // current point is the best reachable one
    fit.loss_trace.push_back(fval);
  }
  if (!std::isfinite(fit.a) || !std::isfinite(fit.b)) {
    throw Error(ErrorCode::NewtonDivergence, "Platt scaling produced non-finite parameters");
  }
  return fit;
}

SvmModel::SvmModel(SvmParams params, double gamma, Matrix support_vectors, std::vector<double> dual_coef,
                   double bias, double platt_a, double platt_b)
    : params_(params), gamma_(gamma), sv_(std::move(support_vectors)), coef_(std::move(dual_coef)), bias_(bias),
      platt_a_(platt_a), platt_b_(platt_b) {
  if (coef_.size() != sv_.rows()) throw Error(ErrorCode::DimensionMismatch, "one coefficient per support vector");
}

SvmModel SvmModel::train(const Matrix& X, std::span<const int> y, const SvmParams& params, SmoSolution* solution) {
  if (y.size() != X.rows()) throw Error(ErrorCode::LengthMismatch, "X and y row counts differ");
  std::vector<int> y_pm(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) y_pm[i] = y[i] == 1 ? 1 : -1;
  auto sol = smo_train(X, y_pm, params);
  if (!sol.converged) {
    std::cerr << "warning: NoConvergence: SMO stopped after " << sol.passes
              << " passes without satisfying KKT conditions; using the current iterate\n";
  }

  Matrix sv;
  std::vector<double> coef;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    if (sol.alpha[i] > 0.0) {
      sv.push_row(X.row(i));
      coef.push_back(sol.alpha[i] * y_pm[i]);
    }
  }
  if (sv.cols() == 0) sv = Matrix(0, X.cols());
  SvmModel model(params, sol.gamma, std::move(sv), std::move(coef), sol.bias, 0.0, 0.0);

  std::vector<double> scores(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) scores[i] = model.decision(X.row(i));
  const auto platt = platt_fit(scores, y);
  model.platt_a_ = platt.a;
  model.platt_b_ = platt.b;
  if (solution) *solution = std::move(sol);
  return model;
}

double SvmModel::decision(std::span<const double> x) const {
  check_dimension(x, sv_.cols());
  double f = bias_;
  for (std::size_t i = 0; i < sv_.rows(); ++i) f += coef_[i] * poly_kernel(sv_.row(i), x, gamma_, params_.coef0, params_.degree);
  return f;
}

double SvmModel::predict_proba(std::span<const double> x) const {
  return platt_probability(decision(x), platt_a_, platt_b_);
}

nlohmann::json SvmModel::body_to_json() const {
  nlohmann::json sv = nlohmann::json::array();
  for (std::size_t i = 0; i < sv_.rows(); ++i) {
    auto r = sv_.row(i);
    sv.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"params", params_.to_json()},
          {"gamma_value", gamma_},
          {"support_vectors", std::move(sv)},
          {"dual_coef", coef_},
          {"bias", bias_},
          {"platt", {{"a", platt_a_}, {"b", platt_b_}}}};
}

SvmModel SvmModel::from_json(const nlohmann::json& j) {
  const auto dim = j.at("input_dim").get<std::size_t>();
  Matrix sv(0, dim);
  for (const auto& r : j.at("support_vectors")) {
    const auto row = r.get<std::vector<double>>();
    if (row.size() != dim) throw Error(ErrorCode::DimensionMismatch, "support vector width differs from input_dim");
    sv.push_row(row);
  }
  return SvmModel(SvmParams::from_json(j.at("params")), j.at("gamma_value").get<double>(), std::move(sv),
                  j.at("dual_coef").get<std::vector<double>>(), j.at("bias").get<double>(),
                  j.at("platt").at("a").get<double>(), j.at("platt").at("b").get<double>());
}

}  // namespace surrogate
