#include "turnid/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "turnid/error.hpp"

namespace turnid {

Standardizer Standardizer::fit(std::span<const std::vector<double>> rows) {
  Standardizer s;
  if (rows.empty()) return s;
  const std::size_t f = rows.front().size();
  const double n = static_cast<double>(rows.size());
  s.mean.assign(f, 0.0);
  s.scale.assign(f, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < f; ++j) s.mean[j] += r[j];
  }
  for (double& m : s.mean) m /= n;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < f; ++j) {
      const double d = r[j] - s.mean[j];
      s.scale[j] += d * d;
    }
  }
  for (double& v : s.scale) v = std::sqrt(v / n);
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (scale[j] > 0.0) out[j] = (x[j] - mean[j]) / scale[j];
  }
  return out;
}

namespace {

// Softmax of W * [x, 1] into `p`.
void class_probabilities(std::span<const double> w, std::span<const double> x, std::size_t class_count,
                         std::vector<double>& p) {
  const std::size_t width = x.size() + 1;
  p.resize(class_count);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < class_count; ++c) {
    const double* row = w.data() + c * width;
    double z = row[x.size()];
    for (std::size_t j = 0; j < x.size(); ++j) z += row[j] * x[j];
    p[c] = z;
    top = std::max(top, z);
  }
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : p) v /= sum;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double logistic_objective(std::span<const double> weights, std::span<const std::vector<double>> rows,
                          std::span<const std::size_t> classes, std::size_t class_count, double lambda,
                          std::vector<double>* gradient) {
  const std::size_t f = rows.empty() ? 0 : rows.front().size();
  const std::size_t width = f + 1;
  const double n = static_cast<double>(rows.size());
  if (gradient) gradient->assign(weights.size(), 0.0);

  double loss = 0.0;
  std::vector<double> p;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    class_probabilities(weights, rows[i], class_count, p);
    loss -= std::log(std::max(p[classes[i]], std::numeric_limits<double>::min()));
    if (!gradient) continue;
    for (std::size_t c = 0; c < class_count; ++c) {
      const double r = (p[c] - (c == classes[i] ? 1.0 : 0.0)) / n;
      double* g = gradient->data() + c * width;
      for (std::size_t j = 0; j < f; ++j) g[j] += r * rows[i][j];
      g[f] += r;
    }
  }
  loss /= n;

  double sq = 0.0;
  for (double w : weights) sq += w * w;
  loss += 0.5 * lambda * sq;
  if (gradient) {
    for (std::size_t k = 0; k < weights.size(); ++k) (*gradient)[k] += lambda * weights[k];
  }
  return loss;
}

LogisticModel train_logistic(std::span<const std::vector<double>> rows, std::span<const std::string> labels,
                             const LogisticParams& params) {
  if (rows.empty() || rows.size() != labels.size()) throw PreconditionError("logistic training needs labeled rows");
  if (!(params.lambda >= 0.0)) throw PreconditionError("lambda must be non-negative");

  LogisticModel model;
  model.lambda = params.lambda;
  model.feature_count = rows.front().size();
  model.labels.assign(labels.begin(), labels.end());
  std::sort(model.labels.begin(), model.labels.end());
  model.labels.erase(std::unique(model.labels.begin(), model.labels.end()), model.labels.end());
  if (model.labels.size() < 2) throw PreconditionError("logistic training needs at least 2 classes");
  const std::size_t c_count = model.labels.size();

  model.standardizer = Standardizer::fit(rows);
  std::vector<std::vector<double>> z;
  z.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() != model.feature_count) throw PreconditionError("rows differ in length");
    if (!std::all_of(r.begin(), r.end(), [](double v) { return std::isfinite(v); })) {
      throw PreconditionError("non-finite feature value");
    }
    z.push_back(model.standardizer.apply(r));
  }
  std::vector<std::size_t> classes(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    classes[i] = static_cast<std::size_t>(
        std::lower_bound(model.labels.begin(), model.labels.end(), labels[i]) - model.labels.begin());
  }

  std::vector<double> w(c_count * (model.feature_count + 1), 0.0);
  std::vector<double> g;
  double loss = logistic_objective(w, z, classes, c_count, params.lambda, &g);
  if (!std::isfinite(loss)) throw NumericError("non-finite initial logistic loss");
  model.loss_history.push_back(loss);

  constexpr double kArmijo = 1e-4;
  double step = 1.0;
  std::vector<double> w_new(w.size());
  std::vector<double> g_new;
  for (std::size_t it = 0; it < params.max_iterations; ++it) {
    const double g_norm = norm(g);
    model.gradient_norm = g_norm;
    if (g_norm <= params.tolerance) {
      model.converged = true;
      break;
    }
    double new_loss = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (std::size_t k = 0; k < w.size(); ++k) w_new[k] = w[k] - step * g[k];
      new_loss = logistic_objective(w_new, z, classes, c_count, params.lambda, &g_new);
      if (std::isfinite(new_loss) && new_loss <= loss - kArmijo * step * g_norm * g_norm) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!std::isfinite(new_loss)) throw NumericError("non-finite logistic loss during line search");
      break;  // no further decrease representable
    }

    // Barzilai-Borwein guess for the next trial step.
    double ss = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double s = w_new[k] - w[k];
      const double y = g_new[k] - g[k];
      ss += s * s;
      sy += s * y;
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-10, 1e10) : std::min(step * 2.0, 1e10);

    w.swap(w_new);
    g.swap(g_new);
    loss = new_loss;
    model.loss_history.push_back(loss);
  }
  if (!model.converged) {
    model.gradient_norm = norm(g);
    model.converged = model.gradient_norm <= params.tolerance;
  }
  model.weights = std::move(w);
  return model;
}

LogisticModel train_logistic(std::span<const FeatureVector> data, const LogisticParams& params) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (const auto& fv : data) {
    rows.push_back(fv.values);
    labels.push_back(fv.driver_id);
  }
  return train_logistic(rows, labels, params);
}

std::vector<double> LogisticModel::probabilities(std::span<const double> x) const {
  if (x.size() != feature_count) throw PreconditionError("feature vector length mismatch");
  std::vector<double> p;
  class_probabilities(weights, standardizer.apply(x), labels.size(), p);
  return p;
}

std::string LogisticModel::predict(std::span<const double> x) const {
  const auto p = probabilities(x);
  return labels[static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin())];
}

}  // namespace turnid
