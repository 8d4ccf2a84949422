#include "turnid/features.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "turnid/error.hpp"

namespace turnid {

SimpleStats simple_features(std::span<const double> x) {
  if (x.size() < 2) throw PreconditionError("simple features need at least 2 samples");
  const double n = static_cast<double>(x.size());

  SimpleStats st;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  st.min = *lo;
  st.max = *hi;
  if (st.min == st.max) {
    st.mean = st.min;
    return st;
  }

  double sum = 0.0;
  for (double v : x) sum += v;
  st.mean = sum / n;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0, lag = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - st.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
    if (i + 1 < x.size()) lag += d * (x[i + 1] - st.mean);
  }
  st.stddev = std::sqrt(m2 / n);
  if (st.stddev <= 1e-12 * std::max(std::abs(st.min), std::abs(st.max))) {
    st.stddev = 0.0;
    return st;
  }
  const double var = m2 / n;
  st.skew = (m3 / n) / (var * st.stddev);
  st.kurtosis = (m4 / n) / (var * var) - 3.0;
  st.autocorr = lag / m2;
  return st;
}

std::size_t padded_length(std::size_t k) noexcept { return std::bit_ceil(std::max<std::size_t>(k, 1)); }

std::vector<double> haar_dwt(std::span<const double> series) {
  const std::size_t m = padded_length(series.size());
  std::vector<double> a(m, series.empty() ? 0.0 : series.back());
  std::copy(series.begin(), series.end(), a.begin());

  std::vector<double> out(m);
  const double r = std::numbers::sqrt2 / 2.0;
  for (std::size_t len = m; len > 1; len /= 2) {
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i) {
      const double s = (a[2 * i] + a[2 * i + 1]) * r;
      const double d = (a[2 * i] - a[2 * i + 1]) * r;
      out[half + i] = d;
      a[i] = s;
    }
  }
  out[0] = a[0];
  return out;
}

std::vector<double> inverse_haar(std::span<const double> c) {
  const std::size_t m = c.size();
  if (m == 0 || !std::has_single_bit(m)) throw PreconditionError("inverse Haar needs a power-of-two length");
  std::vector<double> a(c.begin(), c.end());
  std::vector<double> tmp(m);
  const double r = std::numbers::sqrt2 / 2.0;
  for (std::size_t len = 2; len <= m; len *= 2) {
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < half; ++i) {
      tmp[2 * i] = (a[i] + a[half + i]) * r;
      tmp[2 * i + 1] = (a[i] - a[half + i]) * r;
    }
    std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(len), a.begin());
  }
  return a;
}

std::vector<double> PcaProjection::project(std::span<const double> x) const {
  if (x.size() != width()) throw PreconditionError("PCA input width mismatch");
  std::vector<double> scores(dims(), 0.0);
  for (std::size_t k = 0; k < kept; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += components[k][j] * (x[j] - mean[j]);
    scores[k] = s;
  }
  return scores;
}

std::vector<double> PcaProjection::reconstruct(std::span<const double> scores) const {
  std::vector<double> x(mean);
  for (std::size_t k = 0; k < kept && k < scores.size(); ++k) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += scores[k] * components[k][j];
  }
  return x;
}

PcaProjection fit_pca(std::span<const std::vector<double>> vectors, std::size_t dims) {
  if (vectors.size() < 2) throw PreconditionError("PCA needs at least 2 training vectors");
  const std::size_t n = vectors.size();
  const std::size_t m = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != m) throw PreconditionError("PCA training vectors differ in length");
  }

  Eigen::MatrixXd x(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vectors[i][j];
  }
  const Eigen::RowVectorXd mu = x.colwise().mean();
  x.rowwise() -= mu;
  // With fewer vectors than dimensions, solve the smaller n x n Gram problem:
  // X^T X and X X^T share their nonzero eigenvalues, and v = X^T u / |X^T u|.
  const bool gram = n < m;
  const Eigen::MatrixXd scatter = gram ? Eigen::MatrixXd(x * x.transpose()) : Eigen::MatrixXd(x.transpose() * x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter / static_cast<double>(n - 1));
  if (eig.info() != Eigen::Success) throw NumericError("covariance eigendecomposition failed");

  PcaProjection pca;
  pca.mean.assign(mu.data(), mu.data() + m);
  pca.components.assign(dims, std::vector<double>(m, 0.0));
  pca.explained_variance.assign(dims, 0.0);

  const auto& values = eig.eigenvalues();  // ascending
  const auto& vecs = eig.eigenvectors();
  const Eigen::Index size = values.size();
  const double top = std::max(values(size - 1), 0.0);
  const double tol = top * static_cast<double>(m) * 1e-12;
  const std::size_t limit = std::min({dims, n - 1, m});
  for (std::size_t k = 0; k < limit; ++k) {
    const Eigen::Index col = size - 1 - static_cast<Eigen::Index>(k);
    const double lambda = values(col);
    if (!(lambda > tol)) break;
    Eigen::VectorXd v = vecs.col(col);
    if (gram) v = (x.transpose() * v).normalized();
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    pca.components[k].assign(v.data(), v.data() + m);
    pca.explained_variance[k] = lambda;
    pca.kept = k + 1;
  }
  return pca;
}

SitePca fit_site_pca(std::span<const AlignedSegment> training) {
  if (training.size() < 2) throw PreconditionError("site PCA needs at least 2 training segments");
  SitePca model;
  model.site_id = training.front().site_id;
  model.rows = training.front().rows();
  for (const auto& seg : training) {
    if (seg.site_id != model.site_id || seg.rows() != model.rows) {
      throw PreconditionError("training segments must share one site and K");
    }
  }
  for (Sensor s : kAllSensors) {
    std::vector<std::vector<double>> dwt;
    dwt.reserve(training.size());
    for (const auto& seg : training) dwt.push_back(haar_dwt(seg.column(s)));
    model.sensors[index(s)] = fit_pca(dwt, kPcaDims);
  }
  return model;
}

FeatureVector featurize(const AlignedSegment& segment, const SitePca& pca) {
  if (segment.site_id != pca.site_id || segment.rows() != pca.rows) {
    throw PreconditionError("segment \"" + segment.session_id + "\" (site " + std::to_string(segment.site_id) +
                            ", K=" + std::to_string(segment.rows()) + ") does not match PCA model (site " +
                            std::to_string(pca.site_id) + ", K=" + std::to_string(pca.rows) + ")");
  }
  FeatureVector fv;
  fv.driver_id = segment.driver_id;
  fv.session_id = segment.session_id;
  fv.values.reserve(kFeatureCount);
  for (Sensor s : kAllSensors) {
    const auto& col = segment.column(s);
    for (double v : simple_features(col).as_array()) fv.values.push_back(v);
    const auto scores = pca.sensors[index(s)].project(haar_dwt(col));
    for (std::size_t k = 0; k < kPcaDims; ++k) fv.values.push_back(k < scores.size() ? scores[k] : 0.0);
  }
  return fv;
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    static constexpr std::array<const char*, kSimpleStatCount> stats = {"mean", "std",  "skew",    "kurtosis",
                                                                        "min",  "max",  "autocorr"};
    std::vector<std::string> out;
    for (Sensor s : kAllSensors) {
      const std::string base(log_name(s));
      for (const char* st : stats) out.push_back(base + "." + st);
      for (std::size_t k = 1; k <= kPcaDims; ++k) out.push_back(base + ".pc" + std::to_string(k));
    }
    return out;
  }();
  return names;
}

Sensor feature_sensor(std::size_t feature) noexcept {
  return kAllSensors[std::min(feature / kFeaturesPerSensor, kSensorCount - 1)];
}

void write_features_csv(std::ostream& out, std::span<const FeatureVector> rows) {
  out << "session,driver";
  for (const auto& name : feature_names()) out << ',' << name;
  out << '\n';
  char buf[32];
  for (const auto& fv : rows) {
    out << fv.session_id << ',' << fv.driver_id;
    for (double v : fv.values) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << ',';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

}  // namespace turnid
