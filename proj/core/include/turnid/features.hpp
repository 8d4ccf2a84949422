#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "turnid/align.hpp"

namespace turnid {

inline constexpr std::size_t kSimpleStatCount = 7;
inline constexpr std::size_t kPcaDims = 5;
inline constexpr std::size_t kFeaturesPerSensor = kSimpleStatCount + kPcaDims;
inline constexpr std::size_t kFeatureCount = kSensorCount * kFeaturesPerSensor;

/// Population moments of a series. Skew, kurtosis and autocorrelation are 0
/// when the series is constant.
struct SimpleStats {
  double mean = 0.0;
  double stddev = 0.0;
  double skew = 0.0;
  /// Excess kurtosis (m4 / sigma^4 - 3).
  double kurtosis = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// Lag-1 autocorrelation.
  double autocorr = 0.0;

  std::array<double, kSimpleStatCount> as_array() const noexcept {
    return {mean, stddev, skew, kurtosis, min, max, autocorr};
  }
};

/// Requires at least 2 values.
SimpleStats simple_features(std::span<const double> series);

/// Smallest power of two >= k (1 for k <= 1).
std::size_t padded_length(std::size_t k) noexcept;

/// Full-depth orthonormal Haar transform of the series edge-padded to
/// padded_length(). Output: [final approximation, details coarsest..finest].
std::vector<double> haar_dwt(std::span<const double> series);

/// Inverse of haar_dwt for a power-of-two coefficient vector.
std::vector<double> inverse_haar(std::span<const double> coefficients);

/// PCA of one sensor's DWT vectors: mean plus the top eigenvectors of the
/// sample covariance (denominator N - 1), eigenvalues descending. Components
/// beyond the data rank are zero vectors with zero variance.
struct PcaProjection {
  std::vector<double> mean;
  std::vector<std::vector<double>> components;
  std::vector<double> explained_variance;
  /// Number of non-degenerate components.
  std::size_t kept = 0;

  std::size_t dims() const noexcept { return components.size(); }
  std::size_t width() const noexcept { return mean.size(); }
  std::vector<double> project(std::span<const double> x) const;
  std::vector<double> reconstruct(std::span<const double> scores) const;
};

/// Requires at least 2 vectors of equal length.
PcaProjection fit_pca(std::span<const std::vector<double>> vectors, std::size_t dims = kPcaDims);

/// Per-sensor PCA models for one site.
struct SitePca {
  int site_id = 0;
  /// K of the aligned segments the model was fit on.
  std::size_t rows = 0;
  std::array<PcaProjection, kSensorCount> sensors;
};

/// Fits one PcaProjection per sensor on the DWT of the given (training) segments.
SitePca fit_site_pca(std::span<const AlignedSegment> training);

/// 144 values, sensor-major: each sensor's 7 simple statistics then 5 PCA scores.
struct FeatureVector {
  std::vector<double> values;
  std::string driver_id;
  std::string session_id;
};

FeatureVector featurize(const AlignedSegment& segment, const SitePca& pca);

/// "steering_angle.mean", ..., "throttle.pc5".
const std::vector<std::string>& feature_names();

/// Sensor owning a feature index.
Sensor feature_sensor(std::size_t feature) noexcept;

void write_features_csv(std::ostream& out, std::span<const FeatureVector> rows);

}  // namespace turnid
