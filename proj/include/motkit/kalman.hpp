#pragma once

#include <Eigen/Dense>

#include "motkit/bbox.hpp"

namespace mot {

/// Per-axis noise standard deviations of the constant-velocity box filter.
struct KalmanParams {
  double process_noise_pos = 1.0;        // px
  double process_noise_vel = 0.5;        // px/frame
  double measurement_noise = 2.0;        // px
  double initial_vel_uncertainty = 10.0; // px/frame

  void validate() const;
};

/// State over the two box corners plus their velocities:
/// [x1, y1, x2, y2, vx1, vy1, vx2, vy2].
struct KalmanState {
  Eigen::Matrix<double, 8, 1> mean;
  Eigen::Matrix<double, 8, 8> covariance;
};

/// Zero-velocity state centered on the given box. Position variance is
/// measurement_noise^2, velocity variance initial_vel_uncertainty^2.
KalmanState kf_init(const BBox& box, const KalmanParams& params);

/// Constant-velocity prediction with dt = 1 frame. The predicted box is the
/// track proposal for the next frame.
KalmanState kf_predict(const KalmanState& state, const KalmanParams& params);

/// Correction against an observed box (the 4 position components are the
/// measurement). Joseph-form covariance update keeps the matrix symmetric
/// PSD over long runs.
KalmanState kf_update(const KalmanState& state, const BBox& observed,
                      const KalmanParams& params);

/// Box extracted from the state mean. Corner crossings from velocity
/// extrapolation are clamped to a minimum 1 px width/height around the box
/// center so the result is always a valid BBox.
BBox extract_box(const KalmanState& state);

}  // namespace mot
