#include "motkit/kalman.hpp"

#include <stdexcept>

namespace mot {

namespace {

using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Vec4 = Eigen::Matrix<double, 4, 1>;

Mat8 transition_matrix() {
  Mat8 f = Mat8::Identity();
  for (int i = 0; i < 4; ++i) {
    f(i, i + 4) = 1.0;  // dt = 1 frame
  }
  return f;
}

}  // namespace

void KalmanParams::validate() const {
  if (!(process_noise_pos > 0.0 && process_noise_vel > 0.0 &&
        measurement_noise > 0.0 && initial_vel_uncertainty > 0.0)) {
    throw std::invalid_argument(
        "KalmanParams: all noise parameters must be strictly positive");
  }
}

KalmanState kf_init(const BBox& box, const KalmanParams& params) {
  KalmanState s;
  s.mean << box.x1, box.y1, box.x2, box.y2, 0.0, 0.0, 0.0, 0.0;
  s.covariance = Mat8::Zero();
  const double pos_var = params.measurement_noise * params.measurement_noise;
  const double vel_var =
      params.initial_vel_uncertainty * params.initial_vel_uncertainty;
  for (int i = 0; i < 4; ++i) {
    s.covariance(i, i) = pos_var;
    s.covariance(i + 4, i + 4) = vel_var;
  }
  return s;
}

KalmanState kf_predict(const KalmanState& state, const KalmanParams& params) {
  const Mat8 f = transition_matrix();
  Mat8 q = Mat8::Zero();
  const double qp = params.process_noise_pos * params.process_noise_pos;
  const double qv = params.process_noise_vel * params.process_noise_vel;
  for (int i = 0; i < 4; ++i) {
    q(i, i) = qp;
    q(i + 4, i + 4) = qv;
  }

  KalmanState out;
  out.mean = f * state.mean;
  out.covariance = f * state.covariance * f.transpose() + q;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

KalmanState kf_update(const KalmanState& state, const BBox& observed,
                      const KalmanParams& params) {
  const double r = params.measurement_noise * params.measurement_noise;

  Vec4 z;
  z << observed.x1, observed.y1, observed.x2, observed.y2;

  // The observation matrix selects the 4 position components, so every
  // product with it collapses to a block of the covariance.
  const Vec4 innovation = z - state.mean.head<4>();
  const Mat4 s =
      state.covariance.topLeftCorner<4, 4>() + Mat4::Identity() * r;
  const Eigen::Matrix<double, 8, 4> gain =
      state.covariance.leftCols<4>() * s.inverse();

  KalmanState out;
  out.mean = state.mean + gain * innovation;
  // Joseph form with A = I - gain * H: A P A' + gain R gain'.
  const Mat8 ap = state.covariance - gain * state.covariance.topRows<4>();
  out.covariance = ap - ap.leftCols<4>() * gain.transpose() +
                   r * (gain * gain.transpose());
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

BBox extract_box(const KalmanState& state) {
  constexpr double kMinSize = 1.0;
  double x1 = state.mean(0);
  double y1 = state.mean(1);
  double x2 = state.mean(2);
  double y2 = state.mean(3);
  if (x2 - x1 < kMinSize) {
    const double cx = 0.5 * (x1 + x2);
    x1 = cx - 0.5 * kMinSize;
    x2 = cx + 0.5 * kMinSize;
  }
  if (y2 - y1 < kMinSize) {
    const double cy = 0.5 * (y1 + y2);
    y1 = cy - 0.5 * kMinSize;
    y2 = cy + 0.5 * kMinSize;
  }
  return BBox(x1, y1, x2, y2);
}

}  // namespace mot
