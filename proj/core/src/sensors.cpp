#include "coopnav/sensors.hpp"

#include <cmath>

namespace coopnav {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const Vec3 kGravityEnu(0.0, 0.0, -kGravity);

}  // namespace

GaussianStream::GaussianStream(std::uint64_t seed) : state_(seed) {
  // Warm the state so trivially related seeds decorrelate.
  state_ = splitmix64(state_);
}

std::uint64_t GaussianStream::next_u64() {
  state_ = splitmix64(state_);
  return state_;
}

double GaussianStream::next_uniform() {
  // 53-bit mantissa, shifted into (0, 1).
  const std::uint64_t u = next_u64() >> 11;
  return (static_cast<double>(u) + 0.5) * (1.0 / 9007199254740992.0);
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double GaussianStream::next(double sigma) { return sigma * next(); }

Vec3 GaussianStream::next_vec3(double sigma) {
  Vec3 v;
  v.x() = next(sigma);
  v.y() = next(sigma);
  v.z() = next(sigma);
  return v;
}

std::uint64_t stream_seed(std::uint64_t master, RobotId robot,
                          SensorChannel channel) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ (0x100000000ULL + robot));
  s = splitmix64(s ^ static_cast<std::uint64_t>(channel));
  return s;
}

std::uint64_t stream_seed(std::uint64_t master, RobotId a, RobotId b,
                          SensorChannel channel) {
  const RobotId lo = std::min(a, b);
  const RobotId hi = std::max(a, b);
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ (0x200000000ULL + (static_cast<std::uint64_t>(lo) << 16) +
                      hi));
  s = splitmix64(s ^ static_cast<std::uint64_t>(channel));
  return s;
}

ImuSample sample_imu(const Vec3& v_prev, const Vec3& v_now,
                     const Mat3& c_prev, const Mat3& c_now, double dt,
                     const Vec3& accel_bias_true, const Vec3& gyro_bias_true,
                     double accel_sigma, double gyro_sigma,
                     GaussianStream& stream) {
  ImuSample out;
  out.dt = dt;

  const Vec3 accel_nav = (v_now - v_prev) / dt;
  out.accel = c_now.transpose() * (accel_nav - kGravityEnu) +
              accel_bias_true + stream.next_vec3(accel_sigma);

  const Mat3 rel = c_prev.transpose() * c_now;
  out.gyro = vee(rel) / dt + gyro_bias_true + stream.next_vec3(gyro_sigma);
  return out;
}

EncoderSample sample_encoder(const Vec3& v_true, double sigma,
                             GaussianStream& stream) {
  EncoderSample out;
  out.v_meas = v_true + stream.next_vec3(sigma);
  out.tick_speed = v_true.norm();
  return out;
}

GnssSample sample_gnss(const Vec3& r_true, const Vec3& v_true,
                       double pos_sigma, double vel_sigma,
                       GaussianStream& stream) {
  GnssSample out;
  out.pos = r_true + stream.next_vec3(pos_sigma);
  out.vel = v_true + stream.next_vec3(vel_sigma);
  return out;
}

std::optional<RangeMeasurement> sample_uwb(const Vec3& r_a_true,
                                           const Vec3& r_b_true, double sigma,
                                           double gate,
                                           GaussianStream& stream) {
  const double noise = stream.next(sigma);
  const double distance = (r_a_true - r_b_true).norm();
  if (distance > gate) return std::nullopt;
  return RangeMeasurement{distance + noise, sigma * sigma};
}

}  // namespace coopnav
