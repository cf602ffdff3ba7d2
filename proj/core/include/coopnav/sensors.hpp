#pragma once

#include <cstdint>
#include <optional>

#include "coopnav/relative_update.hpp"
#include "coopnav/types.hpp"

namespace coopnav {

/// Deterministic Gaussian stream (Box-Muller over splitmix64/mt19937_64).
/// Streams are keyed so that each (robot, sensor) channel is independent;
/// toggling behavior of one robot never perturbs another robot's draws.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed);

  double next();                     // standard normal
  double next(double sigma);         // N(0, sigma^2)
  Vec3 next_vec3(double sigma);      // iid per axis

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;

  std::uint64_t next_u64();
  double next_uniform();  // (0, 1)
};

enum class SensorChannel : std::uint64_t {
  Imu = 1,
  Encoder = 2,
  Gnss = 3,
  Init = 4,
  Uwb = 5,
  BiasDraw = 6,
};

/// Derive an independent stream seed for a (robot, channel) pair.
std::uint64_t stream_seed(std::uint64_t master, RobotId robot,
                          SensorChannel channel);
/// Variant for pair-keyed channels (UWB ranging).
std::uint64_t stream_seed(std::uint64_t master, RobotId a, RobotId b,
                          SensorChannel channel);

/// Sensor rates and one-sigma noises used to synthesize measurements.
struct SensorModel {
  struct Imu {
    double rate = 50.0;          // Hz
    double accel_sigma = 0.001;  // m/s^2
    double gyro_sigma = 0.001;   // rad/s
  } imu;
  struct Encoder {
    double rate = 30.0;       // Hz
    double sigma = 0.01;      // m/s
    double up_sigma = 1e3;    // filter R for the Up axis (unobserved)
  } encoder;
  struct Gnss {
    double rate = 1.0;        // Hz
    double pos_sigma = 0.1;   // m
    double vel_sigma = 0.02;  // m/s
    bool enabled = false;
  } gnss;
  struct Uwb {
    double rate = 1.0;     // Hz
    double sigma = 0.05;   // m
  } uwb;
};

/// Synthesize one IMU sample over the interval [t-dt, t]. The specific
/// force uses the interval-averaged acceleration so that velocity
/// discontinuities commanded by the truth scripts are seen by the sensor;
/// the angular rate comes from the relative DCM over the interval.
ImuSample sample_imu(const Vec3& v_prev, const Vec3& v_now,
                     const Mat3& c_prev, const Mat3& c_now, double dt,
                     const Vec3& accel_bias_true, const Vec3& gyro_bias_true,
                     double accel_sigma, double gyro_sigma,
                     GaussianStream& stream);

struct EncoderSample {
  Vec3 v_meas = Vec3::Zero();  // nav-frame velocity, Gaussian noise
  double tick_speed = 0.0;     // standstill channel, exact
};
EncoderSample sample_encoder(const Vec3& v_true, double sigma,
                             GaussianStream& stream);

struct GnssSample {
  Vec3 pos = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
};
GnssSample sample_gnss(const Vec3& r_true, const Vec3& v_true,
                       double pos_sigma, double vel_sigma,
                       GaussianStream& stream);

/// Range sample between two robots, gated on the true distance. The draw
/// is consumed whether or not the pair is within the gate so stream
/// positions stay schedule-stable.
std::optional<RangeMeasurement> sample_uwb(const Vec3& r_a_true,
                                           const Vec3& r_b_true, double sigma,
                                           double gate,
                                           GaussianStream& stream);

}  // namespace coopnav
