#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace smcaero {

// sign with sign(0) = 0
inline double sgn(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

// |x|^p sign(x); p = 0 gives sign(x)
inline double spow(double x, double p) {
  if (x == 0.0) return 0.0;
  if (p == 0.0) return sgn(x);
  return std::copysign(std::pow(std::abs(x), p), x);
}

inline double clamp(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

inline constexpr double kPi = 3.14159265358979323846;
inline double deg(double rad) { return rad * 180.0 / kPi; }
inline double rad(double d) { return d * kPi / 180.0; }

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct DivergedError : Error {
  double t;
  std::string component;
  DivergedError(double t_, std::string comp)
      : Error("simulation diverged at t=" + std::to_string(t_) + " in " + comp), t(t_),
        component(std::move(comp)) {}
};

struct AllocationError : Error {
  double t;
  explicit AllocationError(double t_)
      : Error("allocation singularity (|sin theta| < 0.1) at t=" + std::to_string(t_)), t(t_) {}
};

}  // namespace smcaero
