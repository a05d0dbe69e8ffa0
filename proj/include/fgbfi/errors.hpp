#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace fgbfi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid precision settings, model parameters or run options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed system definition or numeric literal.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::string field = {})
      : Error(line ? "line " + std::to_string(line) + (field.empty() ? "" : " (" + field + ")") +
                         ": " + what
                   : (field.empty() ? what : field + ": " + what)),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

/// The series degree cap was hit before the truncation test was satisfied.
class AccuracyUnreachable : public Error {
 public:
  AccuracyUnreachable(unsigned degree_cap, std::size_t worst_coordinate, std::string leg = {})
      : Error("accuracy unreachable at this precision: degree cap " + std::to_string(degree_cap) +
              " reached, worst coordinate x" + std::to_string(worst_coordinate + 1) +
              (leg.empty() ? "" : " (" + leg + " leg)")),
        degree_cap_(degree_cap),
        worst_coordinate_(worst_coordinate),
        leg_(std::move(leg)) {}

  std::size_t worst_coordinate() const noexcept { return worst_coordinate_; }
  const std::string& leg() const noexcept { return leg_; }

  AccuracyUnreachable with_leg(std::string leg) const {
    return AccuracyUnreachable(degree_cap_, worst_coordinate_, std::move(leg));
  }

 private:
  unsigned degree_cap_;
  std::size_t worst_coordinate_;
  std::string leg_;
};

inline constexpr const char* kRemediation = "Decrease the value eps_p and/or eps_m";

/// A step arrived outside the bounding ball.
class BallEscape : public Error {
 public:
  BallEscape(double escape_time, std::string leg = {})
      : Error(message(escape_time, leg)), escape_time_(escape_time), leg_(std::move(leg)) {}

  double escape_time() const noexcept { return escape_time_; }
  const std::string& leg() const noexcept { return leg_; }

  BallEscape with_leg(std::string leg) const { return BallEscape(escape_time_, std::move(leg)); }

 private:
  static std::string message(double t, const std::string& leg) {
    std::string m = "accuracy insufficient: trajectory left the bounding ball at t = " +
                    std::to_string(t);
    if (!leg.empty()) m += " (" + leg + " leg)";
    return m + ". " + kRemediation;
  }

  double escape_time_;
  std::string leg_;
};

/// Gram-Schmidt met a (numerically) dependent vector.
class LinearDependence : public Error {
 public:
  LinearDependence(std::size_t segment, std::size_t vector)
      : Error("linearly dependent perturbation vectors: vector " + std::to_string(vector + 1) +
              " vanished after orthogonalization at segment k = " + std::to_string(segment)),
        segment_(segment),
        vector_(vector) {}

  std::size_t segment() const noexcept { return segment_; }
  std::size_t vector() const noexcept { return vector_; }

 private:
  std::size_t segment_;
  std::size_t vector_;
};

}  // namespace fgbfi
