#pragma once

#include <stdexcept>
#include <string>

namespace kspec {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroSignal : Error {
  ZeroSignal() : Error("signal has zero Euclidean norm") {}
};

struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& what) : Error(what) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

struct LagTooLarge : Error {
  explicit LagTooLarge(const std::string& what) : Error(what) {}
};

struct RankDeficient : Error {
  explicit RankDeficient(const std::string& what) : Error(what) {}
};

struct BadK : Error {
  explicit BadK(const std::string& what) : Error(what) {}
};

struct EmptyInput : Error {
  EmptyInput() : Error("empty input") {}
};

struct NonFinite : Error {
  explicit NonFinite(const std::string& what) : Error(what) {}
};

struct DegenerateSignal : Error {
  explicit DegenerateSignal(const std::string& what) : Error(what) {}
};

struct ConstantInput : Error {
  explicit ConstantInput(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace kspec
