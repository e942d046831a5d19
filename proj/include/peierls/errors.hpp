#pragma once

#include <stdexcept>
#include <string>

namespace peierls {

// Base class for all numerical/model failures raised by the library.
// The CLI maps these to exit code 3 (upstream model error).
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonFiniteDerivative : Error {
  explicit NonFiniteDerivative(const std::string& msg) : Error(msg) {}
};

struct SupportOutOfRange : Error {
  explicit SupportOutOfRange(const std::string& msg) : Error(msg) {}
};

struct SingularLvv : Error {
  explicit SingularLvv(const std::string& msg) : Error(msg) {}
};

struct BlowUp : Error {
  explicit BlowUp(const std::string& msg) : Error(msg) {}
};

struct ConjugatePoint : Error {
  explicit ConjugatePoint(const std::string& msg) : Error(msg) {}
};

struct NoConvergence : Error {
  explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

struct NotASolution : Error {
  explicit NotASolution(const std::string& msg) : Error(msg) {}
};

struct GridMismatch : Error {
  explicit GridMismatch(const std::string& msg) : Error(msg) {}
};

struct MissingMetric : Error {
  explicit MissingMetric(const std::string& msg) : Error(msg) {}
};

struct ConjugateEndpoints : Error {
  explicit ConjugateEndpoints(const std::string& msg) : Error(msg) {}
};

struct DegenerateWronskian : Error {
  explicit DegenerateWronskian(const std::string& msg) : Error(msg) {}
};

struct SupportTouchesBoundary : Error {
  explicit SupportTouchesBoundary(const std::string& msg) : Error(msg) {}
};

struct NonHermitian : Error {
  explicit NonHermitian(const std::string& msg) : Error(msg) {}
};

struct UnboundedWindow : Error {
  explicit UnboundedWindow(const std::string& msg) : Error(msg) {}
};

struct ResonantInterval : Error {
  explicit ResonantInterval(const std::string& msg) : Error(msg) {}
};

struct MasslessZeroMode : Error {
  explicit MasslessZeroMode(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace peierls
