#pragma once

#include <stdexcept>
#include <string>

namespace motioncred {

/// Base for every error the library raises. Decision outcomes (fallback,
/// rejection) are never reported through exceptions.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IngestError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class FusionError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class TrainingError : public Error { using Error::Error; };
class StratificationError : public Error { using Error::Error; };
class EmptySliceError : public Error { using Error::Error; };
class SplitError : public Error { using Error::Error; };
class CalibrationError : public Error { using Error::Error; };
class ConfigurationError : public Error { using Error::Error; };
class PersistenceError : public Error { using Error::Error; };

}  // namespace motioncred
