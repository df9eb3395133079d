#pragma once

#include <stdexcept>
#include <string>

namespace sarms {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateGeometry : public Error { public: using Error::Error; };
class EmptyRoi : public Error { public: using Error::Error; };
class ShapeMismatch : public Error { public: using Error::Error; };
class AllZeroImage : public Error { public: using Error::Error; };
class NoConvergence : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class BadMagic : public IoError { public: using IoError::IoError; };
class VersionMismatch : public IoError { public: using IoError::IoError; };
class DimsOverflow : public IoError { public: using IoError::IoError; };
class ConfigError : public Error { public: using Error::Error; };

}  // namespace sarms
