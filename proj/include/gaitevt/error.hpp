// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace gaitevt {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input files (trial CSV, events CSV, report JSON).
class FormatError : public Error {
public:
    using Error::Error;
};

// Invalid DetectorConfig values or non-positive sample rate.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Out-of-range kernel arguments: cutoff at or above Nyquist, short series.
class ParameterError : public Error {
public:
    using Error::Error;
};

// The data cannot support detection (no progression, no dominant period, ...).
class DetectionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace gaitevt
