// Copyright 2026 The cpspdc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CPSPDC_ERROR_HPP
#define CPSPDC_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpspdc {

enum class ErrorKind {
    OutOfRange,
    MalformedTable,
    NoRoot,
    EmptySupport,
    NotNormalized,
    NegativeIntensity,
    AxisMismatch,
    EmptyCurve,
    InvalidBrightness,
    UnknownChannel,
    MissingTrigger,
    ZeroDispersion,
    InsufficientSpan,
    EmptySidePeaks,
    ShapeMismatch,
    CwHasNoEnvelope,
    InvalidArgument,
    Config,
    Io,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::MalformedTable: return "MalformedTable";
        case ErrorKind::NoRoot: return "NoRoot";
        case ErrorKind::EmptySupport: return "EmptySupport";
        case ErrorKind::NotNormalized: return "NotNormalized";
        case ErrorKind::NegativeIntensity: return "NegativeIntensity";
        case ErrorKind::AxisMismatch: return "AxisMismatch";
        case ErrorKind::EmptyCurve: return "EmptyCurve";
        case ErrorKind::InvalidBrightness: return "InvalidBrightness";
        case ErrorKind::UnknownChannel: return "UnknownChannel";
        case ErrorKind::MissingTrigger: return "MissingTrigger";
        case ErrorKind::ZeroDispersion: return "ZeroDispersion";
        case ErrorKind::InsufficientSpan: return "InsufficientSpan";
        case ErrorKind::EmptySidePeaks: return "EmptySidePeaks";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::CwHasNoEnvelope: return "CwHasNoEnvelope";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Config: return "Config";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

/// Numerical failures (as opposed to bad input) map to CLI exit code 3.
inline bool is_numerical(ErrorKind kind) {
    return kind == ErrorKind::NoRoot || kind == ErrorKind::EmptySupport;
}

class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

   private:
    ErrorKind kind_;
};

}  // namespace cpspdc

#endif
