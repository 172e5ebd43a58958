// Copyright 2026 The ties Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace ties {

/// Caller handed us something unusable: bad argument, malformed file,
/// unsatisfiable request. Maps to CLI exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two otherwise-valid pieces of state disagree (dimension mismatches,
/// violated cross-component invariants). Maps to CLI exit code 3.
class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure class for ATNS attention-tensor files. Each rejection reason
/// carries its own code so callers can tell them apart.
enum class AtnsCode {
    Io,            // file cannot be opened / read
    BadMagic,      // header does not start with "ATNS"
    BadVersion,    // magic ok, unsupported version number
    BadDims,       // nonpositive or inconsistent dimensions
    Truncated,     // payload shorter than the header promises
    TrailingData,  // payload longer than the header promises
};

class AtnsError : public InputError {
public:
    AtnsError(AtnsCode code, const std::string& what) : InputError(what), code_(code) {}
    AtnsCode code() const noexcept { return code_; }

private:
    AtnsCode code_;
};

}  // namespace ties
