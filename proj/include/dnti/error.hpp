// Copyright 2026 The dnti Authors
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

#ifndef DNTI_ERROR_HPP_
#define DNTI_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace dnti {

// Malformed input text (network, scenario, measurement or MPS files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a domain rule (non-radial topology,
// missing measurement, zero detection threshold, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dnti

#endif  // DNTI_ERROR_HPP_
