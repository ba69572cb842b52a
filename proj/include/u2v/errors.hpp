// SPDX-License-Identifier: Apache-2.0
//
// u2vchan: non-stationary UAV-to-vehicle MIMO channel simulator
// Copyright (C) 2026 The u2vchan authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace u2v
{

// Raised when two points that must be distinct (Tx/Rx, terminal/scatterer) coincide.
class degenerate_geometry_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Unknown preset or named entity.
class not_found_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file. `where` is a line number ("line 7") or a field path ("carrier.f0").
class parse_error : public std::runtime_error
{
public:
    parse_error(const std::string &where, const std::string &message)
        : std::runtime_error(where + ": " + message), where_(where), message_(message) {}

    const std::string &where() const { return where_; }
    const std::string &message() const { return message_; }

private:
    std::string where_, message_;
};

class io_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace u2v
