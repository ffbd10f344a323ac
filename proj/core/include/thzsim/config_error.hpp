// SPDX-License-Identifier: Apache-2.0
//
// thzsim: link-level simulator for indoor wireless networks above 100 GHz
// Copyright (C) 2026 The thzsim Authors
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

#ifndef THZSIM_CONFIG_ERROR_HPP
#define THZSIM_CONFIG_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace thz
{
    struct ConfigIssue
    {
        std::string key; // "section.key", optionally with an element index
        int line = 0;    // 1-based source line, 0 when not tied to a line
        std::string reason;
    };

    class ConfigError : public std::runtime_error
    {
    public:
        explicit ConfigError(std::vector<ConfigIssue> issues);
        const std::vector<ConfigIssue> &issues() const { return issues_; }

    private:
        std::vector<ConfigIssue> issues_;
    };
}

#endif
