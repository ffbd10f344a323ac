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

#ifndef THZSIM_CLI_COMMANDS_HPP
#define THZSIM_CLI_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace thz::cli
{
    enum ExitCode : int
    {
        kOk = 0,
        kRuntimeError = 1,
        kUsageError = 2
    };

    // Entry point of the thzsim tool. args excludes the program name.
    int main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
}

#endif
