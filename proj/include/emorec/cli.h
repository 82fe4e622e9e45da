// Copyright 2026 The Emorec Authors
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

#ifndef EMOREC_CLI_H_
#define EMOREC_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace emorec {

inline constexpr const char* kVersionString =
    "emorec 0.1.0 (feature ordering v1, report schema 1, forest schema 1, "
    "batch-model schema 1)";

// Runs one CLI invocation; `args` excludes the program name. Exit codes:
// 0 success, 1 validation/parse failure, 2 I/O failure, 64 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace emorec

#endif  // EMOREC_CLI_H_
