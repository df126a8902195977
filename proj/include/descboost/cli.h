// Copyright 2026 The descboost Authors.
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

#ifndef DESCBOOST_CLI_H_
#define DESCBOOST_CLI_H_

#include <ostream>

namespace descboost {

// Entry point of the descboost tool. Returns the process exit code:
// 0 success, 1 configuration or usage, 2 IO or malformed input, 3 generator
// or model service, 4 data mismatch.
int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err);

}  // namespace descboost

#endif  // DESCBOOST_CLI_H_
