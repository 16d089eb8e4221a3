/*
* Copyright (C) 2026 riskctl contributors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef RISKCTL_CLI_HPP
#define RISKCTL_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace riskctl
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_numerical = 2;

/**
 * Command-line entry point. args[0] is the program name.
 * Exit codes: 0 success, 1 invalid input or usage, 2 numerical failure. Failures
 * also write {"error": <kind>, "message": <text>} to err.
 */
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace riskctl

#endif
