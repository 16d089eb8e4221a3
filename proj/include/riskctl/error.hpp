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
#ifndef RISKCTL_ERROR_HPP
#define RISKCTL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace riskctl
{

/// Failure kinds raised by the toolkit. The CLI maps them onto exit codes.
enum class ErrorCode
{
    DimensionMismatch,
    ProbabilityOutOfRange,
    SelfLoop,
    InvalidArgument,
    ParseError,
    ValidationError,
    UnknownSchemaVersion,
    StratumInfeasible,
    TargetsUnreachable,
    NoConvergence,
    SingularInnerMatrix,
    SaturatedPoint,
    IndefiniteValueMatrix,
};

std::string_view to_string(ErrorCode code);

/// True for failures of a numerical method rather than of the input.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message)
        , m_code(code)
    {
    }

    ErrorCode code() const
    {
        return m_code;
    }

private:
    ErrorCode m_code;
};

} // namespace riskctl

#endif
