// Copyright 2026 The asmline Authors.
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

#include "asmline/error.h"

namespace asmline {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedDocument: return "malformed-document";
    case ErrorCode::kDuplicateId: return "duplicate-id";
    case ErrorCode::kDanglingReference: return "dangling-reference";
    case ErrorCode::kDisconnectedGraph: return "disconnected-graph";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kTruncatedFile: return "truncated-file";
    case ErrorCode::kCountMismatch: return "count-mismatch";
    case ErrorCode::kNonFiniteCoordinate: return "non-finite-coordinate";
    case ErrorCode::kInvalidFrame: return "invalid-frame";
    case ErrorCode::kPreconditionViolated: return "precondition-violated";
    case ErrorCode::kMissingConstraint: return "missing-constraint";
    case ErrorCode::kPlanningInfeasible: return "planning-infeasible";
    case ErrorCode::kSizeLimitExceeded: return "size-limit-exceeded";
    case ErrorCode::kInstanceTooLarge: return "instance-too-large";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace asmline
