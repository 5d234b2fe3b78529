// Copyright 2026 the soiq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <string>
#include <string_view>

namespace soiq::prompts {

// Versioned prompt assets. Placeholders use the [NAME] convention and are
// substituted with fill(). The tool-call format and the IDEA JSON schema
// embedded here are wire protocol: the parsers accept exactly what these
// templates teach.

extern const std::string_view kExtractorSystem;
extern const std::string_view kHierarchySystem;
extern const std::string_view kToolIntro;           // the [TOOLS] block
extern const std::string_view kResearcherSystem;    // persona + IDEA JSON schema
extern const std::string_view kResearcherTask;      // [TOPIC], [TOOLS], [PREVIOUS IDEAS]
extern const std::string_view kMentorSystem;        // [TIME], [MAX_ROUND], [TOPIC], [IDEA]
extern const std::string_view kReviseInstruction;   // [QUESTION]
extern const std::string_view kForcedVerdict;
extern const std::string_view kJudgeDirectSystem;
extern const std::string_view kJudgePairSystem;     // [DIMENSION]

std::string fill(std::string_view tpl, const std::map<std::string, std::string>& vars);

}  // namespace soiq::prompts
