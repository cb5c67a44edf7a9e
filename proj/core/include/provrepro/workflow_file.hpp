// Copyright 2026 The provrepro Authors
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

// Workflow definition files (JSON). Schema:
//
//   {
//     "label": "wordcount",
//     "jobs": [
//       {
//         "name": "split",
//         "kind": "split" | "wordcount" | "merge" | "memhog",
//         "inputs":  [{"container": "wfinput", "filename": "corpus.txt"}],
//         "outputs": [{"container": "wfoutput", "filename": "wordlist1"}, ...],
//         "required_ram_mb": 128,
//         "depends_on": ["other-job", ...]
//       }
//     ]
//   }
//
// "inputs", "outputs" and "depends_on" default to empty arrays; every other
// field is required and unknown keys are rejected. Output containers are
// logical: at run time all outputs land in the run's own output container.

#ifndef PROVREPRO_WORKFLOW_FILE_HPP
#define PROVREPRO_WORKFLOW_FILE_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "provrepro/error.hpp"
#include "provrepro/model.hpp"

namespace provrepro {

struct Diagnostic {
    int line = 0;        // 1-based; 0 when unknown
    int column = 0;      // 1-based; 0 when unknown
    std::string field;   // JSON pointer, e.g. "/jobs/2/kind"
    std::string message;
};

std::string to_string(const Diagnostic& diagnostic, std::string_view source);

class WorkflowFileError : public Error {
  public:
    WorkflowFileError(ErrorCode code, std::string source,
                      std::vector<Diagnostic> diagnostics);

    [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const noexcept {
        return diagnostics_;
    }

  private:
    std::vector<Diagnostic> diagnostics_;
};

/// Parses and validates a definition. Throws WorkflowFileError carrying
/// every structural and semantic violation found.
WorkflowDefinition parse_workflow(std::string_view text,
                                  std::string_view source = "<input>");

WorkflowDefinition load_workflow_file(const std::filesystem::path& path);

/// Pretty-printed JSON in the schema above.
std::string format_workflow(const WorkflowDefinition& def);

/// The four-job wordcount application: split -> {analysis1, analysis2} -> merge.
WorkflowDefinition wordcount_workflow(const FileRef& corpus,
                                      std::int64_t required_ram_mb = 128);

}  // namespace provrepro

#endif  // PROVREPRO_WORKFLOW_FILE_HPP
