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

// Reproducibility verification at three levels: workflow structure,
// execution infrastructure and workflow outputs.

#ifndef PROVREPRO_VERIFY_HPP
#define PROVREPRO_VERIFY_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "provrepro/executor.hpp"
#include "provrepro/model.hpp"
#include "provrepro/provenance.hpp"
#include "provrepro/simcloud.hpp"

namespace provrepro {

struct OutputComparison {
    WfId src;
    WfId dest;
    int file_counter = 0;
    int comparison_counter = 0;
    std::vector<FileComparison> files;
    std::vector<std::string> warnings;

    /// Both counters agree.
    [[nodiscard]] bool equal() const noexcept { return file_counter == comparison_counter; }
};

struct StructureComparison {
    bool equal = false;
    std::vector<std::string> diff;
};

/// Jobs must match by (name, kind) and the dependency edge sets must be
/// identical.
StructureComparison compare_structures(const WorkflowDefinition& src,
                                       const WorkflowDefinition& dest);

class Verifier {
  public:
    Verifier(const SimCloud& cloud, const ExecutionDb& db, const ProvenanceStore& store)
        : cloud_(cloud), db_(db), store_(store) {}

    /// Hash comparison of every output file of src against the file the
    /// same job produced at the same output position in dest. A file the
    /// destination lacks counts toward FileCounter but never matches.
    /// Throws UnknownWorkflow.
    [[nodiscard]] OutputComparison compare_workflow_outputs(WfId src, WfId dest) const;

    /// Compares the archived definitions. Throws NotCaptured.
    [[nodiscard]] StructureComparison compare_workflow_structure(WfId src, WfId dest) const;

    [[nodiscard]] ReproReport build_report(WfId src, WfId dest) const;

  private:
    const SimCloud& cloud_;
    const ExecutionDb& db_;
    const ProvenanceStore& store_;
};

inline constexpr std::string_view kOutputsCsvHeader = "Job,WFID,ContainerName,FileName,MD5Hash";

/// Two rows per compared file (source, then destination).
std::string outputs_csv(WfId src, WfId dest, const std::vector<FileComparison>& files);

std::string format_outputs_text(const OutputComparison& comparison);
std::string format_report_text(const ReproReport& report);

/// "OUTPUTS MATCH (5/5)" or "OUTPUTS DIFFER (4/5)".
std::string outputs_verdict_line(const OutputComparison& comparison);

struct ReportFiles {
    std::filesystem::path text;
    std::filesystem::path csv;
};

/// Writes `<home>/reports/<src>_<dest>.txt` and `.csv`.
ReportFiles write_report_files(const std::filesystem::path& home, WfId src, WfId dest,
                               const std::string& text, const std::string& csv);

}  // namespace provrepro

#endif  // PROVREPRO_VERIFY_HPP
