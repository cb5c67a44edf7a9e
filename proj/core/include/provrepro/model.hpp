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

// Shared domain types: workflow definitions and runs, cloud resources,
// Cloud-aware provenance rows and reproducibility verdicts.

#ifndef PROVREPRO_MODEL_HPP
#define PROVREPRO_MODEL_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace provrepro {

/// Identity of one executed workflow instance.
struct WfId {
    std::int64_t value = 0;

    friend auto operator<=>(const WfId&, const WfId&) = default;
};

std::string to_string(WfId id);

/// Object-store address. Containers are flat; filenames carry no path.
struct FileRef {
    std::string container;
    std::string filename;

    friend auto operator<=>(const FileRef&, const FileRef&) = default;
};

std::string to_string(const FileRef& ref);

enum class JobKind { Split, WordCount, Merge, MemHog };

std::string_view to_string(JobKind kind) noexcept;
std::optional<JobKind> parse_job_kind(std::string_view text) noexcept;

struct Arity {
    std::size_t inputs;
    std::size_t outputs;
};

/// Declared input/output counts for each built-in kind.
Arity arity_of(JobKind kind) noexcept;

struct JobDefinition {
    std::string name;
    JobKind kind = JobKind::WordCount;
    std::vector<FileRef> inputs;
    std::vector<FileRef> outputs;
    std::int64_t required_ram_mb = 0;
    std::vector<std::string> depends_on;

    friend bool operator==(const JobDefinition&, const JobDefinition&) = default;
};

struct WorkflowDefinition {
    std::string label;
    std::vector<JobDefinition> jobs;

    [[nodiscard]] const JobDefinition* find(std::string_view name) const;

    friend bool operator==(const WorkflowDefinition&,
                           const WorkflowDefinition&) = default;
};

enum class IssueKind {
    CyclicDependency,
    UnknownDependency,
    ArityMismatch,
    DuplicateJobName,
    UnproducedInput,
    DuplicateOutput,
    InvalidField,
};

std::string_view to_string(IssueKind kind) noexcept;

struct ValidationIssue {
    IssueKind kind;
    std::string job;  // empty for workflow-level issues
    std::string message;
};

/// Checks every invariant of a definition and reports all violations.
/// An empty result means the definition is valid.
std::vector<ValidationIssue> validate_workflow(const WorkflowDefinition& def);

/// Throws Error(ValidationFailed) listing every issue when invalid.
void require_valid(const WorkflowDefinition& def);

/// Job names in dependency order, ties broken lexicographically.
/// Throws Error(ValidationFailed) if the dependency relation has a cycle
/// or names an unknown job.
std::vector<std::string> topological_order(const WorkflowDefinition& def);

/// Inputs not produced by any job, in declaration order, deduplicated.
std::vector<FileRef> external_inputs(const WorkflowDefinition& def);

struct Flavor {
    int flavor_id = 0;
    std::string name;
    std::int64_t ram_mb = 0;
    std::int64_t disk_gb = 0;
    int vcpus = 1;

    friend bool operator==(const Flavor&, const Flavor&) = default;
};

struct Image {
    std::string image_id;
    std::string image_name;

    friend bool operator==(const Image&, const Image&) = default;
};

enum class VmState { Active, Destroyed };

std::string_view to_string(VmState state) noexcept;

struct VmInstance {
    std::string ip;
    std::string nodename;
    int flavor_id = 0;
    std::string image_id;
    VmState state = VmState::Active;
    std::string owner;

    friend bool operator==(const VmInstance&, const VmInstance&) = default;
};

enum class JobStatus { Succeeded, FailedOom };

std::string_view to_string(JobStatus status) noexcept;

struct JobRecord {
    std::string job_name;
    std::string host_ip;
    JobStatus status = JobStatus::Succeeded;
    std::vector<FileRef> produced;
    /// Zero-based position in the run's start order.
    int start_seq = 0;

    friend bool operator==(const JobRecord&, const JobRecord&) = default;
};

struct WorkflowRun {
    WfId wf_id;
    WorkflowDefinition definition;
    std::vector<JobRecord> job_records;
    std::string output_container;
    std::optional<WfId> repeat_of;

    /// True when every job of the definition ran and succeeded.
    [[nodiscard]] bool succeeded() const;
    [[nodiscard]] const JobRecord* record_for(std::string_view job) const;

    friend bool operator==(const WorkflowRun&, const WorkflowRun&) = default;
};

/// One row of Cloud-aware provenance: a job joined to the configuration
/// of the VM that executed it.
struct JobResourceMapping {
    WfId wf_id;
    std::string job_name;
    std::string host_ip;
    std::string nodename;
    int flavor_id = 0;
    std::int64_t min_ram_mb = 0;
    std::int64_t min_hd_gb = 0;
    int vcpus = 0;
    std::string image_name;
    std::string image_id;

    /// Denormalized flavor columns equal the catalog entry.
    [[nodiscard]] bool agrees_with(const Flavor& flavor) const noexcept;

    friend bool operator==(const JobResourceMapping&,
                           const JobResourceMapping&) = default;
};

/// An object-store entry. The digest is derived from the content at
/// construction and cannot drift from it.
class CloudFile {
  public:
    CloudFile(FileRef ref, std::string content);

    [[nodiscard]] const FileRef& ref() const noexcept { return ref_; }
    [[nodiscard]] const std::string& container() const noexcept { return ref_.container; }
    [[nodiscard]] const std::string& filename() const noexcept { return ref_.filename; }
    [[nodiscard]] const std::string& content() const noexcept { return content_; }
    [[nodiscard]] const std::string& md5_hex() const noexcept { return md5_hex_; }

  private:
    FileRef ref_;
    std::string content_;
    std::string md5_hex_;
};

struct FileComparison {
    std::string job;
    std::size_t position = 0;
    std::string filename;
    std::string src_container;
    std::string src_hash;
    std::string dest_container;  // empty when the destination lacks the file
    std::string dest_hash;
    bool match = false;
};

/// Three-level reproducibility verdict.
struct ReproReport {
    WfId src_wf_id;
    WfId dest_wf_id;
    bool structure_equal = false;
    bool infrastructure_equal = false;
    bool outputs_equal = false;
    std::vector<FileComparison> per_file;
    std::vector<std::string> structure_diff;
    std::vector<std::string> infrastructure_diff;
    std::vector<std::string> warnings;

    [[nodiscard]] bool verdict() const noexcept {
        return structure_equal && infrastructure_equal && outputs_equal;
    }
};

}  // namespace provrepro

#endif  // PROVREPRO_MODEL_HPP
