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

// Cloud-aware provenance: joining execution records with the VM inventory
// and persisting the result together with the archived workflow.

#ifndef PROVREPRO_PROVENANCE_HPP
#define PROVREPRO_PROVENANCE_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "provrepro/executor.hpp"
#include "provrepro/model.hpp"
#include "provrepro/simcloud.hpp"

namespace provrepro {

struct UnmappedJob {
    std::string job;
    std::string ip;

    friend bool operator==(const UnmappedJob&, const UnmappedJob&) = default;
};

struct MappingResult {
    std::vector<JobResourceMapping> rows;  // sorted by job name
    std::vector<UnmappedJob> unmapped;

    [[nodiscard]] bool complete() const noexcept { return unmapped.empty(); }
};

/// What the store holds for one workflow run.
struct CapturedWorkflow {
    WfId wf_id;
    std::optional<WfId> repeat_of;
    WorkflowDefinition definition;
    std::vector<JobResourceMapping> rows;  // sorted by job name
};

/// One entry of the re-provisioning shopping list.
struct ResourceSpec {
    std::string host_ip;
    std::string nodename;
    int flavor_id = 0;
    std::string image_id;

    friend bool operator==(const ResourceSpec&, const ResourceSpec&) = default;
};

struct StoreOptions {
    std::optional<WfId> repeat_of;
    /// Replace an existing capture instead of failing with DuplicateCapture.
    bool force = false;
};

/// Persisted under `<home>/prov/`: one `<wf_id>.jsonl` per captured run
/// (a workflow header line followed by one line per mapping row) plus an
/// `index` listing captured runs. Each capture is written with a single
/// atomic rename, so a wf_id is either fully captured or not at all.
class ProvenanceStore {
  public:
    explicit ProvenanceStore(const std::filesystem::path& home);

    /// Throws DuplicateCapture (unless options.force) or
    /// PreconditionViolation when rows disagree on wf_id, repeat a job or
    /// name a job outside the definition.
    void store_mappings(WfId wf_id, std::span<const JobResourceMapping> rows,
                        const WorkflowDefinition& definition, const StoreOptions& options = {});

    [[nodiscard]] bool is_captured(WfId wf_id) const;
    [[nodiscard]] std::vector<WfId> captured() const;

    /// Throws NotCaptured.
    [[nodiscard]] CapturedWorkflow get_mappings(WfId wf_id) const;

    /// Distinct hosts of a capture, in order of first use by the workflow's
    /// topological job order. Throws NotCaptured.
    [[nodiscard]] std::vector<ResourceSpec> distinct_resource_specs(WfId wf_id) const;

  private:
    [[nodiscard]] std::filesystem::path file_for(WfId wf_id) const;
    void rewrite_index() const;

    std::filesystem::path dir_;
};

/// Distinct hosts of rows, ordered by first use along job_order.
std::vector<ResourceSpec> distinct_resource_specs(std::span<const JobResourceMapping> rows,
                                                  std::span<const std::string> job_order);

/// Joins execution records with the VM inventory visible to one owner.
class ProvenanceAggregator {
  public:
    ProvenanceAggregator(const SimCloud& cloud, const ExecutionDb& db,
                         std::string owner = std::string(kDefaultOwner))
        : cloud_(cloud), db_(db), owner_(std::move(owner)) {}

    /// One row per job record whose host IP belongs to an active VM; the
    /// rest are reported as unmapped. Nothing is persisted. Throws
    /// UnknownWorkflow.
    [[nodiscard]] MappingResult map_jobs_to_vms(WfId wf_id) const;

    /// map_jobs_to_vms followed by store_mappings. Refuses partial captures
    /// with Error(UnmappedJob) and stores nothing in that case.
    CapturedWorkflow capture(WfId wf_id, ProvenanceStore& store, bool force = false) const;

  private:
    const SimCloud& cloud_;
    const ExecutionDb& db_;
    std::string owner_;
};

inline constexpr std::string_view kInfrastructureCsvHeader =
    "wfID,Host IP,nodename,Flavour Id,minRAM (MB),minHD (GB),vCPU,Image name,Image id";

/// Infrastructure table as CSV: one row per distinct host, or per job when
/// per_job is set.
std::string infrastructure_csv(const CapturedWorkflow& captured, bool per_job);

}  // namespace provrepro

#endif  // PROVREPRO_PROVENANCE_HPP
