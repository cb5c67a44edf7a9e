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

// Workflow execution: a compute cluster on the simulated cloud, a
// deterministic DAG scheduler, the built-in job runner and the execution
// database that records what ran where.

#ifndef PROVREPRO_EXECUTOR_HPP
#define PROVREPRO_EXECUTOR_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "provrepro/model.hpp"
#include "provrepro/simcloud.hpp"

namespace provrepro {

struct ClusterSpec {
    struct Node {
        std::string nodename;
        int flavor_id = 0;
        std::string image_id;
    };

    std::vector<Node> nodes;

    /// count nodes named node1.novalocal, node2.novalocal, ... of one flavor.
    static ClusterSpec uniform(std::size_t count, int flavor_id,
                               std::string image_id = std::string(kDefaultImageId));
};

/// Throws Error(PreconditionViolation) if the spec has no nodes or repeats
/// a nodename.
void check_cluster(const ClusterSpec& spec);

/// Append-only record of executed workflows, persisted as line-delimited
/// JSON in `<home>/wms/runs`. Workflow ids are issued from 1 upwards and
/// reserved before execution so concurrent submitters never collide.
class ExecutionDb {
  public:
    explicit ExecutionDb(const std::filesystem::path& home);

    WfId reserve_id();
    void append(const WorkflowRun& run);

    [[nodiscard]] std::vector<WorkflowRun> runs() const;
    [[nodiscard]] std::optional<WorkflowRun> find(WfId id) const;
    /// Throws Error(UnknownWorkflow).
    [[nodiscard]] WorkflowRun get(WfId id) const;

    /// Job records in topological order (ties by name), each carrying the
    /// files it produced. Throws Error(UnknownWorkflow).
    [[nodiscard]] std::vector<JobRecord> get_workflow_jobs(WfId id) const;

  private:
    std::filesystem::path dir_;
};

struct StagedInput {
    FileRef ref;
    std::string content;
};

struct SubmitOptions {
    std::optional<WfId> repeat_of;
};

/// Job name -> index into the node list, in execution order.
struct Assignment {
    std::string job;
    std::size_t node = 0;
};

/// Round-robin over jobs in topological order (ties by name). Pure
/// function of the definition and the node count.
std::vector<Assignment> plan_schedule(const WorkflowDefinition& def, std::size_t node_count);

class Executor {
  public:
    Executor(SimCloud& cloud, ExecutionDb& db) : cloud_(cloud), db_(db) {}

    std::vector<VmInstance> provision_cluster(
        const ClusterSpec& spec, const std::string& owner = std::string(kDefaultOwner));

    /// Writes external inputs to the object store. Re-staging identical bytes
    /// is a no-op; different bytes under an existing address are refused
    /// with Error(StagingError) because earlier runs may depend on them.
    void stage_inputs(std::span<const StagedInput> inputs);

    /// Provisions the cluster, then submits on it.
    WorkflowRun submit_workflow(const WorkflowDefinition& def, const ClusterSpec& cluster,
                                std::span<const StagedInput> inputs,
                                const SubmitOptions& options = {});

    /// Runs def on already-active nodes. Jobs whose dependencies did not all
    /// succeed are not executed. The run is recorded even when a job fails;
    /// check WorkflowRun::succeeded().
    WorkflowRun submit_on(const WorkflowDefinition& def, std::span<const VmInstance> nodes,
                          std::span<const StagedInput> inputs,
                          const SubmitOptions& options = {});

    /// Executes one job on node. inputs/outputs are the concrete store
    /// addresses for the job's declared FileRefs, position by position.
    JobRecord run_job(const JobDefinition& job, const VmInstance& node,
                      std::span<const FileRef> inputs, std::span<const FileRef> outputs,
                      int start_seq = 0);

  private:
    SimCloud& cloud_;
    ExecutionDb& db_;
};

std::string output_container_for(WfId id);

/// Names of jobs that failed or never ran.
std::vector<std::string> unfinished_jobs(const WorkflowRun& run);

}  // namespace provrepro

#endif  // PROVREPRO_EXECUTOR_HPP
