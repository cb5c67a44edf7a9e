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

#ifndef PROVREPRO_REPRODUCE_HPP
#define PROVREPRO_REPRODUCE_HPP

#include <string>
#include <string_view>
#include <vector>

#include "provrepro/executor.hpp"
#include "provrepro/provenance.hpp"
#include "provrepro/simcloud.hpp"

namespace provrepro {

/// "osdc-vm3.novalocal" -> "osdc-vm3-rep.novalocal", "mynode" -> "mynode-rep".
std::string repeat_nodename(std::string_view nodename);

struct RepeatResult {
    WorkflowRun run;
    std::vector<VmInstance> nodes;  // freshly provisioned, one per source host
    CapturedWorkflow capture;
};

/// Re-executes a captured workflow on freshly provisioned VMs whose flavor
/// and image equal those recorded for the source, then captures the new
/// run's provenance with a link back to the source.
class RepeatEngine {
  public:
    RepeatEngine(SimCloud& cloud, ExecutionDb& db, ProvenanceStore& store,
                 std::string owner = std::string(kDefaultOwner))
        : cloud_(cloud), db_(db), store_(store), owner_(std::move(owner)) {}

    /// Throws NotCaptured, InputsMissing, ProvisioningFailed; submit and
    /// capture errors propagate unchanged.
    RepeatResult repeat_workflow(WfId src);

  private:
    SimCloud& cloud_;
    ExecutionDb& db_;
    ProvenanceStore& store_;
    std::string owner_;
};

struct HostConfig {
    int flavor_id = 0;
    std::int64_t ram_mb = 0;
    std::int64_t hd_gb = 0;
    int vcpus = 0;
    std::string image_id;

    friend auto operator<=>(const HostConfig&, const HostConfig&) = default;
};

std::string to_string(const HostConfig& config);

struct InfrastructureComparison {
    bool equal = false;
    std::vector<HostConfig> src_hosts;   // sorted
    std::vector<HostConfig> dest_hosts;  // sorted
    std::vector<std::string> diff;       // empty when equal
};

/// Equal iff the multisets of per-host configurations match. IPs and
/// nodenames are ignored. Throws NotCaptured.
InfrastructureComparison compare_infrastructure(const ProvenanceStore& store, WfId src,
                                                WfId dest);

}  // namespace provrepro

#endif  // PROVREPRO_REPRODUCE_HPP
