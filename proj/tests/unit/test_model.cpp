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

#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "provrepro/error.hpp"
#include "provrepro/model.hpp"
#include "provrepro/simcloud.hpp"
#include "provrepro/workflow_file.hpp"

using namespace provrepro;

namespace {

bool has_issue(const std::vector<ValidationIssue>& issues, IssueKind kind) {
    return std::any_of(issues.begin(), issues.end(),
                       [&](const auto& i) { return i.kind == kind; });
}

JobDefinition memhog(std::string name, std::vector<std::string> deps = {}) {
    JobDefinition j;
    j.name = std::move(name);
    j.kind = JobKind::MemHog;
    j.required_ram_mb = 64;
    j.depends_on = std::move(deps);
    return j;
}

}  // namespace

TEST_CASE("wordcount workflow is valid") {
    const auto def = wordcount_workflow({"wfinput", "corpus.txt"});
    CHECK(validate_workflow(def).empty());
    REQUIRE(def.jobs.size() == 4);
    CHECK(topological_order(def) ==
          std::vector<std::string>{"split", "analysis1", "analysis2", "merge"});
}

TEST_CASE("empty workflow is valid") {
    const WorkflowDefinition def{"empty", {}};
    CHECK(validate_workflow(def).empty());
    CHECK(topological_order(def).empty());
}

TEST_CASE("self-loop is a cycle") {
    WorkflowDefinition def{"loop", {memhog("A", {"A"})}};
    const auto issues = validate_workflow(def);
    CHECK(has_issue(issues, IssueKind::CyclicDependency));
    CHECK(std::count_if(issues.begin(), issues.end(), [](const auto& i) {
              return i.kind == IssueKind::CyclicDependency;
          }) == 1);
    CHECK_THROWS_AS(require_valid(def), Error);
}

TEST_CASE("every violation is reported, not only the first") {
    WorkflowDefinition def;
    auto a = memhog("A", {"B"});
    auto b = memhog("B", {"A", "ghost"});
    auto dup = memhog("A");
    JobDefinition wc;
    wc.name = "wc";
    wc.kind = JobKind::WordCount;
    wc.required_ram_mb = 0;
    wc.inputs = {{"wfoutput", "nobody-makes-this"}, {"x", "y"}};
    wc.outputs = {};
    def.jobs = {a, b, dup, wc};
    const auto issues = validate_workflow(def);
    CHECK(has_issue(issues, IssueKind::CyclicDependency));
    CHECK(has_issue(issues, IssueKind::UnknownDependency));
    CHECK(has_issue(issues, IssueKind::DuplicateJobName));
    CHECK(has_issue(issues, IssueKind::ArityMismatch));
    CHECK(has_issue(issues, IssueKind::InvalidField));
}

TEST_CASE("input produced by a non-ancestor is rejected") {
    auto def = wordcount_workflow({"wfinput", "corpus.txt"});
    for (auto& job : def.jobs) {
        if (job.name == "analysis1") {
            job.depends_on.clear();
        }
    }
    const auto issues = validate_workflow(def);
    REQUIRE(has_issue(issues, IssueKind::UnproducedInput));
    CHECK(std::any_of(issues.begin(), issues.end(), [](const auto& i) {
        return i.kind == IssueKind::UnproducedInput && i.job == "analysis1";
    }));
}

TEST_CASE("input produced by a transitive ancestor is accepted") {
    auto def = wordcount_workflow({"wfinput", "corpus.txt"});
    // merge reads analysis1/analysis2; make it also depend only transitively
    // on split by reading wordlist1 through a chain.
    JobDefinition tail;
    tail.name = "tail";
    tail.kind = JobKind::WordCount;
    tail.required_ram_mb = 64;
    tail.inputs = {{"wfoutput", "wordlist1"}};
    tail.outputs = {{"wfoutput", "tail_out"}};
    tail.depends_on = {"merge"};
    def.jobs.push_back(tail);
    CHECK(validate_workflow(def).empty());
}

TEST_CASE("validation agrees with brute-force topological sortability") {
    std::mt19937_64 rng(20261016);
    int cases = 0;
    int cyclic = 0;
    for (int n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 40; ++trial) {
            const auto def = testing::random_dag_or_cycle(rng, n);
            const auto oracle = testing::brute_force_topo_order(def);
            const bool valid = validate_workflow(def).empty();
            CHECK(valid == oracle.has_value());
            if (oracle) {
                CHECK(topological_order(def) == *oracle);
            } else {
                ++cyclic;
                CHECK_THROWS_AS((void)topological_order(def), Error);
            }
            ++cases;
        }
    }
    CHECK(cases >= 100);
    CHECK(cyclic > 0);
}

TEST_CASE("single bit flip always changes the digest") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> len(1, 300);
    for (int trial = 0; trial < 100; ++trial) {
        std::string content(static_cast<std::size_t>(len(rng)), '\0');
        for (auto& c : content) {
            c = static_cast<char>(byte(rng));
        }
        const CloudFile original({"c", "f"}, content);
        std::uniform_int_distribution<std::size_t> pos(0, content.size() - 1);
        std::uniform_int_distribution<int> bit(0, 7);
        content[pos(rng)] ^= static_cast<char>(1 << bit(rng));
        const CloudFile flipped({"c", "f"}, content);
        CHECK(original.md5_hex() != flipped.md5_hex());
        CHECK(flipped.md5_hex() == testing::openssl_md5_hex(content));
    }
}

TEST_CASE("digest is lowercase hex") {
    const CloudFile f({"c", "f"}, "hello");
    CHECK(f.md5_hex().size() == 32);
    CHECK(std::all_of(f.md5_hex().begin(), f.md5_hex().end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    }));
}

TEST_CASE("denormalized flavor columns must agree with the catalog") {
    const auto small = Catalog::defaults().flavors.at(1);
    JobResourceMapping row;
    row.flavor_id = small.flavor_id;
    row.min_ram_mb = 2048;
    row.min_hd_gb = 20;
    row.vcpus = 1;
    CHECK(row.agrees_with(small));
    row.min_ram_mb = 4096;
    CHECK_FALSE(row.agrees_with(small));
}

TEST_CASE("job kinds round-trip through their names") {
    for (const auto kind : {JobKind::Split, JobKind::WordCount, JobKind::Merge, JobKind::MemHog}) {
        CHECK(parse_job_kind(to_string(kind)) == kind);
    }
    CHECK_FALSE(parse_job_kind("shell").has_value());
    CHECK(arity_of(JobKind::Split).inputs == 1);
    CHECK(arity_of(JobKind::Split).outputs == 2);
    CHECK(arity_of(JobKind::Merge).inputs == 2);
    CHECK(arity_of(JobKind::MemHog).outputs == 0);
}

TEST_CASE("external inputs are the unproduced ones, deduplicated") {
    const auto def = wordcount_workflow({"wfinput", "corpus.txt"});
    CHECK(external_inputs(def) == std::vector<FileRef>{{"wfinput", "corpus.txt"}});
}

TEST_CASE("report verdict is the conjunction of its three levels") {
    for (int mask = 0; mask < 8; ++mask) {
        ReproReport r;
        r.structure_equal = (mask & 1) != 0;
        r.infrastructure_equal = (mask & 2) != 0;
        r.outputs_equal = (mask & 4) != 0;
        CHECK(r.verdict() == (mask == 7));
    }
}
