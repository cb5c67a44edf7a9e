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

#include <filesystem>

#include "doctest.h"
#include "provrepro/error.hpp"
#include "provrepro/executor.hpp"
#include "provrepro/provenance.hpp"
#include "provrepro/reproduce.hpp"
#include "provrepro/workflow_file.hpp"
#include "temp_home.hpp"

using namespace provrepro;
using provrepro::testing::TempHome;

namespace {

const FileRef kCorpus{"wfinput", "corpus.txt"};

struct Env {
    TempHome home;
    SimCloud cloud{home.path()};
    ExecutionDb db{home.path()};
    Executor exec{cloud, db};
    ProvenanceStore store{home.path()};
    ProvenanceAggregator agg{cloud, db};
    RepeatEngine engine{cloud, db, store};

    WfId captured_wordcount(int flavor = 2, std::size_t nodes = 2) {
        const StagedInput input{kCorpus, "to be or not to be that is the question"};
        const auto run = exec.submit_workflow(wordcount_workflow(kCorpus),
                                              ClusterSpec::uniform(nodes, flavor), {&input, 1});
        agg.capture(run.wf_id, store);
        return run.wf_id;
    }
};

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("repeat nodename suffix") {
    CHECK(repeat_nodename("osdc-vm3.novalocal") == "osdc-vm3-rep.novalocal");
    CHECK(repeat_nodename("mynode") == "mynode-rep");
}

TEST_CASE("faithful repeat re-provisions identical configurations") {
    Env env;
    const auto src = env.captured_wordcount();
    const auto result = env.engine.repeat_workflow(src);
    CHECK(result.run.wf_id == WfId{2});
    CHECK(result.run.repeat_of == src);
    CHECK(result.capture.repeat_of == src);
    CHECK(result.run.succeeded());
    REQUIRE(result.nodes.size() == 2);
    CHECK(result.nodes[0].nodename == "node1-rep.novalocal");
    CHECK(result.nodes[1].nodename == "node2-rep.novalocal");
    for (const auto& vm : result.nodes) {
        CHECK(vm.flavor_id == 2);
        CHECK(vm.image_id == "f102960c-557c-4253-8277-2df5ffe3c169");
    }
    // Fresh VMs; the originals stay up.
    CHECK(result.nodes[0].ip == "172.16.1.4");
    CHECK(env.cloud.list_vms().size() == 4);

    const auto src_specs = env.store.distinct_resource_specs(src);
    const auto dest_specs = env.store.distinct_resource_specs(result.run.wf_id);
    REQUIRE(src_specs.size() == dest_specs.size());
    for (std::size_t i = 0; i < src_specs.size(); ++i) {
        CHECK(dest_specs[i].nodename == repeat_nodename(src_specs[i].nodename));
        CHECK(dest_specs[i].flavor_id == src_specs[i].flavor_id);
        CHECK(dest_specs[i].image_id == src_specs[i].image_id);
    }

    const auto cmp = compare_infrastructure(env.store, src, result.run.wf_id);
    CHECK(cmp.equal);
    CHECK(cmp.diff.empty());
    CHECK(cmp.src_hosts.size() == 2);
}

TEST_CASE("two repeats are independent and both link to the source") {
    Env env;
    const auto src = env.captured_wordcount();
    const auto a = env.engine.repeat_workflow(src);
    const auto b = env.engine.repeat_workflow(src);
    CHECK(a.run.wf_id != b.run.wf_id);
    CHECK(a.run.repeat_of == src);
    CHECK(b.run.repeat_of == src);
    CHECK(compare_infrastructure(env.store, a.run.wf_id, b.run.wf_id).equal);
    CHECK(env.db.get(b.run.wf_id).repeat_of == src);
}

TEST_CASE("repeat chains point strictly backwards") {
    Env env;
    auto id = env.captured_wordcount();
    for (int i = 0; i < 3; ++i) {
        const auto next = env.engine.repeat_workflow(id).run.wf_id;
        CHECK(env.db.get(next).repeat_of == id);
        CHECK(id < next);
        id = next;
    }
}

TEST_CASE("repeat preconditions") {
    Env env;
    CHECK(code_of([&] { env.engine.repeat_workflow(WfId{1}); }) == ErrorCode::NotCaptured);

    const auto src = env.captured_wordcount();
    std::filesystem::remove(env.home.path() / "cloud" / "objects" / "wfinput" / "corpus.txt");
    CHECK(code_of([&] { env.engine.repeat_workflow(src); }) == ErrorCode::InputsMissing);
}

TEST_CASE("repeat fails cleanly when the address space is gone") {
    Env env;
    const auto src = env.captured_wordcount();
    for (int k = 4; k <= 254; ++k) {
        env.cloud.provision_vm(1, std::string(kDefaultImageId), "filler");
    }
    CHECK(code_of([&] { env.engine.repeat_workflow(src); }) == ErrorCode::ProvisioningFailed);
}

TEST_CASE("infrastructure comparison") {
    Env env;
    const auto small = env.captured_wordcount(2);
    const auto medium = env.captured_wordcount(3);
    CHECK(compare_infrastructure(env.store, small, small).equal);
    const auto cmp = compare_infrastructure(env.store, small, medium);
    CHECK_FALSE(cmp.equal);
    CHECK(cmp.diff.size() == 2);
    const auto one_host = env.captured_wordcount(2, 1);
    CHECK_FALSE(compare_infrastructure(env.store, small, one_host).equal);
    CHECK(code_of([&] { (void)compare_infrastructure(env.store, small, WfId{99}); }) ==
          ErrorCode::NotCaptured);
}
