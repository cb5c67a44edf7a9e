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

#include <benchmark/benchmark.h>
#include <stdlib.h>

#include <filesystem>
#include <random>
#include <string>

#include "provrepro/executor.hpp"
#include "provrepro/jobs.hpp"
#include "provrepro/md5.hpp"
#include "provrepro/provenance.hpp"
#include "provrepro/verify.hpp"
#include "provrepro/workflow_file.hpp"

namespace {

using namespace provrepro;

std::string random_words(std::size_t bytes) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> letter('a', 'z');
    std::uniform_int_distribution<int> word_len(1, 9);
    std::string text;
    text.reserve(bytes + 10);
    while (text.size() < bytes) {
        const int n = word_len(rng);
        for (int i = 0; i < n; ++i) {
            text.push_back(static_cast<char>(letter(rng)));
        }
        text.push_back(' ');
    }
    return text;
}

class ScratchHome {
  public:
    ScratchHome() {
        auto pattern = (std::filesystem::temp_directory_path() / "provrepro-bench-XXXXXX").string();
        path_ = ::mkdtemp(pattern.data());
    }
    ~ScratchHome() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

void BM_Md5(benchmark::State& state) {
    const std::string data(static_cast<std::size_t>(state.range(0)), 'x');
    for (auto _ : state) {
        benchmark::DoNotOptimize(md5_hex(data));
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Md5)->Range(64, 1 << 20);

void BM_Split(benchmark::State& state) {
    const auto text = random_words(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(split_text(text));
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Split)->Range(1 << 10, 1 << 20);

void BM_WordCount(benchmark::State& state) {
    const auto text = random_words(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(word_count(text));
    }
    state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WordCount)->Range(1 << 10, 1 << 20);

// One wordcount submission on a persistent two-node cluster, including
// the on-disk execution database and object store.
void BM_SubmitWordcount(benchmark::State& state) {
    ScratchHome home;
    SimCloud cloud(home.path());
    ExecutionDb db(home.path());
    Executor exec(cloud, db);
    const FileRef corpus{"wfinput", "corpus.txt"};
    const StagedInput input{corpus, random_words(static_cast<std::size_t>(state.range(0)))};
    exec.stage_inputs({&input, 1});
    const auto nodes = exec.provision_cluster(ClusterSpec::uniform(2, 2));
    const auto def = wordcount_workflow(corpus);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exec.submit_on(def, nodes, {}));
    }
}
BENCHMARK(BM_SubmitWordcount)->Arg(1 << 10)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

void BM_MapJobsToVms(benchmark::State& state) {
    ScratchHome home;
    SimCloud cloud(home.path());
    ExecutionDb db(home.path());
    Executor exec(cloud, db);
    const FileRef corpus{"wfinput", "corpus.txt"};
    const StagedInput input{corpus, random_words(4096)};
    const auto run =
        exec.submit_workflow(wordcount_workflow(corpus), ClusterSpec::uniform(2, 2), {&input, 1});
    const ProvenanceAggregator agg(cloud, db);
    for (auto _ : state) {
        benchmark::DoNotOptimize(agg.map_jobs_to_vms(run.wf_id));
    }
}
BENCHMARK(BM_MapJobsToVms)->Unit(benchmark::kMicrosecond);

void BM_CompareOutputs(benchmark::State& state) {
    ScratchHome home;
    SimCloud cloud(home.path());
    ExecutionDb db(home.path());
    Executor exec(cloud, db);
    ProvenanceStore store(home.path());
    const FileRef corpus{"wfinput", "corpus.txt"};
    const StagedInput input{corpus, random_words(1 << 16)};
    const auto def = wordcount_workflow(corpus);
    const auto a = exec.submit_workflow(def, ClusterSpec::uniform(2, 2), {&input, 1});
    const auto b = exec.submit_workflow(def, ClusterSpec::uniform(2, 2), {});
    const Verifier verifier(cloud, db, store);
    for (auto _ : state) {
        benchmark::DoNotOptimize(verifier.compare_workflow_outputs(a.wf_id, b.wf_id));
    }
}
BENCHMARK(BM_CompareOutputs)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
