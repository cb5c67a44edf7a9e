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

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "provrepro/executor.hpp"
#include "provrepro/provenance.hpp"
#include "provrepro/reproduce.hpp"
#include "provrepro/simcloud.hpp"
#include "provrepro/state.hpp"
#include "provrepro/verify.hpp"
#include "provrepro/workflow_file.hpp"

namespace provrepro::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ValidationFailed:
        case ErrorCode::ParseError:
        case ErrorCode::NotCaptured:
        case ErrorCode::UnknownWorkflow:
        case ErrorCode::InvalidName:
        case ErrorCode::FileNotFound:
        case ErrorCode::PreconditionViolation:
            return kExitValidation;
        case ErrorCode::UnknownFlavor:
        case ErrorCode::UnknownImage:
        case ErrorCode::IpSpaceExhausted:
        case ErrorCode::NoSuchInstance:
        case ErrorCode::ProvisioningFailed:
            return kExitProvisioning;
        case ErrorCode::StagingError:
        case ErrorCode::MissingInput:
        case ErrorCode::MalformedInput:
        case ErrorCode::InputsMissing:
            return kExitExecution;
        case ErrorCode::UnmappedJob:
        case ErrorCode::DuplicateCapture:
            return kExitCapture;
        case ErrorCode::StoreCorruption:
        case ErrorCode::Io:
            return kExitState;
    }
    return kExitState;
}

namespace {

WfId parse_wf_id(const std::string& text) {
    std::int64_t value = 0;
    std::istringstream in(text);
    if (!(in >> value) || !in.eof() || value <= 0) {
        throw Error(ErrorCode::UnknownWorkflow, fmt::format("'{}' is not a workflow id", text));
    }
    return WfId{value};
}

std::string read_local_file(const std::string& path) {
    auto content = read_file(path);
    if (!content) {
        throw Error(ErrorCode::StagingError, fmt::format("cannot read input file {}", path));
    }
    return std::move(*content);
}

// `--input` values are either plain paths, bound in order to the workflow's
// external inputs, or `container/filename=path` for an explicit address.
std::vector<StagedInput> bind_inputs(const WorkflowDefinition& def,
                                     const std::vector<std::string>& values) {
    const auto externals = external_inputs(def);
    std::vector<StagedInput> staged;
    std::size_t next = 0;
    for (const auto& value : values) {
        const auto eq = value.find('=');
        const auto slash = value.find('/');
        if (eq != std::string::npos && slash != std::string::npos && slash < eq) {
            FileRef ref{value.substr(0, slash), value.substr(slash + 1, eq - slash - 1)};
            staged.push_back({std::move(ref), read_local_file(value.substr(eq + 1))});
            continue;
        }
        if (next >= externals.size()) {
            throw Error(ErrorCode::ValidationFailed,
                        fmt::format("more --input files than the workflow's {} external input(s)",
                                    externals.size()));
        }
        staged.push_back({externals[next++], read_local_file(value)});
    }
    return staged;
}

struct Context {
    fs::path home;
    std::ostream& out;
    std::ostream& err;
};

int finish_run(const Context& ctx, const WorkflowRun& run, SimCloud& cloud, ExecutionDb& db) {
    ProvenanceStore store(ctx.home);
    const ProvenanceAggregator aggregator(cloud, db);
    try {
        aggregator.capture(run.wf_id, store);
    } catch (const Error& e) {
        ctx.err << "capture failed: " << e.what() << '\n';
        return exit_code_for(e.code()) == kExitValidation ? kExitCapture : exit_code_for(e.code());
    }
    if (!run.succeeded()) {
        ctx.err << fmt::format("wf {} did not complete; unfinished job(s): {}\n",
                               to_string(run.wf_id), fmt::join(unfinished_jobs(run), ", "));
        return kExitExecution;
    }
    return kExitOk;
}

int cmd_run(const Context& ctx, const std::string& workflow_file, std::size_t nodes,
            const std::string& flavor_name, const std::string& image_id,
            const std::vector<std::string>& inputs) {
    if (nodes == 0) {
        throw Error(ErrorCode::ValidationFailed, "--nodes must be at least 1");
    }
    const auto def = load_workflow_file(workflow_file);
    const auto staged = bind_inputs(def, inputs);
    SimCloud cloud(ctx.home);
    ExecutionDb db(ctx.home);
    Executor executor(cloud, db);
    const auto& flavor = cloud.flavor_by_name(flavor_name);
    const auto spec = ClusterSpec::uniform(nodes, flavor.flavor_id, image_id);
    const auto vms = executor.provision_cluster(spec);
    const auto run = executor.submit_on(def, vms, staged);
    ctx.out << "wfID: " << to_string(run.wf_id) << '\n';
    return finish_run(ctx, run, cloud, db);
}

int cmd_capture(const Context& ctx, const std::string& id_text, bool force) {
    const auto id = parse_wf_id(id_text);
    SimCloud cloud(ctx.home);
    ExecutionDb db(ctx.home);
    ProvenanceStore store(ctx.home);
    const auto captured = ProvenanceAggregator(cloud, db).capture(id, store, force);
    ctx.out << fmt::format("captured wf {}: {} job mapping(s)\n", to_string(id),
                           captured.rows.size());
    return kExitOk;
}

int cmd_repeat(const Context& ctx, const std::string& id_text) {
    const auto src = parse_wf_id(id_text);
    SimCloud cloud(ctx.home);
    ExecutionDb db(ctx.home);
    ProvenanceStore store(ctx.home);
    RepeatEngine engine(cloud, db, store);
    const auto result = engine.repeat_workflow(src);
    ctx.out << fmt::format("wfID: {} (repeat of {})\n", to_string(result.run.wf_id),
                           to_string(src));
    if (!result.run.succeeded()) {
        ctx.err << fmt::format("wf {} did not complete; unfinished job(s): {}\n",
                               to_string(result.run.wf_id),
                               fmt::join(unfinished_jobs(result.run), ", "));
        return kExitExecution;
    }
    return kExitOk;
}

int cmd_compare(const Context& ctx, const std::string& src_text, const std::string& dest_text) {
    const auto src = parse_wf_id(src_text);
    const auto dest = parse_wf_id(dest_text);
    SimCloud cloud(ctx.home);
    ExecutionDb db(ctx.home);
    ProvenanceStore store(ctx.home);
    const Verifier verifier(cloud, db, store);
    const auto comparison = verifier.compare_workflow_outputs(src, dest);
    ctx.out << outputs_verdict_line(comparison) << '\n';
    for (const auto& f : comparison.files) {
        if (!f.match) {
            ctx.out << fmt::format("  mismatch: job {} file {}\n", f.job, f.filename);
        }
    }
    for (const auto& w : comparison.warnings) {
        ctx.err << "warning: " << w << '\n';
    }
    write_report_files(ctx.home, src, dest, format_outputs_text(comparison),
                       outputs_csv(src, dest, comparison.files));
    return comparison.equal() ? kExitOk : kExitDiffer;
}

int cmd_report(const Context& ctx, const std::string& src_text, const std::string& dest_text) {
    const auto src = parse_wf_id(src_text);
    const auto dest = parse_wf_id(dest_text);
    SimCloud cloud(ctx.home);
    ExecutionDb db(ctx.home);
    ProvenanceStore store(ctx.home);
    const auto report = Verifier(cloud, db, store).build_report(src, dest);
    const auto text = format_report_text(report);
    ctx.out << text;
    const auto files =
        write_report_files(ctx.home, src, dest, text, outputs_csv(src, dest, report.per_file));
    ctx.out << fmt::format("\nwritten: {}\n         {}\n", files.text.string(),
                           files.csv.string());
    return report.verdict() ? kExitOk : kExitDiffer;
}

int cmd_infra(const Context& ctx, const std::string& id_text, bool all_jobs) {
    const auto id = parse_wf_id(id_text);
    ProvenanceStore store(ctx.home);
    ctx.out << infrastructure_csv(store.get_mappings(id), all_jobs);
    return kExitOk;
}

int cmd_validate(const Context& ctx, const std::string& workflow_file) {
    const auto def = load_workflow_file(workflow_file);
    ctx.out << fmt::format("{}: valid ({} job(s))\n", workflow_file, def.jobs.size());
    return kExitOk;
}

int cmd_vms(const Context& ctx) {
    SimCloud cloud(ctx.home);
    for (const auto& vm : cloud.list_vms()) {
        const auto& flavor = cloud.flavor(vm.flavor_id);
        ctx.out << fmt::format("{}  {}  {}  {}\n", vm.ip, vm.nodename, flavor.name, vm.image_id);
    }
    return kExitOk;
}

int cmd_destroy(const Context& ctx, const std::vector<std::string>& ips) {
    SimCloud cloud(ctx.home);
    for (const auto& ip : ips) {
        cloud.destroy_vm(ip);
        ctx.out << "destroyed " << ip << '\n';
    }
    return kExitOk;
}

int cmd_teardown(const Context& ctx, const std::string& id_text) {
    const auto id = parse_wf_id(id_text);
    SimCloud cloud(ctx.home);
    ProvenanceStore store(ctx.home);
    for (const auto& spec : store.distinct_resource_specs(id)) {
        if (cloud.find_active(spec.host_ip)) {
            cloud.destroy_vm(spec.host_ip);
            ctx.out << "destroyed " << spec.host_ip << " (" << spec.nodename << ")\n";
        }
    }
    return kExitOk;
}

// Each trial runs a memhog job on a VM of the flavor under test, in a
// scratch cloud so sweeps never consume addresses of the real state.
int cmd_memsweep(const Context& ctx, std::int64_t from, std::int64_t to, std::int64_t step,
                 int repeats, const std::string& out_file) {
    if (from <= 0 || from > to || step <= 0 || repeats < 1) {
        ctx.err << "memsweep: need 0 < --from <= --to, --step > 0 and --repeats >= 1\n";
        return kExitValidation;
    }
    auto scratch_template = (fs::temp_directory_path() / "provrepro-memsweep-XXXXXX").string();
    if (::mkdtemp(scratch_template.data()) == nullptr) {
        throw Error(ErrorCode::Io, "cannot create scratch directory");
    }
    const fs::path scratch(scratch_template);
    std::string csv = "flavor,ram_mb,required_mb,trials,successes,success_rate\n";
    try {
        SimCloud cloud(scratch);
        ExecutionDb db(scratch);
        Executor executor(cloud, db);
        for (const auto& flavor : cloud.catalog().flavors) {
            const auto node = cloud.provision_vm(flavor.flavor_id, std::string(kDefaultImageId),
                                                 "memsweep-" + flavor.name);
            // The grid always ends at --to, even when it is off the step.
            std::vector<std::int64_t> grid;
            for (auto required = from; required <= to; required += step) {
                grid.push_back(required);
            }
            if (grid.back() != to) {
                grid.push_back(to);
            }
            for (const auto required : grid) {
                const JobDefinition job{fmt::format("memhog-{}", required), JobKind::MemHog, {},
                                        {}, required, {}};
                int successes = 0;
                for (int trial = 0; trial < repeats; ++trial) {
                    const auto record = executor.run_job(job, node, {}, {}, trial);
                    successes += record.status == JobStatus::Succeeded ? 1 : 0;
                }
                csv += fmt::format("{},{},{},{},{},{:.1f}\n", flavor.name, flavor.ram_mb,
                                   required, repeats, successes,
                                   static_cast<double>(successes) / repeats);
            }
        }
    } catch (...) {
        std::error_code ec;
        fs::remove_all(scratch, ec);
        throw;
    }
    std::error_code ec;
    fs::remove_all(scratch, ec);

    ctx.out << csv;
    if (!out_file.empty()) {
        write_file_atomic(out_file, csv);
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cloud-aware provenance capture and workflow repeatability on a simulated IaaS "
                 "cloud"};
    app.name("provrepro");
    app.require_subcommand(1);

    std::function<int()> action;
    const auto bind = [&](CLI::App* sub, std::function<int()> fn) {
        sub->callback([&action, fn = std::move(fn)] { action = fn; });
    };

    std::string workflow_file;
    std::size_t nodes = 2;
    std::string flavor = "m1.small";
    std::string image = std::string(kDefaultImageId);
    std::vector<std::string> inputs;
    auto* run_cmd = app.add_subcommand("run", "Run a workflow and capture its Cloud-aware provenance");
    run_cmd->add_option("workflow-file", workflow_file, "Workflow definition (JSON)")->required();
    run_cmd->add_option("--nodes", nodes, "Number of compute nodes")->capture_default_str();
    run_cmd->add_option("--flavor", flavor, "Flavor name for every node")->capture_default_str();
    run_cmd->add_option("--image", image, "Image id for every node")->capture_default_str();
    run_cmd->add_option("--input", inputs,
                        "Local input file(s), bound in order to the external inputs, or "
                        "container/filename=path");

    std::string id;
    bool force = false;
    auto* capture_cmd = app.add_subcommand("capture", "(Re-)capture provenance of a run");
    capture_cmd->add_option("wf-id", id, "Workflow id")->required();
    capture_cmd->add_flag("--force", force, "Replace an existing capture");

    auto* repeat_cmd = app.add_subcommand("repeat", "Repeat a captured workflow on equivalent VMs");
    repeat_cmd->add_option("wf-id", id, "Source workflow id")->required();

    std::string src;
    std::string dest;
    auto* compare_cmd = app.add_subcommand("compare", "Compare the outputs of two runs by MD5");
    compare_cmd->add_option("src", src, "Source workflow id")->required();
    compare_cmd->add_option("dest", dest, "Destination workflow id")->required();

    auto* report_cmd =
        app.add_subcommand("report", "Structure, infrastructure and output comparison");
    report_cmd->add_option("src", src, "Source workflow id")->required();
    report_cmd->add_option("dest", dest, "Destination workflow id")->required();

    bool all_jobs = false;
    auto* infra_cmd = app.add_subcommand("infra", "Print the Cloud infrastructure of a run as CSV");
    infra_cmd->add_option("wf-id", id, "Workflow id")->required();
    infra_cmd->add_flag("--all-jobs", all_jobs, "One row per job instead of per host");

    std::int64_t from = 100;
    std::int64_t to = 4096;
    std::int64_t step = 100;
    int repeats = 5;
    std::string out_file;
    auto* sweep_cmd =
        app.add_subcommand("memsweep", "Success rate of memory-hungry jobs per flavor");
    sweep_cmd->add_option("--from", from, "First required MB")->capture_default_str();
    sweep_cmd->add_option("--to", to, "Last required MB")->capture_default_str();
    sweep_cmd->add_option("--step", step, "Increment in MB")->capture_default_str();
    sweep_cmd->add_option("--repeats", repeats, "Trials per cell")->capture_default_str();
    sweep_cmd->add_option("--out", out_file, "Also write the CSV to this file");

    auto* validate_cmd = app.add_subcommand("validate", "Check a workflow definition file");
    validate_cmd->add_option("workflow-file", workflow_file, "Workflow definition")->required();

    auto* vms_cmd = app.add_subcommand("vms", "List active VMs");

    std::vector<std::string> ips;
    auto* destroy_cmd = app.add_subcommand("destroy", "Destroy VMs by IP");
    destroy_cmd->add_option("ip", ips, "Instance IP(s)")->required();

    auto* teardown_cmd = app.add_subcommand("teardown", "Destroy the VMs a captured run used");
    teardown_cmd->add_option("wf-id", id, "Workflow id")->required();

    const Context ctx{resolve_home(), out, err};
    bind(run_cmd, [&] { return cmd_run(ctx, workflow_file, nodes, flavor, image, inputs); });
    bind(capture_cmd, [&] { return cmd_capture(ctx, id, force); });
    bind(repeat_cmd, [&] { return cmd_repeat(ctx, id); });
    bind(compare_cmd, [&] { return cmd_compare(ctx, src, dest); });
    bind(report_cmd, [&] { return cmd_report(ctx, src, dest); });
    bind(infra_cmd, [&] { return cmd_infra(ctx, id, all_jobs); });
    bind(sweep_cmd, [&] { return cmd_memsweep(ctx, from, to, step, repeats, out_file); });
    bind(validate_cmd, [&] { return cmd_validate(ctx, workflow_file); });
    bind(vms_cmd, [&] { return cmd_vms(ctx); });
    bind(destroy_cmd, [&] { return cmd_destroy(ctx, ips); });
    bind(teardown_cmd, [&] { return cmd_teardown(ctx, id); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        // Help requested on a subcommand arrives here too.
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << e.what() << '\n' << "Run with --help for more information.\n";
        return kExitUsage;
    }

    try {
        return action ? action() : kExitUsage;
    } catch (const WorkflowFileError& e) {
        err << e.what() << '\n';
        return kExitValidation;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitState;
    }
}

}  // namespace provrepro::cli
