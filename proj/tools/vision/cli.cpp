/**
 * @file cli.cpp
 */

#include "cli.hpp"

#include "vision/api/server.hpp"
#include "vision/api/service.hpp"
#include "vision/bench/scan_bench.hpp"
#include "vision/catalog/catalog.hpp"
#include "vision/common/config.hpp"
#include "vision/common/error.hpp"
#include "vision/common/file_io.hpp"
#include "vision/common/json.hpp"
#include "vision/common/layout.hpp"
#include "vision/integrity/snapshot.hpp"
#include "vision/ingest/pipeline.hpp"
#include "vision/synth/clinic.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <pthread.h>
#include <random>
#include <thread>

namespace vision::cli {

namespace fs = std::filesystem;

namespace {

struct common_flags {
    std::string config_path;
    std::uint64_t seed{0};
    std::string inbox{"inbox"};
    std::string landing{"landing"};
    std::string staging{"staging"};
    std::string clinical{"cdw"};

    [[nodiscard]] auto load_config() const -> config {
        return config_path.empty() ? config{} : config::load(config_path);
    }
    [[nodiscard]] auto open_clinic(const config& cfg) const -> synth::clinic {
        return {staging, clinical, synth::extraction_model::from_config(cfg)};
    }
    [[nodiscard]] auto ingest_options(const config& cfg) const -> ingest::ingest_options {
        auto o = ingest::ingest_options::from_config(cfg);
        if (fs::is_directory(clinical)) o.clinical_dir = clinical;
        return o;
    }
};

/// Error reported as a usage problem (exit 2).
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

auto parse_modality(const std::string& text) -> synth::modality {
    if (text == "CR") return synth::modality::cr;
    if (text == "MR") return synth::modality::mr;
    throw usage_error("modality must be CR or MR, got '" + text + "'");
}

struct generate_args {
    std::string batch;
    std::size_t studies{0};
    std::uint64_t files{0};
    std::string modality{"CR"};
    std::vector<std::string> faults;
};

auto cmd_generate(const common_flags& flags, const generate_args& a, std::ostream& out) -> int {
    const auto cfg = flags.load_config();
    auto clinic = flags.open_clinic(cfg);
    synth::assemble_options options;
    options.profile = synth::generation_profile::from_config(cfg);
    const auto m = parse_modality(a.modality);
    const auto batch = a.batch.empty() ? "batch-" + std::to_string(flags.seed) : a.batch;
    const auto studies =
        a.files > 0 ? synth::plan_files(m, a.files, flags.seed, options.profile)
                    : synth::plan_studies(m, a.studies > 0 ? a.studies : cfg.get_u64("batch.size", 10), flags.seed,
                                          options.profile);
    std::vector<synth::fault_descriptor> faults;
    for (const auto& f : a.faults) faults.push_back(synth::parse_fault(f));
    const auto assembled = clinic.stage(batch, studies, faults, flags.seed, options);
    out << canonical_json(assembled.batch);
    return exit_ok;
}

struct transfer_args {
    std::string batch;
    double cap{-1};
    bool delete_confirmed{false};
};

auto cmd_transfer(const common_flags& flags, const transfer_args& a, std::ostream& out) -> int {
    const auto cfg = flags.load_config();
    auto clinic = flags.open_clinic(cfg);
    if (a.delete_confirmed) {
        // Hands research-side confirmations back to the clinic.
        const ingest::landing_paths paths{flags.landing};
        nlohmann::json deleted = nlohmann::json::array();
        for (const auto& staged : clinic.staged_batches()) {
            if (clinic.deletion(staged.batch_id)) continue;
            const auto record = ingest::read_record(paths, staged.batch_id);
            if (record && record->confirmation) {
                deleted.push_back(clinic.delete_on_confirmation(staged.batch_id, record->confirmation));
            }
        }
        out << canonical_json(deleted);
        return exit_ok;
    }
    if (a.batch.empty()) throw usage_error("transfer needs --batch or --delete-confirmed");
    const double cap = a.cap >= 0 ? a.cap : cfg.get_double("transfer.cap", 0.0);
    out << canonical_json(clinic.transfer_batch(a.batch, flags.inbox, cap));
    return exit_ok;
}

struct ingest_args {
    std::vector<std::string> batches;
    bool all{false};
    std::string stop_after;
    bool confirm{false};
    std::string reject;
    bool retransfer{false};
};

auto cmd_ingest(const common_flags& flags, const ingest_args& a, std::ostream& out, std::ostream& err) -> int {
    const auto cfg = flags.load_config();
    fs::create_directories(flags.landing);
    ingest::landing_lock lock(flags.landing);
    ingest::ingest_service service(flags.landing, flags.ingest_options(cfg));

    const int actions = int(a.confirm) + int(!a.reject.empty()) + int(a.retransfer);
    if (actions > 1) throw usage_error("choose one of --confirm, --reject, --request-retransfer");
    if (actions == 1) {
        if (a.batches.size() != 1) throw usage_error("operator actions take exactly one --batch");
        const auto& id = a.batches.front();
        if (a.confirm) {
            out << canonical_json(service.confirm_receipt(id));
        } else if (!a.reject.empty()) {
            out << canonical_json(service.reject_batch(id, a.reject));
        } else {
            out << canonical_json(service.request_retransfer(id));
        }
        return exit_ok;
    }

    ingest::run_options run;
    if (!a.stop_after.empty()) {
        run.stop_after = ingest::parse_batch_state(a.stop_after);
        if (!run.stop_after) throw usage_error("unknown state '" + a.stop_after + "'");
    }
    auto ids = a.batches;
    if (a.all) {
        if (fs::is_directory(flags.inbox)) {
            for (const auto& e : fs::directory_iterator(flags.inbox)) {
                const auto name = e.path().filename().string();
                if (e.is_directory() && layout::is_valid_batch_id(name)) ids.push_back(name);
            }
        }
        for (const auto& r : service.list_records()) ids.push_back(r.batch_id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
    if (ids.empty()) throw usage_error("ingest needs --batch or --all");

    int status = exit_ok;
    for (const auto& id : ids) {
        if (!service.load_record(id)) (void)service.receive_batch(flags.inbox, id);
        const auto record = service.run_pipeline(id, run);
        out << id << ' ' << ingest::to_string(record.state) << '\n';
        if (record.state == ingest::batch_state::rejected) {
            err << id << " rejected: " << record.rejection_reason.value_or("") << '\n';
            status = exit_failure;
        }
    }
    return status;
}

auto cmd_verify(const common_flags& flags, const std::string& batch, std::ostream& out, std::ostream& err) -> int {
    const auto root = ingest::landing_paths{flags.landing}.batch_dir(batch);
    if (!fs::is_directory(root)) throw error(error_code::not_found, "no batch " + batch + " in " + flags.landing);
    const auto report = integrity::verify_snapshot(integrity::load_snapshot(root), root);
    out << canonical_json(report);
    for (const auto& p : report.mismatched) err << "MISMATCHED " << p << '\n';
    for (const auto& p : report.missing) err << "MISSING " << p << '\n';
    for (const auto& p : report.added) err << "ADDED " << p << '\n';
    return report.ok ? exit_ok : exit_failure;
}

struct query_args {
    std::vector<std::string> filters;
    bool count{false};
    std::size_t limit{0};
};

auto cmd_query(const common_flags& flags, const query_args& a, std::ostream& out) -> int {
    std::map<std::string, std::string> pairs;
    for (const auto& f : a.filters) {
        const auto eq = f.find('=');
        if (eq == std::string::npos) throw usage_error("filter '" + f + "' is not field=value");
        pairs[f.substr(0, eq)] = f.substr(eq + 1);
    }
    const auto filter = catalog::catalog_filter::from_pairs(pairs);
    const auto view = catalog::catalog::load_view(ingest::landing_paths{flags.landing}.catalog_dir());
    const auto rows = view.query(filter);
    if (a.count) {
        out << rows.size() << '\n';
        return exit_ok;
    }
    std::size_t shown = 0;
    for (const auto& e : rows) {
        if (a.limit > 0 && shown++ == a.limit) break;
        out << nlohmann::json(e).dump() << '\n';
    }
    return exit_ok;
}

auto cmd_profile(const common_flags& flags, const std::string& batch, std::ostream& out) -> int {
    const ingest::landing_paths paths{flags.landing};
    if (!batch.empty()) {
        const auto report = paths.report(batch, "quality");
        if (!fs::exists(report)) throw error(error_code::not_found, "no quality report for batch " + batch);
        out << read_text(report);
        return exit_ok;
    }
    const auto records = ingest::read_records(paths);
    out << profiler::serialize(profiler::profile_corpus(catalog::catalog::load_view(paths.catalog_dir()), records));
    return exit_ok;
}

struct bench_args {
    bench::scan_bench_options options;
    std::string dir;
    double min_rate{0};
};

auto cmd_bench(const common_flags& flags, bench_args a, std::ostream& out, std::ostream& err) -> int {
    a.options.seed = flags.seed;
    fs::path dir = a.dir;
    const bool scratch = dir.empty();
    if (scratch) {
        dir = fs::temp_directory_path() / ("vision-bench-" + std::to_string(std::random_device{}()));
    } else if (fs::exists(dir) && !fs::is_empty(dir)) {
        throw usage_error("bench directory " + dir.string() + " is not empty");
    }
    fs::create_directories(dir);
    bench::scan_bench_result result;
    try {
        result = bench::run_scan_bench(dir, a.options);
    } catch (...) {
        if (scratch) fs::remove_all(dir);
        throw;
    }
    if (scratch) fs::remove_all(dir);
    out << canonical_json(result);
    if (result.files_per_second < a.min_rate) {
        err << "throughput " << result.files_per_second << " files/s is below the floor " << a.min_rate << '\n';
        return exit_failure;
    }
    return exit_ok;
}

auto cmd_serve(const common_flags& flags, const std::string& host, int port, std::ostream& out) -> int {
    const auto cfg = flags.load_config();
    fs::create_directories(flags.landing);
    ingest::landing_lock lock(flags.landing);
    ingest::ingest_service service(flags.landing, flags.ingest_options(cfg));

    std::optional<synth::clinic> clinic;
    if (fs::is_directory(flags.staging)) clinic.emplace(flags.open_clinic(cfg));
    api::service api(service, [&](const confirmation_event& e) {
        if (clinic && clinic->find(e.batch_id)) (void)clinic->delete_on_confirmation(e.batch_id, e);
    });
    api::server http(api);

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    const int bound = http.bind(host, port);
    out << "listening on http://" << host << ':' << bound << api::prefix << std::endl;
    std::thread watcher([&] {
        int received = 0;
        sigwait(&signals, &received);
        http.stop();
    });
    const bool ok = http.listen();
    if (!ok) pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
    return ok ? exit_ok : exit_failure;
}

/// First argument that is neither a global option nor its value; every global option takes a value.
auto first_command_word(const std::vector<std::string>& args) -> std::optional<std::string> {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "-h" || args[i] == "--help") return std::nullopt;
        if (!args[i].starts_with("-")) return args[i];
        if (args[i].find('=') == std::string::npos) ++i;
    }
    return std::nullopt;
}

}  // namespace

auto run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int {
    CLI::App app{"Imaging batch transfer, ingest and profiling", "vision"};
    app.require_subcommand(1);
    app.fallthrough();

    common_flags flags;
    app.add_option("--config", flags.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", flags.seed, "generator seed");
    app.add_option("--inbox", flags.inbox, "transfer inbox directory")->capture_default_str();
    app.add_option("--landing", flags.landing, "landing zone directory")->capture_default_str();
    app.add_option("--staging", flags.staging, "clinic staging directory")->capture_default_str();
    app.add_option("--clinical", flags.clinical, "clinical snapshot directory")->capture_default_str();

    generate_args gen;
    auto* generate = app.add_subcommand("generate", "stage a synthetic batch at the clinic");
    generate->add_option("--batch", gen.batch, "batch id (default batch-<seed>)");
    generate->add_option("--studies", gen.studies, "study count (default batch.size)");
    generate->add_option("--files", gen.files, "exact file total instead of a study count");
    generate->add_option("--modality", gen.modality, "CR or MR")->capture_default_str();
    generate->add_option("--fault", gen.faults, "KIND[:count], repeatable");

    transfer_args xfer;
    auto* transfer = app.add_subcommand("transfer", "send a staged batch to the inbox");
    transfer->add_option("--batch", xfer.batch, "batch id");
    transfer->add_option("--cap", xfer.cap, "bandwidth cap in bytes/s, 0 for none (default transfer.cap)");
    transfer->add_flag("--delete-confirmed", xfer.delete_confirmed,
                       "delete staged batches whose receipt the landing zone has confirmed");

    ingest_args ing;
    auto* ingest = app.add_subcommand("ingest", "receive and process batches");
    ingest->add_option("--batch", ing.batches, "batch id, repeatable");
    ingest->add_flag("--all", ing.all, "every batch in the inbox plus unfinished ones");
    ingest->add_option("--stop-after", ing.stop_after, "stop once this state is persisted");
    ingest->add_flag("--confirm", ing.confirm, "confirm receipt of a VERIFIED/UNVERIFIED batch");
    ingest->add_option("--reject", ing.reject, "reject a VERIFIED/UNVERIFIED batch with this reason");
    ingest->add_flag("--request-retransfer", ing.retransfer, "flag a REJECTED batch for re-sending");

    std::string verify_batch;
    auto* verify = app.add_subcommand("verify", "re-check a landed batch against its snapshot");
    verify->add_option("--batch", verify_batch, "batch id")->required();

    query_args q;
    auto* query = app.add_subcommand("query", "print catalog entries as ndjson");
    query->add_option("--filter", q.filters, "field=value, repeatable");
    query->add_flag("--count", q.count, "print only the number of matches");
    query->add_option("--limit", q.limit, "at most this many rows");

    std::string profile_batch;
    auto* profile = app.add_subcommand("profile", "print a batch quality report or corpus statistics");
    profile->add_option("--batch", profile_batch, "batch id; omit for the corpus");

    bench_args b;
    auto* bench = app.add_subcommand("bench", "time header scanning over generated files");
    bench->add_option("--files", b.options.files, "file count")->capture_default_str();
    bench->add_option("--workers", b.options.workers, "scan workers, 0 for hardware concurrency");
    bench->add_option("--payload", b.options.payload_bytes, "pixel bytes per file")->capture_default_str();
    bench->add_option("--dir", b.dir, "empty directory to generate into (default: a temporary one)");
    bench->add_option("--min-rate", b.min_rate, "exit 1 below this many files/s");

    std::string host{"127.0.0.1"};
    int port{8080};
    auto* serve = app.add_subcommand("serve", "run the /api/v1 HTTP service");
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port, "0 picks a free port")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        if (const auto word = first_command_word(args); word && !app.get_subcommand_no_throw(*word)) {
            err << "vision: unknown subcommand '" << *word << "'\n\n" << app.help();
            return exit_usage;
        }
        err << "vision: " << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    try {
        if (generate->parsed()) return cmd_generate(flags, gen, out);
        if (transfer->parsed()) return cmd_transfer(flags, xfer, out);
        if (ingest->parsed()) return cmd_ingest(flags, ing, out, err);
        if (verify->parsed()) return cmd_verify(flags, verify_batch, out, err);
        if (query->parsed()) return cmd_query(flags, q, out);
        if (profile->parsed()) return cmd_profile(flags, profile_batch, out);
        if (bench->parsed()) return cmd_bench(flags, b, out, err);
        if (serve->parsed()) return cmd_serve(flags, host, port, out);
    } catch (const usage_error& e) {
        err << "vision: " << e.what() << '\n';
        return exit_usage;
    } catch (const error& e) {
        err << "vision: " << to_string(e.code()) << ": " << e.what() << '\n';
        const bool usage = e.code() == error_code::unknown_filter_field || e.code() == error_code::unknown_fault_kind;
        return usage ? exit_usage : exit_failure;
    } catch (const std::exception& e) {
        err << "vision: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_usage;
}

}  // namespace vision::cli
