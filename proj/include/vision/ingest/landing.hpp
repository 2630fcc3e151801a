/**
 * @file landing.hpp
 * @brief Landing-zone layout and the exclusive mutation lock
 *
 *     <landing>/<batch_id>/...                      received batch root
 *     <landing>/<batch_id>/_integrity.snapshot.tsv
 *     <landing>/<batch_id>/_reports/<batch_id>.{record,scan,reconciliation,duplicates,link,quality}.json
 *     <landing>/_catalog/catalog.ndjson, catalog.idx
 *     <landing>/_reports/corpus.json
 *     <landing>/_reports/api.mutations.ndjson
 *     <landing>/.vision.lock
 */

#pragma once

#include <filesystem>
#include <string>

namespace vision::ingest {

struct landing_paths {
    std::filesystem::path root;

    [[nodiscard]] auto batch_dir(const std::string& id) const -> std::filesystem::path { return root / id; }
    [[nodiscard]] auto report(const std::string& id, const std::string& name) const -> std::filesystem::path;
    /// Relative to the batch directory, as stored in batch_record::reports.
    [[nodiscard]] static auto report_relative(const std::string& id, const std::string& name) -> std::string;
    [[nodiscard]] auto record(const std::string& id) const -> std::filesystem::path { return report(id, "record"); }
    [[nodiscard]] auto catalog_dir() const -> std::filesystem::path { return root / "_catalog"; }
    [[nodiscard]] auto corpus_report() const -> std::filesystem::path { return root / "_reports" / "corpus.json"; }
    [[nodiscard]] auto mutation_log() const -> std::filesystem::path {
        return root / "_reports" / "api.mutations.ndjson";
    }
    [[nodiscard]] auto lock_path() const -> std::filesystem::path;
};

/// Non-blocking exclusive flock on `<landing>/.vision.lock`, held for the object's lifetime.
class landing_lock {
public:
    /// Throws vision::error(lock_held) if another process holds it.
    explicit landing_lock(const std::filesystem::path& landing);
    ~landing_lock();
    landing_lock(const landing_lock&) = delete;
    landing_lock& operator=(const landing_lock&) = delete;

private:
    int fd_{-1};
};

}  // namespace vision::ingest
