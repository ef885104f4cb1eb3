#include "support.hpp"

#include <fstream>
#include <mutex>

#include "winoreg/error.hpp"

namespace fs = std::filesystem;

namespace testsupport {

fs::path fixtures_dir() { return fs::path(WINOREG_FIXTURES_DIR); }

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d(WINOREG_SCRATCH_DIR);
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path resource_root() {
    static std::once_flag once;
    static fs::path root;
    std::call_once(once, [] {
        root = scratch_dir() / "res";
        fs::create_directories(root);
        for (const char* name :
             {"polarity.tsv", "chains.tsv", "synonyms.tsv", "relatedness.tsv", "frames.tsv",
              "scores.tsv", "hitcache.json", "annotations.json"})
            fs::copy_file(fixtures_dir() / name, root / name,
                          fs::copy_options::overwrite_existing);
        const auto index = winoreg::CorpusIndex::build_from_file(
            (fixtures_dir() / "corpus.txt").string());
        index.save((root / "corpus_index.json").string());
    });
    return root;
}

winoreg::ResourceBundle load_bundle(bool network_enabled) {
    winoreg::ResourcePaths paths =
        winoreg::ResourcePaths::from_root(resource_root().string());
    paths.network_enabled = network_enabled;
    return winoreg::ResourceBundle::load(paths);
}

winoreg::Dataset fixture_dataset(const std::string& name) {
    return winoreg::load_dataset((fixtures_dir() / name).string(),
                                 winoreg::DatasetFormat::json);
}

const winoreg::SchemaHalf& half_by_id(const winoreg::Dataset& d, const std::string& id) {
    const winoreg::SchemaHalf* half = d.find(id);
    if (half == nullptr)
        throw winoreg::ValidationError("test fixture has no half '" + id + "'");
    return *half;
}

} // namespace testsupport
