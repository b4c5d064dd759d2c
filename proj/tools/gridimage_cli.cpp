// gridimage: images of linear maps on product sets over F_p.
//
// Subcommands: bound, image, normalize, verify, search, conjecture.
// Output is JSON on stdout with an embedded reproducibility manifest;
// --csv switches table-like results to CSV. Exit codes: 0 success,
// 2 bad input, 3 out of theorem scope, 4 resource cap exceeded.

#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridimage/json_io.hpp"
#include "gridimage/text.hpp"
#include "gridimage/verify.hpp"
#include "gridimage/version.hpp"

namespace {

using nlohmann::json;
using namespace gridimage;

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string iso_timestamp() {
    std::time_t t;
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t cell_cap_from_env() {
    if (const char* s = std::getenv("GRIDIMAGE_CELL_CAP")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(s, &end, 10);
        if (s == end || *end != '\0' || v == 0) {
            throw ValueError("GRIDIMAGE_CELL_CAP must be a positive integer");
        }
        return v;
    }
    return kDefaultCellCap;
}

json make_manifest(const std::string& command, json config, std::optional<std::uint64_t> seed,
                   const std::map<std::string, std::string>& input_hashes) {
    json m{{"tool", "gridimage"}, {"version", kVersion},
           {"command", command},  {"config", std::move(config)},
           {"seed", nullptr},     {"timestamp", iso_timestamp()},
           {"input_hashes", input_hashes}};
    if (seed) m["seed"] = *seed;
    return m;
}

/// Cache key over everything that determines the output, timestamp aside.
std::string manifest_cache_key(json manifest) {
    manifest.erase("timestamp");
    return fnv1a_hex(manifest.dump());
}

void emit(const json& manifest, const json& result) {
    const json out{{"manifest", manifest}, {"result", result}};
    std::cout << out.dump(2) << "\n";
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::optional<std::string> cache_lookup(const std::string& dir, const std::string& key) {
    if (dir.empty()) return std::nullopt;
    const std::filesystem::path path = std::filesystem::path(dir) / (key + ".json");
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void cache_store(const std::string& dir, const std::string& key, const std::string& text) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    const std::filesystem::path path = std::filesystem::path(dir) / (key + ".json");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValueError("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct GridArgs {
    std::string grid_path;
    std::string sets_literal;

    void attach(CLI::App* cmd) {
        auto* file = cmd->add_option("--grid", grid_path, "grid file (p = ..., A1 = {...}, ...)");
        auto* sets = cmd->add_option("--sets", sets_literal,
                                     "inline grid literal, e.g. \"p=5; {0,1}; {0,2}\"");
        file->excludes(sets);
    }

    GridFamily load(std::map<std::string, std::string>& hashes, json& config) const {
        if (!grid_path.empty()) {
            const std::string text = read_file(grid_path);
            hashes["grid:" + grid_path] = fnv1a_hex(text);
            config["grid"] = grid_path;
            return parse_grid_file_text(text);
        }
        if (!sets_literal.empty()) {
            hashes["sets"] = fnv1a_hex(sets_literal);
            config["sets"] = sets_literal;
            return parse_grid_literal(sets_literal);
        }
        throw ValueError("provide a grid with --grid or --sets");
    }
};

struct MatrixArgs {
    int star_n = 0;
    std::string matrix_literal;

    void attach(CLI::App* cmd) {
        auto* star = cmd->add_option("--star", star_n,
                                     "use the map (x_1..x_n) -> (x_1+x_n, ..., x_{n-1}+x_n)");
        auto* mat = cmd->add_option("--matrix", matrix_literal,
                                    "matrix literal, e.g. \"p=5; [[2,1,0],[1,0,1]]\"");
        star->excludes(mat);
    }

    /// `p_hint` supplies the modulus for --star when no grid determines it.
    MatrixFp load(std::optional<PrimeModulus> p_hint, std::map<std::string, std::string>& hashes,
                  json& config) const {
        if (!matrix_literal.empty()) {
            hashes["matrix"] = fnv1a_hex(matrix_literal);
            config["matrix"] = matrix_literal;
            MatrixFp m = parse_matrix_literal(matrix_literal);
            if (p_hint && m.modulus() != *p_hint) {
                throw ValueError("matrix modulus does not match the grid's p");
            }
            return m;
        }
        if (star_n > 0) {
            if (!p_hint) throw ValueError("--star needs --p (or a grid) to fix the modulus");
            config["star"] = star_n;
            return star_matrix(*p_hint, star_n);
        }
        throw ValueError("provide a map with --matrix or --star");
    }
};

int cmd_bound(const MatrixArgs& margs, std::uint32_t p, const std::vector<std::int64_t>& sizes) {
    std::map<std::string, std::string> hashes;
    json config{{"sizes", sizes}};
    std::optional<PrimeModulus> mod;
    if (p != 0) {
        mod = PrimeModulus(p);
        config["p"] = p;
    }
    const MatrixFp m = margs.load(mod, hashes, config);
    const BoundReport report = best_bound(m, sizes);
    emit(make_manifest("bound", config, std::nullopt, hashes), report);
    return report.applicable ? 0 : 3;
}

int cmd_image(const MatrixArgs& margs, const GridArgs& gargs, int workers,
              std::int64_t max_points) {
    std::map<std::string, std::string> hashes;
    json config{{"workers", workers}, {"max_points", max_points}};
    const GridFamily grid = gargs.load(hashes, config);
    const MatrixFp m = margs.load(grid.modulus(), hashes, config);
    if (m.cols() != grid.arity()) {
        throw ValueError("matrix has " + std::to_string(m.cols()) + " columns but the grid has " +
                         std::to_string(grid.arity()) + " sets");
    }
    const std::uint64_t cap = cell_cap_from_env();
    const ImageSet img = is_star_matrix(m) ? star_image_fast(grid, cap)
                                           : image(m, grid, workers, cap);
    emit(make_manifest("image", config, std::nullopt, hashes), image_to_json(img, max_points));
    return 0;
}

int cmd_normalize(const MatrixArgs& margs, const GridArgs& gargs) {
    std::map<std::string, std::string> hashes;
    json config = json::object();
    const GridFamily grid = gargs.load(hashes, config);
    const MatrixFp m = margs.load(grid.modulus(), hashes, config);
    const std::uint64_t cap = cell_cap_from_env();

    const NormalizationResult r = normalize(m, grid);
    const std::int64_t before = image_size(m, grid, 1, cap);
    const std::int64_t after = image_size(r.canonical, r.transformed_grid, 1, cap);
    if (before != after) {
        throw Error("internal: normalization changed the image size from " +
                    std::to_string(before) + " to " + std::to_string(after));
    }
    json result = r;
    result["image_size_before"] = before;
    result["image_size_after"] = after;
    emit(make_manifest("normalize", config, std::nullopt, hashes), result);
    return 0;
}

json check_to_json(const CheckResult& r) {
    return json{{"name", r.name},
                {"pass", r.pass},
                {"checked", r.checked},
                {"detail", r.detail},
                {"millis", r.millis}};
}

int cmd_verify(const std::string& suite, std::optional<std::uint64_t> seed, bool csv) {
    const auto names = checks_for_suite(suite);
    if (suite_needs_seed(suite) && !seed) {
        throw ValueError("suite '" + suite + "' is randomized; pass an explicit --seed");
    }
    std::vector<CheckResult> results;
    bool all_pass = true;
    for (const auto& name : names) {
        results.push_back(run_named_check(name, seed.value_or(0)));
        all_pass = all_pass && results.back().pass;
    }
    if (csv) {
        std::cout << "name,pass,checked,millis,detail\n";
        for (const auto& r : results) {
            std::cout << csv_escape(r.name) << "," << (r.pass ? "true" : "false") << ","
                      << r.checked << "," << r.millis << "," << csv_escape(r.detail) << "\n";
        }
    } else {
        json config{{"suite", suite}, {"csv", csv}};
        json checks = json::array();
        for (const auto& r : results) checks.push_back(check_to_json(r));
        const json result{{"suite", suite}, {"checks", checks}, {"pass", all_pass}};
        emit(make_manifest("verify", config, seed, {}), result);
    }
    return all_pass ? 0 : 1;
}

/// Exact interval-grid image for star maps; the natural benchmark column.
std::optional<std::int64_t> interval_benchmark(const MatrixFp& map,
                                               const std::vector<std::int64_t>& sizes,
                                               std::uint64_t cap) {
    if (!is_star_matrix(map)) return std::nullopt;
    std::vector<std::uint32_t> widths(sizes.begin(), sizes.end());
    return star_image_fast(GridFamily::intervals(map.modulus(), widths), cap).size();
}

std::string search_csv(const ExtremalRecord& rec, std::uint32_t p,
                       const std::vector<std::int64_t>& shape,
                       std::optional<std::int64_t> interval_value,
                       std::optional<std::uint64_t> seed, std::int64_t iterations) {
    std::ostringstream out;
    out << "p,shape,theorem,bound,min_found,interval_value,tight,seed,iterations\n";
    std::string shape_str;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) shape_str += ",";
        shape_str += std::to_string(shape[i]);
    }
    out << p << "," << csv_escape(shape_str) << "," << theorem_name(rec.bound.theorem) << ",";
    if (rec.bound.value) out << *rec.bound.value;
    out << "," << rec.image_size << ",";
    if (interval_value) out << *interval_value;
    out << "," << (rec.tight ? "true" : "false") << ",";
    if (seed) out << *seed;
    out << "," << iterations << "\n";
    return out.str();
}

struct SearchArgs {
    MatrixArgs margs;
    std::uint32_t p = 0;
    std::vector<std::int64_t> sizes;
    bool exhaustive = false;
    std::int64_t iterations = 0;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::uint64_t family_cap = kDefaultFamilyCap;
    std::string checkpoint_path;
    std::string cache_dir;
    bool csv = false;
};

int cmd_search(const SearchArgs& a) {
    std::map<std::string, std::string> hashes;
    json config{{"p", a.p},
                {"sizes", a.sizes},
                {"mode", a.exhaustive ? "exhaustive" : "random"},
                {"iterations", a.iterations},
                {"workers", a.workers},
                {"family_cap", a.family_cap},
                {"csv", a.csv}};
    const PrimeModulus mod(a.p);
    const MatrixFp map = a.margs.load(mod, hashes, config);

    SearchConfig cfg{mod,
                     a.sizes,
                     a.exhaustive ? SearchMode::Exhaustive : SearchMode::Random,
                     a.iterations,
                     a.seed.value_or(0),
                     a.workers,
                     a.family_cap,
                     cell_cap_from_env()};
    if (!a.exhaustive) {
        if (!a.seed) throw ValueError("random search requires an explicit --seed");
        if (a.iterations < 1) throw ValueError("random search requires --iterations >= 1");
        config["seed"] = *a.seed;
    }

    const json manifest = make_manifest("search", config, a.seed, hashes);
    const std::string key = manifest_cache_key(manifest);
    if (auto cached = cache_lookup(a.cache_dir, key)) {
        std::cerr << "cache hit " << key << "\n";
        std::cout << *cached;
        return 0;
    }

    ExtremalRecord rec = [&] {
        if (!a.exhaustive) return random_search(cfg, map);

        const auto families = count_families(mod, a.sizes);
        std::cerr << "families: "
                  << (families ? std::to_string(*families) : std::string("more than 2^64")) << "\n";
        std::optional<SearchCheckpoint> resume;
        const std::string cfg_hash =
            fnv1a_hex(json{{"p", a.p}, {"sizes", a.sizes}, {"map", format_matrix(map)}}.dump());
        if (!a.checkpoint_path.empty() && std::filesystem::exists(a.checkpoint_path)) {
            const json saved = json::parse(read_file(a.checkpoint_path));
            if (saved.at("config_hash").get<std::string>() != cfg_hash) {
                throw ValueError("checkpoint belongs to a different configuration");
            }
            resume = checkpoint_from_json(saved.at("checkpoint"));
            std::cerr << "resuming from position " << resume->position << "\n";
        }
        CheckpointSink sink;
        if (!a.checkpoint_path.empty() && a.workers == 1) {
            sink = [&](const SearchCheckpoint& cp) {
                json out{{"config_hash", cfg_hash}, {"checkpoint", cp}};
                std::ofstream f(a.checkpoint_path, std::ios::trunc);
                f << out.dump(2) << "\n";
            };
        }
        return exhaustive_min_image(cfg, map, resume, sink);
    }();

    std::string text;
    if (a.csv) {
        text = search_csv(rec, a.p, a.sizes, interval_benchmark(map, a.sizes, cfg.cell_cap),
                          a.seed, a.iterations);
    } else {
        json result = rec;
        result["mode"] = a.exhaustive ? "exhaustive" : "random";
        const json out{{"manifest", manifest}, {"result", result}};
        text = out.dump(2) + "\n";
    }
    std::cout << text;
    cache_store(a.cache_dir, key, text);
    return 0;
}

struct ConjectureArgs {
    std::uint32_t p = 0;
    std::int64_t k = 0;
    std::int64_t iterations = 200;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::uint64_t family_cap = kDefaultFamilyCap;
    std::string cache_dir;
    bool csv = false;
};

int cmd_conjecture(const ConjectureArgs& a) {
    if (!a.seed) throw ValueError("conjecture exploration requires an explicit --seed");
    const json config{{"p", a.p},       {"k", a.k},
                      {"iterations", a.iterations}, {"seed", *a.seed},
                      {"workers", a.workers},       {"family_cap", a.family_cap},
                      {"csv", a.csv}};
    const json manifest = make_manifest("conjecture", config, a.seed, {});
    const std::string key = manifest_cache_key(manifest);
    if (auto cached = cache_lookup(a.cache_dir, key)) {
        std::cerr << "cache hit " << key << "\n";
        std::cout << *cached;
        return 0;
    }

    const PrimeModulus mod(a.p);
    const ConjectureReport rep = conjecture_gap_report(mod, a.k, a.iterations, *a.seed,
                                                       a.workers, a.family_cap,
                                                       cell_cap_from_env());
    std::string text;
    if (a.csv) {
        const std::int64_t min_found = rep.exhaustive_min.value_or(rep.search_min);
        const std::string shape = std::to_string(rep.k) + "," + std::to_string(rep.k) + "," +
                                  std::to_string(rep.k);
        std::ostringstream out;
        out << "p,shape,theorem,bound,min_found,interval_value,tight,seed,iterations\n"
            << a.p << "," << csv_escape(shape) << ",LargeK," << rep.theorem_bound << ","
            << min_found << "," << rep.interval_image << ","
            << (min_found == rep.theorem_bound ? "true" : "false") << "," << rep.seed << ","
            << rep.iterations << "\n";
        text = out.str();
    } else {
        const json out{{"manifest", manifest}, {"result", rep}};
        text = out.dump(2) + "\n";
    }
    std::cout << text;
    cache_store(a.cache_dir, key, text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"images of linear maps on product sets over F_p"};
    app.require_subcommand(1);

    // bound
    auto* bound = app.add_subcommand("bound", "best applicable lower bound for a shape");
    MatrixArgs bound_m;
    bound_m.attach(bound);
    std::uint32_t bound_p = 0;
    std::vector<std::int64_t> bound_sizes;
    bound->add_option("--p", bound_p, "prime modulus (with --star)");
    bound->add_option("--sizes", bound_sizes, "set sizes, e.g. 2,2,2")
        ->required()
        ->delimiter(',');

    // image
    auto* imagec = app.add_subcommand("image", "exact image of a map on a grid");
    MatrixArgs image_m;
    GridArgs image_g;
    image_m.attach(imagec);
    image_g.attach(imagec);
    int image_workers = 1;
    std::int64_t image_max_points = 10'000;
    imagec->add_option("--workers", image_workers, "parallel lanes (default 1)");
    imagec->add_option("--max-points", image_max_points,
                       "omit the point list above this size (default 10000)");

    // normalize
    auto* norm = app.add_subcommand("normalize", "reduce a map to the simple form");
    MatrixArgs norm_m;
    GridArgs norm_g;
    norm_m.attach(norm);
    norm_g.attach(norm);

    // verify
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    std::string ver_suite;
    std::optional<std::uint64_t> ver_seed;
    bool ver_csv = false;
    ver->add_option("suite", ver_suite,
                    "cd | tightness | invariance | large-k | cover | boundary-identity | all")
        ->required();
    ver->add_option("--seed", ver_seed, "seed for randomized suites");
    ver->add_flag("--csv", ver_csv, "CSV table instead of JSON");

    // search
    auto* search = app.add_subcommand("search", "minimize the image over grids of a shape");
    SearchArgs sa;
    sa.margs.attach(search);
    search->add_option("--p", sa.p, "prime modulus")->required();
    search->add_option("--sizes", sa.sizes, "shape, e.g. 2,2,2")->required()->delimiter(',');
    search->add_flag("--exhaustive", sa.exhaustive, "scan every grid family");
    search->add_option("--iterations", sa.iterations, "random-mode descents");
    search->add_option("--seed", sa.seed, "seed (required for random mode)");
    search->add_option("--workers", sa.workers, "parallel lanes (default 1)");
    search->add_option("--family-cap", sa.family_cap, "exhaustive family cap (default 10^8)");
    search->add_option("--checkpoint", sa.checkpoint_path,
                       "checkpoint file for exhaustive runs (workers=1)");
    search->add_option("--cache-dir", sa.cache_dir, "result cache directory");
    search->add_flag("--csv", sa.csv, "CSV row instead of JSON");

    // conjecture
    auto* conj = app.add_subcommand("conjecture", "gap report in the open window");
    ConjectureArgs ca;
    conj->add_option("--p", ca.p, "prime modulus")->required();
    conj->add_option("--k", ca.k, "uniform set size")->required();
    conj->add_option("--iterations", ca.iterations, "random-search descents (default 200)");
    conj->add_option("--seed", ca.seed, "seed (required)");
    conj->add_option("--workers", ca.workers, "parallel lanes (default 1)");
    conj->add_option("--family-cap", ca.family_cap, "exhaustive family cap (default 10^8)");
    conj->add_option("--cache-dir", ca.cache_dir, "result cache directory");
    conj->add_flag("--csv", ca.csv, "CSV row instead of JSON");

    try {
        app.parse(argc, argv);
        if (bound->parsed()) return cmd_bound(bound_m, bound_p, bound_sizes);
        if (imagec->parsed()) return cmd_image(image_m, image_g, image_workers, image_max_points);
        if (norm->parsed()) return cmd_normalize(norm_m, norm_g);
        if (ver->parsed()) return cmd_verify(ver_suite, ver_seed, ver_csv);
        if (search->parsed()) return cmd_search(sa);
        if (conj->parsed()) return cmd_conjecture(ca);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const ScopeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ValueError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
