#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nlpot/grid_solver.hpp"
#include "nlpot/measure.hpp"
#include "nlpot/profile.hpp"

namespace nlpot {

/// UTF-8 key-value text: one `key = value` per line, `#` starts a comment.
/// Keys are unique; every accessor names the key in its ParseError.
class KeyValueDocument {
public:
    static KeyValueDocument parse(std::string_view text);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    std::vector<std::string> keys() const;

    const std::string& text(const std::string& key) const;
    std::string text_or(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    int integer(const std::string& key) const;
    int integer_or(const std::string& key, int fallback) const;
    bool flag_or(const std::string& key, bool fallback) const;
    /// Numbers separated by commas, semicolons or blanks; brackets are ignored.
    std::vector<double> numbers(const std::string& key) const;
    /// Groups written as `(a, b); (c, d)` or `a, b; c, d`, each of the given arity.
    std::vector<std::vector<double>> tuples(const std::string& key, std::size_t arity) const;

    /// Throws ParseError naming the first key outside `allowed`.
    void require_known(const std::vector<std::string>& allowed) const;

private:
    std::map<std::string, std::string> entries_;
};

/// Measure spec document with keys kind, n, knots, tail (radial) or
/// density_file, spacing, box_half_width (grid). Relative density paths resolve
/// against base_dir. A radial document without `tail` continues the last knot mass
/// as a constant (compact support).
Measure parse_measure_spec(std::string_view text, const std::filesystem::path& base_dir = {});
Measure load_measure_spec(const std::filesystem::path& path);

/// Every number in a CSV text, in order. Lines starting with `#` and lines without
/// a leading number (headers) are skipped.
std::vector<double> read_csv_numbers(std::string_view text);

/// Row-major density samples on the grid, one value per node.
GridMeasure read_density_csv(const std::filesystem::path& path, const GridGeometry& geometry);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::string sha256_hex(std::string_view bytes);

/// Provenance carried by every output file.
struct OutputMeta {
    std::string input_sha256;
    std::string task;
    std::string label;

    /// `# nlpot <version> task=<task> label=<label> input_sha256=<hex>`
    std::string comment_line() const;
};

const char* toolkit_version() noexcept;

/// `r,value` (or `r,value,label`) rows after the metadata comment.
std::string profile_csv(const RadialProfile& u, const OutputMeta& meta, bool with_label = false);

/// Metadata comment, a `# n=<n> h=<h> L=<L> label=<label>` line, then one CSV row per
/// grid line along the last axis in row-major order.
std::string field_csv(const GridField& u, const OutputMeta& meta);

/// Inverse of field_csv (fixed flags are left clear).
GridField parse_field_csv(std::string_view text);

} // namespace nlpot
