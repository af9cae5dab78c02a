#include "nlpot/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nlpot/error.hpp"
#include "nlpot/numeric.hpp"

namespace nlpot {

namespace {

std::string_view trim(std::string_view s) {
    const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && blank(s.front())) s.remove_prefix(1);
    while (!s.empty() && blank(s.back())) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && end == s.data() + s.size();
}

bool is_separator(char c) {
    return c == ',' || c == ';' || c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '[' || c == ']' ||
           c == '(' || c == ')' || c == '{' || c == '}';
}

/// Splits on separators; returns false when a token is not a number.
bool split_numbers(std::string_view s, std::vector<double>& out) {
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_separator(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !is_separator(s[j])) ++j;
        if (j > i) {
            double v;
            if (!parse_double(s.substr(i, j - i), v)) return false;
            out.push_back(v);
        }
        i = j;
    }
    return true;
}

} // namespace

KeyValueDocument KeyValueDocument::parse(std::string_view text) {
    KeyValueDocument doc;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("line " + std::to_string(line_no), "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError("line " + std::to_string(line_no), "empty key");
        if (!doc.entries_.emplace(key, value).second) throw ParseError(key, "duplicate key");
        if (end == text.size()) break;
    }
    return doc;
}

std::vector<std::string> KeyValueDocument::keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
}

const std::string& KeyValueDocument::text(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ParseError(key, "missing required key");
    return it->second;
}

std::string KeyValueDocument::text_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
}

double KeyValueDocument::number(const std::string& key) const {
    double v;
    if (!parse_double(text(key), v) || !std::isfinite(v)) throw ParseError(key, "expected a finite number");
    return v;
}

double KeyValueDocument::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

int KeyValueDocument::integer(const std::string& key) const {
    const auto s = trim(text(key));
    int v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) throw ParseError(key, "expected an integer");
    return v;
}

int KeyValueDocument::integer_or(const std::string& key, int fallback) const {
    return has(key) ? integer(key) : fallback;
}

bool KeyValueDocument::flag_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& s = text(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ParseError(key, "expected true or false");
}

std::vector<double> KeyValueDocument::numbers(const std::string& key) const {
    std::vector<double> out;
    if (!split_numbers(text(key), out)) throw ParseError(key, "expected a list of numbers");
    for (double v : out)
        if (!std::isfinite(v)) throw ParseError(key, "expected finite numbers");
    return out;
}

std::vector<std::vector<double>> KeyValueDocument::tuples(const std::string& key, std::size_t arity) const {
    const std::string& s = text(key);
    std::vector<std::string_view> groups;
    const std::string_view sv(s);
    if (sv.find('(') != std::string_view::npos) {
        std::size_t i = 0;
        while ((i = sv.find('(', i)) != std::string_view::npos) {
            const auto j = sv.find(')', i);
            if (j == std::string_view::npos) throw ParseError(key, "unbalanced parenthesis");
            groups.push_back(sv.substr(i + 1, j - i - 1));
            i = j + 1;
        }
    } else {
        std::size_t i = 0;
        while (i <= sv.size()) {
            const auto j = std::min(sv.find(';', i), sv.size());
            if (!trim(sv.substr(i, j - i)).empty()) groups.push_back(sv.substr(i, j - i));
            i = j + 1;
        }
    }
    std::vector<std::vector<double>> out;
    for (const auto g : groups) {
        std::vector<double> nums;
        if (!split_numbers(g, nums)) throw ParseError(key, "expected numbers in '" + std::string(g) + "'");
        if (nums.size() != arity)
            throw ParseError(key, "expected groups of " + std::to_string(arity) + " numbers, got '" + std::string(g) + "'");
        out.push_back(std::move(nums));
    }
    if (out.empty()) throw ParseError(key, "empty list");
    return out;
}

void KeyValueDocument::require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [k, v] : entries_)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) throw ParseError(k, "unknown key");
}

Measure parse_measure_spec(std::string_view text, const std::filesystem::path& base_dir) {
    const auto doc = KeyValueDocument::parse(text);
    const auto& kind = doc.text("kind");
    const int n = doc.integer("n");
    if (kind == "radial") {
        doc.require_known({"kind", "n", "knots", "tail", "label"});
        if (n < 2) throw ParseError("n", "dimension must be at least 2");
        std::vector<Knot> knots;
        for (const auto& t : doc.tuples("knots", 2)) knots.push_back({t[0], t[1]});
        std::vector<TailTerm> tail;
        if (doc.has("tail")) {
            for (const auto& t : doc.tuples("tail", 3))
                if (t[0] != 0.0) tail.push_back({t[0], t[1], t[2]});
        } else if (knots.back().mass > 0.0) {
            tail.push_back({knots.back().mass, 0.0, 0.0});
        }
        return RadialMeasure(n, std::move(knots), std::move(tail));
    }
    if (kind == "grid") {
        doc.require_known({"kind", "n", "density_file", "spacing", "box_half_width", "label"});
        if (n != 2 && n != 3) throw ParseError("n", "grid measures need n = 2 or 3");
        const double h = doc.number("spacing");
        const double L = doc.number("box_half_width");
        if (!(h > 0.0)) throw ParseError("spacing", "must be positive");
        if (!(L > 0.0)) throw ParseError("box_half_width", "must be positive");
        const double steps = 2.0 * L / h;
        if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
            throw ParseError("spacing", "2 box_half_width must be a whole multiple of the spacing");
        std::filesystem::path file = doc.text("density_file");
        if (file.is_relative()) file = base_dir / file;
        if (!std::filesystem::exists(file)) throw ParseError("density_file", "no such file: " + file.string());
        return read_density_csv(file, GridGeometry(n, L, h));
    }
    throw ParseError("kind", "expected radial or grid, got '" + kind + "'");
}

Measure load_measure_spec(const std::filesystem::path& path) {
    return parse_measure_spec(read_text_file(path), path.parent_path());
}

std::vector<double> read_csv_numbers(std::string_view text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        if (line.empty() || line.front() == '#') continue;
        std::vector<double> row;
        if (split_numbers(line, row)) {
            out.insert(out.end(), row.begin(), row.end());
        } else {
            double first;
            const auto comma = line.find(',');
            if (parse_double(line.substr(0, comma), first))
                throw ParseError("csv", "non-numeric entry in row '" + std::string(line) + "'");
        }
    }
    return out;
}

GridMeasure read_density_csv(const std::filesystem::path& path, const GridGeometry& geometry) {
    auto values = read_csv_numbers(read_text_file(path));
    if (values.size() != geometry.size())
        throw ParseError("density_file", "expected " + std::to_string(geometry.size()) + " samples for " +
                                             geometry.describe() + ", found " + std::to_string(values.size()));
    return GridMeasure(geometry, std::move(values));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("cannot write " + path.string());
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

const char* toolkit_version() noexcept { return NLPOT_VERSION; }

std::string OutputMeta::comment_line() const {
    return std::string("# nlpot ") + toolkit_version() + " task=" + task + " label=" + label +
           " input_sha256=" + input_sha256 + "\n";
}

std::string profile_csv(const RadialProfile& u, const OutputMeta& meta, bool with_label) {
    std::string out = meta.comment_line();
    out += with_label ? "r,value,label\n" : "r,value\n";
    for (std::size_t i = 0; i < u.size(); ++i) {
        out += format_double(u.radii[i]) + "," + format_double(u.values[i]);
        if (with_label) out += "," + u.label;
        out += "\n";
    }
    return out;
}

std::string field_csv(const GridField& u, const OutputMeta& meta) {
    const auto& g = u.geometry;
    std::string out = meta.comment_line();
    out += "# n=" + std::to_string(g.dimension()) + " h=" + format_double(g.spacing()) +
           " L=" + format_double(g.half_width()) + " label=" + u.label + "\n";
    const auto row = static_cast<std::size_t>(g.points_per_axis());
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        out += format_double(u.values[i]);
        out += (i + 1) % row == 0 ? "\n" : ",";
    }
    return out;
}

GridField parse_field_csv(std::string_view text) {
    int n = 0;
    double h = 0.0, L = 0.0;
    std::string label;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        if (line.rfind("# n=", 0) != 0) continue;
        std::istringstream ss{std::string(line.substr(2))};
        std::string tok;
        while (ss >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "n") n = std::stoi(val);
            else if (key == "h") h = std::stod(val);
            else if (key == "L") L = std::stod(val);
            else if (key == "label") label = val;
        }
        break;
    }
    if (n == 0) throw ParseError("field", "missing '# n=... h=... L=...' header");
    GridField u;
    u.geometry = GridGeometry(n, L, h);
    u.values = read_csv_numbers(text);
    if (u.values.size() != u.geometry.size()) throw ParseError("field", "sample count does not match the header");
    u.fixed.assign(u.values.size(), 0);
    u.label = label;
    return u;
}

} // namespace nlpot
