#include "sqlia/pattern_store.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "sqlia/error.hpp"

namespace sqlia {

namespace fs = std::filesystem;

std::string_view to_string(PatternSource source) noexcept {
    return source == PatternSource::Seed ? "seed" : "admin";
}

std::string escape_pattern_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::optional<std::string> unescape_pattern_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\\') {
            out.push_back(text[i]);
            continue;
        }
        if (++i == text.size()) return std::nullopt;
        switch (text[i]) {
            case '\\': out.push_back('\\'); break;
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            default: return std::nullopt;
        }
    }
    return out;
}

std::string serialize_patterns(const std::vector<AnomalyPattern>& patterns) {
    std::string out(kPatternFileHeader);
    out.push_back('\n');
    for (const auto& p : patterns) {
        out += std::to_string(p.id);
        out.push_back('\t');
        out += to_string(p.source);
        out.push_back('\t');
        out += format_utc(p.created_at);
        out.push_back('\t');
        out += escape_pattern_text(p.text.view());
        out.push_back('\n');
    }
    return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return fields;
}

std::optional<PatternId> parse_id(std::string_view s) {
    if (s.empty() || (s.size() > 1 && s[0] == '0')) return std::nullopt;
    PatternId id = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
    if (ec != std::errc{} || ptr != s.data() + s.size() || id == 0) return std::nullopt;
    return id;
}

}  // namespace

std::vector<AnomalyPattern> parse_patterns(std::string_view contents) {
    std::vector<AnomalyPattern> out;
    if (contents.empty()) throw MalformedLine(1, "missing header");
    if (contents.back() != '\n') {
        const auto lines = static_cast<std::size_t>(std::count(contents.begin(), contents.end(), '\n'));
        throw MalformedLine(lines + 1, "missing trailing newline");
    }
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < contents.size()) {
        const auto nl = contents.find('\n', pos);
        const std::string_view line = contents.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != kPatternFileHeader) throw MalformedLine(1, "bad header");
            continue;
        }
        const auto fields = split_tabs(line);
        if (fields.size() != 4) throw MalformedLine(line_no, "expected 4 tab-separated fields");

        AnomalyPattern p;
        const auto id = parse_id(fields[0]);
        if (!id) throw MalformedLine(line_no, "bad id");
        p.id = *id;
        if (fields[1] == "seed") p.source = PatternSource::Seed;
        else if (fields[1] == "admin") p.source = PatternSource::AdminConfirmed;
        else throw MalformedLine(line_no, "bad source");
        const auto ts = parse_utc(fields[2]);
        if (!ts) throw MalformedLine(line_no, "bad timestamp");
        p.created_at = *ts;
        auto text = unescape_pattern_text(fields[3]);
        if (!text) throw MalformedLine(line_no, "bad escape");
        if (text->empty() || !is_normalized(*text)) throw MalformedLine(line_no, "text not normalized");
        p.text = NormalizedText::from_normalized(std::move(*text));

        if (!out.empty() && p.id <= out.back().id) throw NonMonotonicId(line_no);
        if (!seen.insert(p.text.str()).second) throw DuplicateText(line_no);
        out.push_back(std::move(p));
    }
    return out;
}

void write_file_atomically(const fs::path& path, std::string_view contents) {
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailure("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw IoFailure("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw IoFailure("rename to " + path.string() + " failed: " + ec.message());
    }
}

PatternStore::PatternStore(fs::path path, Clock clock, Writer writer)
    : path_(std::move(path)),
      clock_(std::move(clock)),
      writer_(std::move(writer)),
      current_(std::make_shared<const std::vector<CompiledPattern>>()) {}

PatternStore::PatternStore(PatternStore&& other) noexcept
    : path_(std::move(other.path_)),
      clock_(std::move(other.clock_)),
      writer_(std::move(other.writer_)),
      current_(std::move(other.current_)),
      next_id_(other.next_id_) {}

PatternStore PatternStore::load(fs::path path, Clock clock, Writer writer) {
    PatternStore store(std::move(path), std::move(clock), std::move(writer));
    std::error_code ec;
    if (!fs::exists(store.path_, ec)) return store;

    std::ifstream in(store.path_, std::ios::binary);
    if (!in) throw IoFailure("cannot read " + store.path_.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto patterns = parse_patterns(buf.str());
    store.current_ = compile_patterns(patterns);
    if (!patterns.empty()) store.next_id_ = patterns.back().id + 1;
    return store;
}

PatternStore::AddResult PatternStore::add_pattern(std::string_view raw_text, PatternSource source) {
    NormalizedText text = normalize(raw_text);
    if (text.empty()) throw EmptyPattern();

    std::lock_guard write_lock(write_mu_);
    const PatternSnapshot before = snapshot();
    for (const auto& cp : *before) {
        if (cp.pattern.text == text) return {cp.pattern, false};
    }

    AnomalyPattern added{next_id_, std::move(text), source, clock_()};
    auto next = std::make_shared<std::vector<CompiledPattern>>(*before);
    next->emplace_back(added);

    std::vector<AnomalyPattern> all;
    all.reserve(next->size());
    for (const auto& cp : *next) all.push_back(cp.pattern);
    writer_(path_, serialize_patterns(all));

    {
        std::lock_guard swap_lock(snapshot_mu_);
        current_ = std::move(next);
    }
    ++next_id_;
    return {std::move(added), true};
}

PatternSnapshot PatternStore::snapshot() const {
    std::lock_guard lock(snapshot_mu_);
    return current_;
}

std::vector<AnomalyPattern> PatternStore::patterns() const {
    const auto snap = snapshot();
    std::vector<AnomalyPattern> out;
    out.reserve(snap->size());
    for (const auto& cp : *snap) out.push_back(cp.pattern);
    return out;
}

std::size_t PatternStore::size() const { return snapshot()->size(); }

PatternId PatternStore::next_id() const {
    std::lock_guard lock(write_mu_);
    return next_id_;
}

}  // namespace sqlia
