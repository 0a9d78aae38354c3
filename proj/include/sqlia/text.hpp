#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace sqlia {

bool is_sql_space(unsigned char b) noexcept;

// Returns the offset of the first invalid byte, or npos when `raw` is valid UTF-8.
std::size_t find_invalid_utf8(std::string_view raw) noexcept;

/// Text in canonical form: ASCII lowercased, whitespace runs collapsed to a
/// single 0x20, no leading/trailing space. Only `normalize` and
/// `from_normalized` produce values of this type.
class NormalizedText {
public:
    NormalizedText() = default;

    // Throws InvalidEncoding or PreconditionViolation if `raw` is not already normalized.
    static NormalizedText from_normalized(std::string raw);

    const std::string& str() const noexcept { return bytes_; }
    std::string_view view() const noexcept { return bytes_; }
    std::size_t size() const noexcept { return bytes_.size(); }
    bool empty() const noexcept { return bytes_.empty(); }

    friend bool operator==(const NormalizedText&, const NormalizedText&) = default;
    friend auto operator<=>(const NormalizedText&, const NormalizedText&) = default;

private:
    friend NormalizedText normalize(std::string_view raw);
    explicit NormalizedText(std::string bytes) : bytes_(std::move(bytes)) {}

    std::string bytes_;
};

// Throws InvalidEncoding if `raw` is not valid UTF-8.
NormalizedText normalize(std::string_view raw);

bool is_normalized(std::string_view raw) noexcept;

}  // namespace sqlia
