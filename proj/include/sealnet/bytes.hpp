#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

namespace sealnet {

    struct error : std::runtime_error {
        using std::runtime_error::runtime_error;

        template <typename... Args>
        explicit error(fmt::format_string<Args...> f, Args &&...args)
            : std::runtime_error(fmt::format(f, std::forward<Args>(args)...)) {}
    };

    // thrown on any malformed canonical encoding (truncation, bad tag, trailing bytes)
    struct decode_error : error { using error::error; };
    // unknown node or other inconsistency inside the stake ledger
    struct ledger_error : error { using error::error; };
    struct precondition_violation : error { using error::error; };
    struct config_error : error { using error::error; };

    using bytes = std::vector<uint8_t>;
    using byte_span = std::span<const uint8_t>;

    std::string to_hex(byte_span b);
    bytes from_hex(std::string_view hex);

    template <size_t N>
    struct fixed_bytes {
        std::array<uint8_t, N> data {};

        static constexpr size_t size() { return N; }
        byte_span span() const { return { data.data(), N }; }
        uint8_t *begin() { return data.data(); }
        uint8_t *end() { return data.data() + N; }
        const uint8_t *begin() const { return data.data(); }
        const uint8_t *end() const { return data.data() + N; }
        uint8_t &operator[](size_t i) { return data[i]; }
        uint8_t operator[](size_t i) const { return data[i]; }

        bool is_zero() const
        {
            for (auto b: data)
                if (b)
                    return false;
            return true;
        }

        std::string hex() const { return to_hex(span()); }

        static fixed_bytes from_hex(std::string_view h)
        {
            auto b = sealnet::from_hex(h);
            if (b.size() != N)
                throw decode_error("expected {} hex bytes, got {}", N, b.size());
            fixed_bytes r;
            std::copy(b.begin(), b.end(), r.data.begin());
            return r;
        }

        static fixed_bytes from_span(byte_span b)
        {
            if (b.size() != N)
                throw decode_error("expected {} bytes, got {}", N, b.size());
            fixed_bytes r;
            std::copy(b.begin(), b.end(), r.data.begin());
            return r;
        }

        auto operator<=>(const fixed_bytes &) const = default;
        bool operator==(const fixed_bytes &) const = default;
    };

    using hash32 = fixed_bytes<32>;
}
