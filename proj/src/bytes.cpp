#include <sealnet/bytes.hpp>

namespace sealnet {

    std::string to_hex(byte_span b)
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s;
        s.reserve(b.size() * 2);
        for (auto c: b) {
            s.push_back(digits[c >> 4]);
            s.push_back(digits[c & 0xF]);
        }
        return s;
    }

    static int nibble(char c)
    {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        if (c >= 'A' && c <= 'F')
            return c - 'A' + 10;
        return -1;
    }

    bytes from_hex(std::string_view hex)
    {
        if (hex.size() % 2)
            throw decode_error("odd-length hex string");
        bytes out(hex.size() / 2);
        for (size_t i = 0; i < out.size(); ++i) {
            const int hi = nibble(hex[2 * i]), lo = nibble(hex[2 * i + 1]);
            if (hi < 0 || lo < 0)
                throw decode_error("invalid hex digit at offset {}", 2 * i);
            out[i] = static_cast<uint8_t>((hi << 4) | lo);
        }
        return out;
    }
}
