#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evoselect/error.hpp"
#include "evoselect/rng.hpp"

namespace evoselect {

/// Fixed-length bit vector over the d features of a dataset. Bit j set means
/// feature j is part of the candidate subset ("expressed").
class Chromosome {
  public:
    Chromosome() = default;
    explicit Chromosome(std::size_t length, bool value = false) : genes_(length, value ? 1 : 0) {}
    Chromosome(std::initializer_list<int> bits) {
        genes_.reserve(bits.size());
        for (int b : bits) {
            genes_.push_back(b != 0 ? 1 : 0);
        }
    }

    static Chromosome all_ones(std::size_t length) { return Chromosome(length, true); }

    [[nodiscard]] std::size_t size() const noexcept { return genes_.size(); }
    [[nodiscard]] bool operator[](std::size_t j) const noexcept { return genes_[j] != 0; }
    void set(std::size_t j, bool value) noexcept { genes_[j] = value ? 1 : 0; }
    void flip(std::size_t j) noexcept { genes_[j] ^= 1; }

    [[nodiscard]] std::size_t popcount() const noexcept {
        return static_cast<std::size_t>(std::count(genes_.begin(), genes_.end(), std::uint8_t{1}));
    }
    [[nodiscard]] bool none() const noexcept { return popcount() == 0; }

    /// Indices of expressed genes, ascending.
    [[nodiscard]] std::vector<std::size_t> expressed() const {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < genes_.size(); ++j) {
            if (genes_[j] != 0) {
                out.push_back(j);
            }
        }
        return out;
    }

    [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return genes_; }

    /// Stable 64-bit fingerprint of the gene content.
    [[nodiscard]] std::uint64_t fingerprint() const noexcept {
        std::uint64_t h = mix64(genes_.size());
        std::uint64_t word = 0;
        for (std::size_t j = 0; j < genes_.size(); ++j) {
            word |= static_cast<std::uint64_t>(genes_[j]) << (j % 64);
            if (j % 64 == 63) {
                h = mix64(h ^ word);
                word = 0;
            }
        }
        return mix64(h ^ word);
    }

    /// Big-endian hex: gene 0 is the most significant bit of the value whose
    /// binary expansion, left-padded to a multiple of 4 bits, is the gene string.
    [[nodiscard]] std::string to_hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        const std::size_t d = genes_.size();
        const std::size_t width = (d + 3) / 4;
        const std::size_t pad = width * 4 - d;
        std::string out(width, '0');
        for (std::size_t k = 0; k < width; ++k) {
            unsigned nibble = 0;
            for (std::size_t b = 0; b < 4; ++b) {
                const std::size_t pos = k * 4 + b;
                nibble <<= 1;
                if (pos >= pad && genes_[pos - pad] != 0) {
                    nibble |= 1;
                }
            }
            out[k] = digits[nibble];
        }
        return out;
    }

    static Chromosome from_hex(std::string_view hex, std::size_t length) {
        const std::size_t width = (length + 3) / 4;
        if (hex.size() != width) {
            throw DataError("chromosome hex has " + std::to_string(hex.size()) + " digits, expected " +
                            std::to_string(width) + " for length " + std::to_string(length));
        }
        const std::size_t pad = width * 4 - length;
        Chromosome c(length);
        for (std::size_t k = 0; k < width; ++k) {
            const char ch = hex[k];
            unsigned nibble = 0;
            if (ch >= '0' && ch <= '9') {
                nibble = static_cast<unsigned>(ch - '0');
            } else if (ch >= 'a' && ch <= 'f') {
                nibble = static_cast<unsigned>(ch - 'a' + 10);
            } else if (ch >= 'A' && ch <= 'F') {
                nibble = static_cast<unsigned>(ch - 'A' + 10);
            } else {
                throw DataError(std::string("invalid hex digit '") + ch + "' in chromosome");
            }
            for (std::size_t b = 0; b < 4; ++b) {
                const std::size_t pos = k * 4 + b;
                const bool bit = ((nibble >> (3 - b)) & 1U) != 0;
                if (pos < pad) {
                    if (bit) {
                        throw DataError("chromosome hex sets a padding bit");
                    }
                } else {
                    c.set(pos - pad, bit);
                }
            }
        }
        return c;
    }

    /// Gene string such as "1010", gene 0 first.
    [[nodiscard]] std::string to_string() const {
        std::string s;
        s.reserve(genes_.size());
        for (auto g : genes_) {
            s.push_back(g != 0 ? '1' : '0');
        }
        return s;
    }

    friend bool operator==(const Chromosome&, const Chromosome&) = default;

  private:
    std::vector<std::uint8_t> genes_;
};

} // namespace evoselect
