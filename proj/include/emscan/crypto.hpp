/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Part of emscan, an automated EM side-channel leakage scanner and
 * CEMA key-recovery toolkit.
 */

#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace emscan {

using Block = std::array<std::uint8_t, 16>;

/// AES S-box lookup, S[v].
std::uint8_t aes_sbox(std::uint8_t v);

/// First-round S-box output S(plaintext_byte XOR key_byte) — the
/// intermediate targeted by both the leakage model and the attack.
inline std::uint8_t sbox_output(std::uint8_t plaintext_byte, std::uint8_t key_byte) {
    return aes_sbox(static_cast<std::uint8_t>(plaintext_byte ^ key_byte));
}

/// Popcount of a byte, in [0, 8].
int hamming_weight(std::uint8_t v);

/// Hypothesized leakage HW(S(pt XOR k)).
inline int hw_model(std::uint8_t plaintext_byte, std::uint8_t key_byte) {
    return hamming_weight(sbox_output(plaintext_byte, key_byte));
}

/// One group of attack/assessment inputs: a key plus the plaintext blocks
/// fed to the device, either all identical or drawn from a seeded uniform
/// stream.
struct InputSet {
    enum class Kind { FixedPlaintext, RandomPlaintext };

    Kind kind = Kind::RandomPlaintext;
    Block key{};
    std::vector<Block> plaintexts;

    std::size_t size() const { return plaintexts.size(); }
};

/// Uniform random-plaintext set of `count` blocks (seeded, reproducible).
InputSet make_random_inputs(std::uint64_t seed, std::size_t count, const Block &key);

/// Fixed-plaintext set: `count` copies of one block.
InputSet make_fixed_inputs(std::size_t count, const Block &key, const Block &fixed_pt);

/// Fixed-vs-random input pair for a non-specific t-test; group_size traces
/// per group. Throws std::invalid_argument for group_size < 2 (sample
/// variance needs two observations).
std::pair<InputSet, InputSet> generate_tvla_sets(std::uint64_t seed,
                                                 std::size_t group_size,
                                                 const Block &key,
                                                 const Block &fixed_pt);

Block parse_hex_block(const std::string &hex);
std::string to_hex(const Block &b);

} // namespace emscan
