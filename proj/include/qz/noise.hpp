// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>

namespace qz {

using SymbolId = std::uint32_t;

// Issues plain noise symbols. The three error symbols of a quadratic form are
// structural and never registered here. Safe to share between threads.
class NoiseRegistry {
  public:
    NoiseRegistry() = default;
    /// Start numbering after `last_used` (e.g. when forms were parsed from text).
    explicit NoiseRegistry(SymbolId last_used) : next_(last_used + 1) {}

    NoiseRegistry(const NoiseRegistry&) = delete;
    NoiseRegistry& operator=(const NoiseRegistry&) = delete;

    SymbolId fresh() {
        const SymbolId id = next_.fetch_add(1, std::memory_order_relaxed);
        if (id == std::numeric_limits<SymbolId>::max()) {
            throw std::length_error("noise symbol counter exhausted");
        }
        return id;
    }

    /// Number of symbols handed out so far.
    [[nodiscard]] SymbolId issued() const noexcept { return next_.load(std::memory_order_relaxed) - 1; }

  private:
    std::atomic<SymbolId> next_{1};
};

using RegistryPtr = std::shared_ptr<NoiseRegistry>;

inline RegistryPtr make_registry() { return std::make_shared<NoiseRegistry>(); }

} // namespace qz
