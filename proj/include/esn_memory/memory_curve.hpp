#pragma once

#include "esn_memory/errors.hpp"

#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace esn_memory {

/// MC_tau for tau = 1..tau_max, plus their sum.
struct MemoryCurve {
    std::vector<double> mc;
    double total = 0.0;

    MemoryCurve() = default;
    explicit MemoryCurve(std::vector<double> values)
      : mc(std::move(values)), total(std::accumulate(mc.begin(), mc.end(), 0.0))
    {
    }

    std::size_t tau_max() const { return mc.size(); }
    /// MC at delay `tau` (1-based).
    double at(std::size_t tau) const
    {
        if (tau < 1 || tau > mc.size()) throw ParameterError("MemoryCurve: delay out of range");
        return mc[tau - 1];
    }

    friend bool operator==(const MemoryCurve&, const MemoryCurve&) = default;
};

}  // namespace esn_memory
