#pragma once

#include <vector>

#include "hydronet/timestamp.hpp"

namespace hydronet {

// One-hot width: 31 day-of-month + 24 hour + 4 minute-slot categories.
inline constexpr std::size_t kOneHotDim = 59;

// Encodes (day, hour, minute_slot) as a concatenated one-hot vector with
// exactly three 1s, at positions day-1, 31+hour, and 55+slot.
inline std::vector<double> one_hot_time(const TimeFeatures& f) {
    if (f.day_of_month < 1 || f.day_of_month > 31)
        throw Error("one_hot_time: day_of_month out of range");
    if (f.hour < 0 || f.hour > 23) throw Error("one_hot_time: hour out of range");
    if (f.minute_slot < 0 || f.minute_slot > 3) throw Error("one_hot_time: minute_slot out of range");
    std::vector<double> v(kOneHotDim, 0.0);
    v[static_cast<std::size_t>(f.day_of_month - 1)] = 1.0;
    v[31 + static_cast<std::size_t>(f.hour)] = 1.0;
    v[55 + static_cast<std::size_t>(f.minute_slot)] = 1.0;
    return v;
}

}  // namespace hydronet
