#pragma once

#include <string>
#include <vector>

#include "dsr/corpus/stats.hpp"

namespace dsr {

struct NamedVector {
  std::vector<std::string> names;
  std::vector<double> values;

  void append(const std::string& name, double value) {
    names.push_back(name);
    values.push_back(value);
  }
  void append(const NamedVector& other) {
    names.insert(names.end(), other.names.begin(), other.names.end());
    values.insert(values.end(), other.values.begin(), other.values.end());
  }
  std::size_t size() const { return values.size(); }
};

/// Descriptive statistics of every named channel, concatenated in channel
/// order with "<channel>_<stat>" naming.
inline NamedVector channel_statistics(const std::vector<std::string>& channel_names,
                                      const std::vector<std::vector<double>>& channels,
                                      const StatSet& stats = video11_stats()) {
  if (channel_names.size() != channels.size())
    throw ValidationError("channel_statistics: name/channel count mismatch");
  NamedVector out;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (channels[c].empty())
      throw ValidationError("channel_statistics: empty channel " + channel_names[c]);
    const auto vals = descriptive_stats(channels[c], stats);
    for (std::size_t s = 0; s < stats.size(); ++s)
      out.append(channel_names[c] + "_" + stat_name(stats[s]), vals[s]);
  }
  return out;
}

}  // namespace dsr
