#pragma once

#include <map>
#include <string>
#include <utility>

#include "khsim/timeseries.hpp"

namespace khsim {

using Metadata = std::map<std::string, std::string>;

// `# key: value` lines (metadata plus the normalization scales), then
// t,t_norm,q<label>,phi<label>,...,energy,dissipation at full precision.
void write_csv(const TimeSeries& series, const std::string& path, const Metadata& metadata = {});

struct CsvContents {
    TimeSeries series;
    Metadata metadata;
};

[[nodiscard]] CsvContents read_csv(const std::string& path);

// Two charge traces against t / t_ref.
void write_svg(const TimeSeries& series, std::pair<int, int> pair, const std::string& path,
               const std::string& title = {});

}  // namespace khsim
