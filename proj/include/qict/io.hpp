#pragma once

#include "qict/spectra.hpp"
#include "qict/tomography.hpp"

#include <iosfwd>
#include <span>
#include <string>

namespace qict::io {

/// Shortest round-trip decimal form.
std::string format_number(double value);

/// Three header lines (axis_unit,kind / values / axis,expected,sampled) then rows.
void write_fringe_csv(std::ostream& os, const FringeRecord& record);
FringeRecord read_fringe_csv(std::istream& is);

void write_depth_profile_csv(std::ostream& os, const DepthProfile& profile);
void write_peaks_csv(std::ostream& os, std::span<const Peak> peaks);

} // namespace qict::io
