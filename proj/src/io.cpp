#include "qict/io.hpp"

#include "qict/error.hpp"
#include "qict/imaging.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace qict::io {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && s[b] == ' ') ++b;
  return s.substr(b);
}

double parse_number(const std::string& text, std::size_t line_no) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw DomainError("fringe csv line " + std::to_string(line_no) + ": bad number '" + t + "'");
  }
  return v;
}

} // namespace

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_fringe_csv(std::ostream& os, const FringeRecord& record) {
  os << "axis_unit,kind\n" << record.axis_unit << ',' << to_string(record.kind) << '\n';
  os << "axis,expected,sampled\n";
  for (std::size_t k = 0; k < record.axis.size(); ++k) {
    os << format_number(record.axis[k]) << ',' << format_number(record.expected[k]) << ',';
    if (record.sampled) os << format_number((*record.sampled)[k]);
    os << '\n';
  }
}

FringeRecord read_fringe_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() {
    if (!std::getline(is, line)) throw DomainError("fringe csv: unexpected end of input");
    ++line_no;
    line = trim(line);
  };
  next();
  if (line != "axis_unit,kind") throw DomainError("fringe csv: missing 'axis_unit,kind' header");
  next();
  const auto meta = split(line);
  if (meta.size() != 2) throw DomainError("fringe csv line 2: expected axis_unit,kind");
  FringeRecord rec;
  rec.axis_unit = trim(meta[0]);
  rec.kind = fringe_kind_from_string(trim(meta[1]));
  next();
  if (line != "axis,expected,sampled") throw DomainError("fringe csv: missing column header");
  bool any_sampled = false;
  bool any_missing = false;
  std::vector<double> sampled;
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() < 2 || f.size() > 3) throw DomainError("fringe csv line " + std::to_string(line_no) + ": bad column count");
    rec.axis.push_back(parse_number(f[0], line_no));
    rec.expected.push_back(parse_number(f[1], line_no));
    if (f.size() == 3 && !trim(f[2]).empty()) {
      sampled.push_back(parse_number(f[2], line_no));
      any_sampled = true;
    } else {
      sampled.push_back(0.0);
      any_missing = true;
    }
  }
  if (any_sampled && any_missing) throw DomainError("fringe csv: sampled column partially filled");
  if (any_sampled) rec.sampled = std::move(sampled);
  rec.dc_subtracted = std::any_of(rec.expected.begin(), rec.expected.end(), [](double v) { return v < 0.0; });
  validate(rec);
  return rec;
}

void write_depth_profile_csv(std::ostream& os, const DepthProfile& profile) {
  os << "depth_m,magnitude\n";
  for (std::size_t k = 0; k < profile.depth.size(); ++k) {
    os << format_number(profile.depth[k]) << ',' << format_number(profile.magnitude[k]) << '\n';
  }
}

void write_peaks_csv(std::ostream& os, std::span<const Peak> peaks) {
  os << "position_m,fwhm_m,amplitude\n";
  for (const auto& p : peaks) {
    os << format_number(p.position) << ',' << format_number(p.fwhm) << ',' << format_number(p.amplitude) << '\n';
  }
}

} // namespace qict::io

namespace qict {

void write_image_csv(std::ostream& os, const ScanImage& image) {
  for (std::size_t y = 0; y < image.ny; ++y) {
    for (std::size_t x = 0; x < image.nx; ++x) {
      if (x) os << ',';
      os << io::format_number(image.at(x, y));
    }
    os << '\n';
  }
}

void write_image_pgm(std::ostream& os, const ScanImage& image) {
  const double peak = image.values.empty() ? 0.0 : *std::max_element(image.values.begin(), image.values.end());
  os << "P5\n" << image.nx << ' ' << image.ny << "\n255\n";
  for (double v : image.values) {
    const double scaled = peak > 0.0 ? std::clamp(v / peak, 0.0, 1.0) * 255.0 : 0.0;
    os.put(static_cast<char>(static_cast<unsigned char>(std::lround(scaled))));
  }
}

} // namespace qict
