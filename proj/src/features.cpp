#include "polyglot/features.hpp"

#include <charconv>
#include <fstream>

#include "polyglot/error.hpp"
#include "polyglot/magic.hpp"

namespace polyglot::features {

std::size_t width_of(Layout layout) { return layout == Layout::Augmented ? kAugmentedWidth : kHistogramWidth; }

FeatureVector byte_histogram(ByteView bytes, bool normalize) {
  FeatureVector v;
  v.values.assign(kHistogramWidth, 0.0);
  std::size_t counts[kHistogramWidth] = {};
  for (std::uint8_t b : bytes) ++counts[b];
  const double scale = normalize && !bytes.empty() ? 1.0 / static_cast<double>(bytes.size()) : 1.0;
  for (std::size_t i = 0; i < kHistogramWidth; ++i) v.values[i] = static_cast<double>(counts[i]) * scale;
  return v;
}

std::size_t mime_slot(std::optional<FileType> type) {
  return type ? static_cast<std::size_t>(*type) : kMimeSlots - 1;
}

FeatureVector augment_with_mime(const FeatureVector& v, std::optional<FileType> identified) {
  if (v.layout == Layout::Augmented || v.values.size() != kHistogramWidth)
    throw Error(ErrorCode::AlreadyAugmented, "vector already carries the type block");
  FeatureVector out = v;
  out.layout = Layout::Augmented;
  out.values.resize(kAugmentedWidth, 0.0);
  out.values[kHistogramWidth + mime_slot(identified)] = 1.0;
  return out;
}

FeatureVector featurize(ByteView bytes, Layout layout, bool normalize) {
  auto v = byte_histogram(bytes, normalize);
  if (layout == Layout::Augmented) v = augment_with_mime(v, magic::identify_strict(bytes).primary);
  return v;
}

FeatureMatrix featurize_batch(const std::vector<Sample>& samples, Layout layout, bool normalize) {
  FeatureMatrix m;
  m.layout = layout;
  for (const auto& s : samples) {
    if (!s.label) throw Error(ErrorCode::MissingLabel, s.path);
    const Bytes bytes = read_file(s.path);
    m.rows.push_back(featurize(bytes, layout, normalize).values);
    m.labels.push_back(*s.label);
  }
  return m;
}

void write_matrix(const FeatureMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, path);
  out << "layout_version=" << static_cast<int>(m.layout) << "\n";
  char buf[64];
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    for (double x : m.rows[i]) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
      out.write(buf, end - buf);
      out << ',';
    }
    out << m.labels[i] << '\n';
  }
  if (!out) throw Error(ErrorCode::IoFailure, path);
}

FeatureMatrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableFile, path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("layout_version=", 0) != 0)
    throw Error(ErrorCode::DimensionMismatch, path + ": missing layout_version line");
  FeatureMatrix m;
  const int version = std::stoi(line.substr(15));
  if (version != 1 && version != 2) throw Error(ErrorCode::DimensionMismatch, "unknown layout_version");
  m.layout = static_cast<Layout>(version);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      double x = 0;
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc()) throw Error(ErrorCode::DimensionMismatch, path + ": bad number");
      row.push_back(x);
      p = next;
      if (p < end && *p == ',') ++p;
    }
    if (row.size() != m.width() + 1) throw Error(ErrorCode::DimensionMismatch, path + ": row width");
    m.labels.push_back(static_cast<int>(row.back()));
    row.pop_back();
    m.rows.push_back(std::move(row));
  }
  return m;
}

}  // namespace polyglot::features
