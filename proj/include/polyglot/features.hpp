#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "polyglot/bytes.hpp"
#include "polyglot/file_type.hpp"

namespace polyglot::features {

inline constexpr std::size_t kHistogramWidth = 256;
/// One slot per FileType plus a final slot for unidentified input.
inline constexpr std::size_t kMimeSlots = kFileTypeCount + 1;
inline constexpr std::size_t kAugmentedWidth = kHistogramWidth + kMimeSlots;

/// Serialized as layout_version so stored matrices and models can be checked
/// against each other.
enum class Layout : int { Plain = 1, Augmented = 2 };

std::size_t width_of(Layout layout);

struct FeatureVector {
  std::vector<double> values;
  Layout layout = Layout::Plain;
};

/// Byte value counts; with `normalize` each count is divided by the length.
FeatureVector byte_histogram(ByteView bytes, bool normalize = false);

std::size_t mime_slot(std::optional<FileType> type);

/// Appends the one-hot identified-type block. Throws AlreadyAugmented.
FeatureVector augment_with_mime(const FeatureVector& v, std::optional<FileType> identified);

/// Histogram plus, for the augmented layout, the strict identifier's verdict.
FeatureVector featurize(ByteView bytes, Layout layout, bool normalize = false);

struct Sample {
  std::string path;
  std::optional<int> label;  // 1 = polyglot
};

struct FeatureMatrix {
  Layout layout = Layout::Plain;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;

  std::size_t width() const { return width_of(layout); }
};

/// Throws MissingLabel or UnreadableFile.
FeatureMatrix featurize_batch(const std::vector<Sample>& samples, Layout layout, bool normalize = false);

/// CSV with a "layout_version=N" first line and the label as last column.
void write_matrix(const FeatureMatrix& m, const std::string& path);
FeatureMatrix read_matrix(const std::string& path);

}  // namespace polyglot::features
