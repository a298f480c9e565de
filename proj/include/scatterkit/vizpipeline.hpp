#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scatterkit/descattering.hpp"
#include "scatterkit/image.hpp"
#include "scatterkit/scattering.hpp"

namespace scatterkit {

/// Indexed collection of images. load() returns nullopt (with a reason) for
/// images that cannot be read; implementations must be safe to call from
/// several threads at once.
class ImageSource {
 public:
  virtual ~ImageSource() = default;
  virtual std::size_t size() const = 0;
  virtual std::string id(std::size_t index) const = 0;
  /// Index of the image with this id, if present.
  virtual std::optional<std::size_t> find(const std::string& id) const;
  virtual std::optional<PlanarImage> load(std::size_t index, const ScatterConfig& config,
                                          std::string* reason) const = 0;
};

/// Regular files of a directory in sorted filename order, decoded with
/// load_image and brought to config.input_rows x input_cols.
class DirectorySource : public ImageSource {
 public:
  explicit DirectorySource(std::filesystem::path dir);
  std::size_t size() const override { return files_.size(); }
  std::string id(std::size_t index) const override { return files_.at(index).filename().string(); }
  std::optional<PlanarImage> load(std::size_t index, const ScatterConfig& config,
                                  std::string* reason) const override;
  const std::filesystem::path& directory() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
};

/// Images held in memory; an empty PlanarImage stands for an unreadable entry.
class MemorySource : public ImageSource {
 public:
  MemorySource() = default;
  void add(std::string id, PlanarImage image);
  std::size_t size() const override { return images_.size(); }
  std::string id(std::size_t index) const override { return ids_.at(index); }
  std::optional<PlanarImage> load(std::size_t index, const ScatterConfig& config,
                                  std::string* reason) const override;

 private:
  std::vector<std::string> ids_;
  std::vector<PlanarImage> images_;
};

struct ActivationRecord {
  std::string image_id;
  std::size_t image_index = 0;
  double score = 0.0;
  Site site;
  std::size_t channel = 0;

  friend bool operator==(const ActivationRecord&, const ActivationRecord&) = default;
};

/// Descending score; equal scores are ordered by ingestion index.
bool ranks_before(const ActivationRecord& a, const ActivationRecord& b);

/// max |value| over the channel grid; the first maximum in row-major order
/// gives the site.
ActivationRecord channel_activation(const ScatterOutput& s, std::size_t channel);

class TopKTable {
 public:
  TopKTable() = default;
  TopKTable(std::size_t channels, std::size_t k);

  std::size_t k() const noexcept { return k_; }
  std::size_t channels() const noexcept { return lists_.size(); }
  const std::vector<ActivationRecord>& list(std::size_t channel) const { return lists_.at(channel); }

  void offer(const ActivationRecord& record);
  /// Every channel of one scattered image.
  void offer_all(const ScatterOutput& s, std::size_t image_index, const std::string& image_id);
  /// Associative; the result equals offering both record streams in order.
  void merge(const TopKTable& other);

  friend bool operator==(const TopKTable&, const TopKTable&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::vector<ActivationRecord>> lists_;
};

struct SkippedImage {
  std::string id;
  std::string reason;
};

struct IdentifyResult {
  TopKTable table;
  std::size_t processed = 0;
  std::vector<SkippedImage> skipped;
};

/// Single pass over the source; workers = 0 means hardware concurrency.
/// Throws ValidationError for an empty source or when nothing is readable.
IdentifyResult identify(const ImageSource& corpus, const ScatterConfig& config, std::size_t k = 9,
                        std::size_t workers = 1);

/// Pixel rectangle [top, bottom) x [left, right).
struct PixelBox {
  std::size_t top = 0, bottom = 0, left = 0, right = 0;
  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

/// Radius around a 2^J cell holding 95% of the energy of the interpolated
/// phi_J response of one coefficient.
std::size_t lowpass_half_support(int J);

/// The 2^J x 2^J cell of an output site widened by lowpass_half_support and
/// clamped to the image.
PixelBox receptive_field(Site site, int J, std::size_t rows, std::size_t cols);

PlanarImage crop_box(const PlanarImage& image, const PixelBox& box);

struct ReconstructionPair {
  ActivationRecord record;
  PlanarImage reconstruction;
  PlanarImage input_patch;
  PixelBox box;
};

struct ChannelReconstruction {
  std::size_t channel = 0;
  std::vector<ReconstructionPair> pairs;
  std::vector<SkippedImage> skipped;
};

/// Re-scatters each recorded image, keeps the single recorded coefficient,
/// descatters and crops its receptive field.
std::vector<ChannelReconstruction> reconstruct_topk(const TopKTable& table, const ImageSource& corpus,
                                                    const std::vector<std::size_t>& channels,
                                                    const ScatterConfig& config, std::size_t workers = 1);

/// Tiles normalised independently to [0, 255] (constant tiles become 128) and
/// laid out row by row, separated by 2-pixel white lines. Tiles of unequal
/// size are placed top-left in cells of the largest size.
PlanarImage render_grid(const std::vector<PlanarImage>& tiles, std::size_t rows, std::size_t cols);

/// Tab-separated lines "channel rank image score row col" after a '#' header.
void write_topk_table(std::ostream& out, const TopKTable& table, const ScatterConfig& config,
                      const std::string& corpus);
struct LoadedTable {
  TopKTable table;
  ScatterConfig config;
  std::string corpus;
};
LoadedTable read_topk_table(std::istream& in);

}  // namespace scatterkit
