#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "scatterkit/errors.hpp"
#include "scatterkit/imageio.hpp"
#include "scatterkit/vizpipeline.hpp"

namespace scatterkit {
namespace {

std::size_t resolve_workers(std::size_t workers, std::size_t jobs) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(workers, jobs));
}

// Runs body(i) for i in [0, n) on `workers` threads pulling from a shared
// counter. Each thread has its own state created by make_state.
template <typename State, typename Make, typename Body>
std::vector<State> parallel_for(std::size_t n, std::size_t workers, Make make_state, Body body) {
  workers = resolve_workers(workers, n);
  std::vector<State> states;
  for (std::size_t w = 0; w < workers; ++w) states.push_back(make_state());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto run = [&](State& state) {
    try {
      for (std::size_t i = next++; i < n; i = next++) body(state, i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n;
    }
  };
  if (workers == 1) {
    run(states[0]);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, std::ref(states[w]));
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return states;
}

double tile_value(double v, double lo, double hi) {
  if (hi <= lo) return 128.0;
  return 255.0 * (v - lo) / (hi - lo);
}

}  // namespace

std::optional<std::size_t> ImageSource::find(const std::string& wanted) const {
  for (std::size_t i = 0; i < size(); ++i)
    if (id(i) == wanted) return i;
  return std::nullopt;
}

DirectorySource::DirectorySource(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir_, ec)) throw IoError(dir_.string() + ": not a directory");
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.is_regular_file() && entry.path().filename().string().front() != '.')
      files_.push_back(entry.path());
  }
  std::sort(files_.begin(), files_.end());
}

std::optional<PlanarImage> DirectorySource::load(std::size_t index, const ScatterConfig& config,
                                                 std::string* reason) const {
  try {
    return resize_and_crop(load_image(files_.at(index)), config.input_rows, config.input_cols);
  } catch (const Error& e) {
    if (reason) *reason = e.what();
    return std::nullopt;
  }
}

void MemorySource::add(std::string id, PlanarImage image) {
  ids_.push_back(std::move(id));
  images_.push_back(std::move(image));
}

std::optional<PlanarImage> MemorySource::load(std::size_t index, const ScatterConfig& config,
                                              std::string* reason) const {
  const auto& image = images_.at(index);
  if (image.channels() == 0) {
    if (reason) *reason = "unreadable image";
    return std::nullopt;
  }
  if (image.rows() == config.input_rows && image.cols() == config.input_cols) return image;
  return resize_and_crop(image, config.input_rows, config.input_cols);
}

bool ranks_before(const ActivationRecord& a, const ActivationRecord& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.image_index < b.image_index;
}

ActivationRecord channel_activation(const ScatterOutput& s, std::size_t channel) {
  const RealImage& grid = s.channels.at(channel);
  ActivationRecord rec;
  rec.channel = channel;
  rec.score = -1.0;
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const double v = std::abs(grid(r, c));
      if (v > rec.score) {
        rec.score = v;
        rec.site = {r, c};
      }
    }
  }
  return rec;
}

TopKTable::TopKTable(std::size_t channels, std::size_t k) : k_(k), lists_(channels) {
  if (k == 0) throw ParameterError("k must be >= 1");
}

void TopKTable::offer(const ActivationRecord& record) {
  auto& list = lists_.at(record.channel);
  if (list.size() == k_ && !ranks_before(record, list.back())) return;
  list.insert(std::upper_bound(list.begin(), list.end(), record, ranks_before), record);
  if (list.size() > k_) list.pop_back();
}

void TopKTable::offer_all(const ScatterOutput& s, std::size_t image_index, const std::string& image_id) {
  if (s.channel_count() != lists_.size())
    throw ConsistencyError("image has " + std::to_string(s.channel_count()) + " channels, table has " +
                           std::to_string(lists_.size()));
  for (std::size_t c = 0; c < lists_.size(); ++c) {
    ActivationRecord rec = channel_activation(s, c);
    rec.image_index = image_index;
    rec.image_id = image_id;
    offer(rec);
  }
}

void TopKTable::merge(const TopKTable& other) {
  if (other.lists_.size() != lists_.size() || other.k_ != k_)
    throw ConsistencyError("cannot merge top-k tables of different shape");
  for (std::size_t c = 0; c < lists_.size(); ++c) {
    std::vector<ActivationRecord> merged;
    std::merge(lists_[c].begin(), lists_[c].end(), other.lists_[c].begin(), other.lists_[c].end(),
               std::back_inserter(merged), ranks_before);
    if (merged.size() > k_) merged.resize(k_);
    lists_[c] = std::move(merged);
  }
}

IdentifyResult identify(const ImageSource& corpus, const ScatterConfig& config, std::size_t k,
                        std::size_t workers) {
  config.validate();
  if (k == 0) throw ParameterError("k must be >= 1");
  if (corpus.size() == 0) throw ValidationError("corpus is empty");

  // The channel layout depends on the plane count, fixed by the first image.
  int planes = 3;
  {
    std::string reason;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (auto image = corpus.load(i, config, &reason)) {
        planes = static_cast<int>(image->channels());
        break;
      }
    }
  }
  const std::size_t channels = channel_count(config, planes);

  struct Worker {
    TopKTable table;
    std::size_t processed = 0;
    std::vector<std::pair<std::size_t, SkippedImage>> skipped;
  };
  auto states = parallel_for<Worker>(
      corpus.size(), workers, [&] { return Worker{TopKTable(channels, k), 0, {}}; },
      [&](Worker& w, std::size_t i) {
        std::string reason;
        auto image = corpus.load(i, config, &reason);
        if (image && static_cast<int>(image->channels()) != planes) {
          reason = "plane count differs from the rest of the corpus";
          image.reset();
        }
        if (!image) {
          w.skipped.push_back({i, {corpus.id(i), reason}});
          return;
        }
        try {
          w.table.offer_all(scatter(*image, config).output, i, corpus.id(i));
          ++w.processed;
        } catch (const Error& e) {
          w.skipped.push_back({i, {corpus.id(i), e.what()}});
        }
      });

  IdentifyResult result{TopKTable(channels, k), 0, {}};
  std::vector<std::pair<std::size_t, SkippedImage>> skipped;
  for (auto& w : states) {
    result.table.merge(w.table);
    result.processed += w.processed;
    skipped.insert(skipped.end(), w.skipped.begin(), w.skipped.end());
  }
  std::sort(skipped.begin(), skipped.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& s : skipped) result.skipped.push_back(std::move(s.second));
  if (result.processed == 0) throw ValidationError("no readable images in the corpus");
  return result;
}

std::size_t lowpass_half_support(int J) {
  if (J < 1) throw ParameterError("J must be >= 1");
  constexpr std::size_t grid = 8;
  constexpr std::size_t site = grid / 2;
  RealImage coarse(grid, grid);
  coarse(site, site) = 1.0;
  const RealImage blob = interpolate_lowpass(coarse, J);
  const std::size_t cell = std::size_t{1} << J;
  double total = 0.0;
  for (double v : blob.values()) total += v * v;
  const std::size_t lo = site * cell;
  const std::size_t hi = lo + cell;
  for (std::size_t radius = 0; radius < lo; ++radius) {
    double inside = 0.0;
    for (std::size_t r = lo - radius; r < hi + radius; ++r)
      for (std::size_t c = lo - radius; c < hi + radius; ++c) inside += blob(r, c) * blob(r, c);
    if (inside >= 0.95 * total) return radius;
  }
  return lo;
}

PixelBox receptive_field(Site site, int J, std::size_t rows, std::size_t cols) {
  const std::size_t cell = std::size_t{1} << J;
  const std::size_t radius = lowpass_half_support(J);
  const auto span = [&](std::size_t index, std::size_t limit, std::size_t& lo, std::size_t& hi) {
    const std::size_t start = index * cell;
    if (start >= limit) throw DimensionError("output site outside the image");
    lo = start > radius ? start - radius : 0;
    hi = std::min(limit, start + cell + radius);
  };
  PixelBox box;
  span(site.row, rows, box.top, box.bottom);
  span(site.col, cols, box.left, box.right);
  return box;
}

PlanarImage crop_box(const PlanarImage& image, const PixelBox& box) {
  if (box.bottom > image.rows() || box.right > image.cols() || box.top >= box.bottom ||
      box.left >= box.right)
    throw DimensionError("crop box outside the image");
  PlanarImage out;
  for (const auto& plane : image.planes) {
    RealImage p(box.bottom - box.top, box.right - box.left);
    for (std::size_t r = 0; r < p.rows(); ++r)
      for (std::size_t c = 0; c < p.cols(); ++c) p(r, c) = plane(r + box.top, c + box.left);
    out.planes.push_back(std::move(p));
  }
  return out;
}

std::vector<ChannelReconstruction> reconstruct_topk(const TopKTable& table, const ImageSource& corpus,
                                                    const std::vector<std::size_t>& channels,
                                                    const ScatterConfig& config, std::size_t workers) {
  config.validate();
  std::vector<ChannelReconstruction> out;
  struct Job {
    std::size_t slot, rank;
  };
  std::vector<Job> jobs;
  for (std::size_t channel : channels) {
    if (channel >= table.channels())
      throw DimensionError("channel " + std::to_string(channel) + " outside the table's " +
                           std::to_string(table.channels()) + " channels");
    out.push_back({channel, {}, {}});
    for (std::size_t rank = 0; rank < table.list(channel).size(); ++rank) jobs.push_back({out.size() - 1, rank});
  }

  struct Outcome {
    std::optional<ReconstructionPair> pair;
    std::optional<SkippedImage> skip;
  };
  std::vector<Outcome> outcomes(jobs.size());
  parallel_for<int>(
      jobs.size(), workers, [] { return 0; },
      [&](int&, std::size_t i) {
        const auto& rec = table.list(out[jobs[i].slot].channel).at(jobs[i].rank);
        auto index = rec.image_index < corpus.size() && corpus.id(rec.image_index) == rec.image_id
                         ? std::optional<std::size_t>(rec.image_index)
                         : corpus.find(rec.image_id);
        if (!index) {
          outcomes[i].skip = SkippedImage{rec.image_id, "image no longer in the corpus"};
          return;
        }
        std::string reason;
        auto image = corpus.load(*index, config, &reason);
        if (!image) {
          outcomes[i].skip = SkippedImage{rec.image_id, reason};
          return;
        }
        try {
          const ScatterResult forward = scatter(*image, config);
          if (rec.channel >= forward.output.channel_count() || rec.site.row >= forward.output.rows() ||
              rec.site.col >= forward.output.cols())
            throw ConsistencyError("record does not fit the image's scattering output");
          const double now = std::abs(forward.output.at(rec.site.row, rec.site.col, rec.channel));
          if (std::abs(now - rec.score) > 1e-10 * std::max(1.0, std::abs(rec.score)))
            throw ConsistencyError("stored score no longer matches the image");
          const auto mask = CoefficientMask::single(rec.channel, rec.site);
          const PlanarImage recon = descatter(forward.output, forward.phases, mask, config);
          const PixelBox box = receptive_field(rec.site, config.J, image->rows(), image->cols());
          outcomes[i].pair = ReconstructionPair{rec, crop_box(recon, box), crop_box(*image, box), box};
        } catch (const Error& e) {
          outcomes[i].skip = SkippedImage{rec.image_id, e.what()};
        }
      });

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto& slot = out[jobs[i].slot];
    if (outcomes[i].pair) slot.pairs.push_back(std::move(*outcomes[i].pair));
    if (outcomes[i].skip) slot.skipped.push_back(std::move(*outcomes[i].skip));
  }
  return out;
}

PlanarImage render_grid(const std::vector<PlanarImage>& tiles, std::size_t rows, std::size_t cols) {
  if (tiles.empty()) throw ValidationError("render_grid needs at least one tile");
  if (rows * cols < tiles.size())
    throw ValidationError("a " + std::to_string(rows) + "x" + std::to_string(cols) + " layout cannot hold " +
                          std::to_string(tiles.size()) + " tiles");
  constexpr std::size_t sep = 2;
  const std::size_t planes = tiles.front().channels();
  std::size_t th = 0, tw = 0;
  for (const auto& t : tiles) {
    if (t.channels() != planes || t.rows() == 0 || t.cols() == 0)
      throw ValidationError("tiles must be non-empty and share a plane count");
    th = std::max(th, t.rows());
    tw = std::max(tw, t.cols());
  }
  PlanarImage out(planes, rows * th + (rows - 1) * sep, cols * tw + (cols - 1) * sep, 255.0);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    const std::size_t top = (i / cols) * (th + sep);
    const std::size_t left = (i % cols) * (tw + sep);
    for (std::size_t p = 0; p < planes; ++p)
      for (std::size_t r = 0; r < th; ++r)
        for (std::size_t c = 0; c < tw; ++c) out.planes[p](top + r, left + c) = 0.0;
    if (i >= tiles.size()) continue;
    const auto& tile = tiles[i];
    double lo = tile.planes[0](0, 0), hi = lo;
    for (const auto& plane : tile.planes) {
      const auto [mn, mx] = std::minmax_element(plane.values().begin(), plane.values().end());
      lo = std::min(lo, *mn);
      hi = std::max(hi, *mx);
    }
    for (std::size_t p = 0; p < planes; ++p)
      for (std::size_t r = 0; r < tile.rows(); ++r)
        for (std::size_t c = 0; c < tile.cols(); ++c)
          out.planes[p](top + r, left + c) = tile_value(tile.planes[p](r, c), lo, hi);
  }
  return out;
}

void write_topk_table(std::ostream& out, const TopKTable& table, const ScatterConfig& config,
                      const std::string& corpus) {
  out << "# scatterkit-topk J=" << config.J << " m=" << config.m
      << " color_mode=" << to_string(config.color_mode) << " rows=" << config.input_rows
      << " cols=" << config.input_cols << " k=" << table.k() << " channels=" << table.channels()
      << " corpus=" << corpus << "\n";
  out << "# channel\trank\timage\tscore\trow\tcol\tindex\n";
  char score[40];
  for (std::size_t c = 0; c < table.channels(); ++c) {
    const auto& list = table.list(c);
    for (std::size_t rank = 0; rank < list.size(); ++rank) {
      const auto& r = list[rank];
      std::snprintf(score, sizeof score, "%.17g", r.score);
      out << c << '\t' << rank << '\t' << r.image_id << '\t' << score << '\t' << r.site.row << '\t'
          << r.site.col << '\t' << r.image_index << '\n';
    }
  }
}

LoadedTable read_topk_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# scatterkit-topk ", 0) != 0)
    throw FormatError("line 1: missing '# scatterkit-topk' header");
  std::map<std::string, std::string> fields;
  {
    // corpus= comes last and runs to the end of the line; paths may hold spaces.
    std::string rest = line.substr(18);
    const auto corpus_at = rest.find("corpus=");
    if (corpus_at != std::string::npos) {
      fields["corpus"] = rest.substr(corpus_at + 7);
      rest.resize(corpus_at);
    }
    std::istringstream header(rest);
    std::string token;
    while (header >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) throw FormatError("line 1: malformed header field '" + token + "'");
      fields[token.substr(0, eq)] = token.substr(eq + 1);
    }
  }
  LoadedTable loaded;
  std::size_t k = 0, channels = 0;
  try {
    loaded.config.J = std::stoi(fields.at("J"));
    loaded.config.m = std::stoi(fields.at("m"));
    loaded.config.color_mode = parse_color_mode(fields.at("color_mode"));
    loaded.config.input_rows = std::stoul(fields.at("rows"));
    loaded.config.input_cols = std::stoul(fields.at("cols"));
    k = std::stoul(fields.at("k"));
    channels = std::stoul(fields.at("channels"));
    loaded.corpus = fields.count("corpus") ? fields["corpus"] : "";
  } catch (const std::out_of_range&) {
    throw FormatError("line 1: header lacks a required field");
  } catch (const std::invalid_argument&) {
    throw FormatError("line 1: non-numeric header field");
  }
  loaded.table = TopKTable(channels, k);
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string channel, rank, id, score, r, c, index;
    if (!std::getline(row, channel, '\t') || !std::getline(row, rank, '\t') || !std::getline(row, id, '\t') ||
        !std::getline(row, score, '\t') || !std::getline(row, r, '\t') || !std::getline(row, c, '\t'))
      throw FormatError("line " + std::to_string(number) + ": expected at least 6 tab-separated fields");
    std::getline(row, index, '\t');
    try {
      ActivationRecord rec;
      rec.channel = std::stoul(channel);
      rec.image_id = id;
      rec.score = std::stod(score);
      rec.site = {std::stoul(r), std::stoul(c)};
      rec.image_index = index.empty() ? 0 : std::stoul(index);
      if (rec.channel >= channels) throw FormatError("line " + std::to_string(number) + ": channel out of range");
      loaded.table.offer(rec);
    } catch (const std::logic_error&) {
      throw FormatError("line " + std::to_string(number) + ": malformed number");
    }
  }
  return loaded;
}

}  // namespace scatterkit
