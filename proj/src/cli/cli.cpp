#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "scatterkit/cli.hpp"
#include "scatterkit/crossorient.hpp"
#include "scatterkit/descattering.hpp"
#include "scatterkit/errors.hpp"
#include "scatterkit/imageio.hpp"
#include "scatterkit/tensorio.hpp"
#include "scatterkit/vizpipeline.hpp"

namespace scatterkit::cli {
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw ParameterError(key + ": expected a non-negative integer, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::logic_error&) {
    throw ParameterError(key + ": expected an integer, got '" + value + "'");
  }
}

std::vector<std::size_t> parse_channels(const std::string& text) {
  std::vector<std::size_t> out;
  if (text.empty() || text == "all") return out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto lo = parse_count("channels", item.substr(0, dash));
      const auto hi = parse_count("channels", item.substr(dash + 1));
      if (hi < lo) throw ParameterError("channels: empty range '" + item + "'");
      for (auto c = lo; c <= hi; ++c) out.push_back(c);
    } else {
      out.push_back(parse_count("channels", item));
    }
  }
  return out;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "levels" || key == "J")
    c.scatter.J = parse_int(key, value);
  else if (key == "order" || key == "m")
    c.scatter.m = parse_int(key, value);
  else if (key == "topk" || key == "k")
    c.k = parse_count(key, value);
  else if (key == "size")
    parse_size(value, c.scatter.input_rows, c.scatter.input_cols);
  else if (key == "color_mode" || key == "color-mode")
    c.scatter.color_mode = parse_color_mode(value);
  else if (key == "workers")
    c.workers = parse_count(key, value);
  else if (key == "scale")
    c.scale = parse_int(key, value);
  else if (key == "precision") {
    if (value != "single" && value != "double") throw ParameterError("precision must be single or double");
    c.single_precision = value == "single";
  } else if (key == "corpus")
    c.corpus_dir = value;
  else if (key == "out")
    c.output_dir = value;
  else if (key == "channels")
    c.channels = parse_channels(value);
  else if (key == "gallery")
    c.gallery = value;
  else
    throw ParameterError("unknown config key '" + key + "'");
}

// Flags registered on every subcommand; values are applied on top of the
// config file only when the flag was given.
struct CommonFlags {
  std::map<std::string, std::string> values;
  std::string config_file;

  void attach(CLI::App* app) {
    const auto opt = [&](const std::string& names, const std::string& key, const std::string& help) {
      app->add_option(names, values[key], help);
    };
    opt("-J,--levels", "levels", "Number of scales J (default 4)");
    opt("-m,--order", "order", "Maximum scattering order, 1 or 2 (default 2)");
    opt("-k,--topk", "topk", "Activations kept per channel (default 9)");
    opt("--size", "size", "Input size, N or RxC (default 64)");
    opt("--color-mode", "color_mode", "split-luminance or per-channel");
    opt("--workers", "workers", "Worker threads (default $SCATTERKIT_THREADS or 1)");
    opt("--precision", "precision", "Tensor files in double (default) or single precision");
    opt("-o,--out", "out", "Output directory");
    app->add_option("--config", config_file, "key=value config file; flags override it");
  }

  RunConfig resolve(CLI::App* app) const {
    RunConfig c;
    if (const char* env = std::getenv("SCATTERKIT_THREADS"); env && *env)
      c.workers = parse_count("SCATTERKIT_THREADS", env);
    if (!config_file.empty()) apply_config_file(config_file, c);
    for (const auto& [key, value] : values) {
      const std::string flag = key == "color_mode" ? "--color-mode" : "--" + key;
      if (app->count(flag) > 0) apply_setting(c, key, value);
    }
    c.validate();
    return c;
  }
};

class Report {
 public:
  Report(std::string command, const RunConfig& config) : command_(std::move(command)), config_(config) {}

  void note(const std::string& line) { notes_.push_back(line); }
  void skipped(const std::string& id, const std::string& reason) { skipped_.push_back(id + ": " + reason); }
  void time(const std::string& stage, Clock::time_point start) {
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f ms", ms);
    timings_.push_back(stage + ": " + buf);
  }
  std::size_t skipped_count() const { return skipped_.size(); }

  void write(const fs::path& dir) const {
    std::ostringstream out;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(config_.canonical())));
    out << "command: " << command_ << "\n";
    out << "config: " << config_.canonical() << "\n";
    out << "config_hash: " << hash << "\n";
    for (const auto& n : notes_) out << n << "\n";
    out << "skipped: " << skipped_.size() << "\n";
    for (const auto& s : skipped_) out << "  " << s << "\n";
    for (const auto& t : timings_) out << "time " << t << "\n";
    write_text(dir / "report.txt", out.str());
  }

  static void write_text(const fs::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream f(tmp);
      if (!f) throw IoError(path.string() + ": cannot open for writing");
      f << text;
      f.flush();
      if (!f) throw IoError(path.string() + ": write failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError(path.string() + ": rename failed: " + ec.message());
  }

 private:
  std::string command_;
  const RunConfig& config_;
  std::vector<std::string> notes_;
  std::vector<std::string> skipped_;
  std::vector<std::string> timings_;
};

fs::path ensure_output_dir(const RunConfig& c) {
  if (c.output_dir.empty()) throw ParameterError("--out is required");
  std::error_code ec;
  fs::create_directories(c.output_dir, ec);
  if (ec) throw IoError(c.output_dir.string() + ": cannot create directory: " + ec.message());
  return c.output_dir;
}

DType real_dtype(const RunConfig& c) { return c.single_precision ? DType::F32 : DType::F64; }
DType complex_dtype(const RunConfig& c) { return c.single_precision ? DType::C64 : DType::C128; }

std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open");
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(path.string() + ": line " + std::to_string(number) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::size_t wavelet_plane_count(const ScatterConfig& config, int color_planes) {
  return color_planes == 1 || config.color_mode == ColorMode::SplitLuminance ? 1
                                                                             : static_cast<std::size_t>(color_planes);
}

std::string phase_name(int order, std::size_t plane, int j) {
  return "phase_o" + std::to_string(order) + "_p" + std::to_string(plane) + "_j" + std::to_string(j) + ".skt";
}

void save_scatter_dir(const fs::path& dir, const ScatterResult& r, const ScatterConfig& config,
                      std::size_t rows, std::size_t cols, const RunConfig& run) {
  const auto& s = r.output;
  write_tensor(to_tensor(s.channels, real_dtype(run)), dir / "scatter.skt");
  const int J = config.J;
  for (std::size_t p = 0; p < r.phases.planes.size(); ++p) {
    const auto& pp = r.phases.planes[p];
    for (int j1 = 1; j1 <= J; ++j1) {
      std::vector<ComplexImage> bands(pp.order1[static_cast<std::size_t>(j1 - 1)].begin(),
                                      pp.order1[static_cast<std::size_t>(j1 - 1)].end());
      write_tensor(to_tensor(bands, complex_dtype(run)), dir / phase_name(1, p, j1));
    }
    if (config.m < 2) continue;
    for (int j2 = 2; j2 <= J; ++j2) {
      std::vector<ComplexImage> stack;
      for (int j1 = 1; j1 < j2; ++j1)
        for (int t1 = 0; t1 < kOrientations; ++t1)
          for (int t2 = 0; t2 < kOrientations; ++t2) stack.push_back(r.phases.order2(p, j1, t1, j2, t2));
      write_tensor(to_tensor(stack, complex_dtype(run)), dir / phase_name(2, p, j2));
    }
  }
  std::ostringstream meta;
  meta << "J=" << config.J << "\nm=" << config.m << "\ncolor_mode=" << to_string(config.color_mode)
       << "\ncolor_planes=" << s.color_planes << "\nrows=" << rows << "\ncols=" << cols
       << "\npadded_rows=" << s.padded_rows << "\npadded_cols=" << s.padded_cols << "\ncrop_top=" << s.crop.top
       << "\ncrop_bottom=" << s.crop.bottom << "\ncrop_left=" << s.crop.left << "\ncrop_right=" << s.crop.right
       << "\n";
  Report::write_text(dir / "scatter_meta.txt", meta.str());
  std::ostringstream labels;
  for (std::size_t c = 0; c < s.channel_map.size(); ++c) labels << c << '\t' << s.channel_map[c].label() << '\n';
  Report::write_text(dir / "channels.txt", labels.str());
}

struct LoadedScatter {
  ScatterOutput output;
  PhaseStore phases;
  ScatterConfig config;
};

LoadedScatter load_scatter_dir(const fs::path& dir) {
  const auto kv = read_key_values(dir / "scatter_meta.txt");
  const auto get = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError((dir / "scatter_meta.txt").string() + ": missing " + key);
    return it->second;
  };
  LoadedScatter ls;
  ls.config.J = parse_int("J", get("J"));
  ls.config.m = parse_int("m", get("m"));
  ls.config.color_mode = parse_color_mode(get("color_mode"));
  ls.config.input_rows = parse_count("rows", get("rows"));
  ls.config.input_cols = parse_count("cols", get("cols"));
  ls.config.validate();
  auto& s = ls.output;
  s.color_planes = parse_int("color_planes", get("color_planes"));
  s.padded_rows = parse_count("padded_rows", get("padded_rows"));
  s.padded_cols = parse_count("padded_cols", get("padded_cols"));
  s.crop = {parse_count("crop_top", get("crop_top")), parse_count("crop_bottom", get("crop_bottom")),
            parse_count("crop_left", get("crop_left")), parse_count("crop_right", get("crop_right"))};
  s.channels = real_channels(read_tensor(dir / "scatter.skt"));
  s.channel_map = build_channel_map(ls.config, s.color_planes);
  if (s.channels.size() != s.channel_map.size())
    throw ConsistencyError("scatter.skt has " + std::to_string(s.channels.size()) + " channels, metadata implies " +
                           std::to_string(s.channel_map.size()));

  const int J = ls.config.J;
  const std::size_t planes = wavelet_plane_count(ls.config, s.color_planes);
  for (std::size_t p = 0; p < planes; ++p) {
    PlanePhases pp;
    pp.order1.resize(static_cast<std::size_t>(J));
    for (int j1 = 1; j1 <= J; ++j1) {
      auto bands = complex_channels(read_tensor(dir / phase_name(1, p, j1)));
      if (bands.size() != static_cast<std::size_t>(kOrientations))
        throw ConsistencyError(phase_name(1, p, j1) + ": expected 6 orientation channels");
      for (int t = 0; t < kOrientations; ++t)
        pp.order1[static_cast<std::size_t>(j1 - 1)][static_cast<std::size_t>(t)] = std::move(bands[static_cast<std::size_t>(t)]);
    }
    if (ls.config.m >= 2) {
      pp.order2.resize(static_cast<std::size_t>(J));
      for (int j1 = 1; j1 < J; ++j1)
        for (auto& per_t1 : pp.order2[static_cast<std::size_t>(j1 - 1)]) per_t1.resize(static_cast<std::size_t>(J - j1));
      for (int j2 = 2; j2 <= J; ++j2) {
        auto stack = complex_channels(read_tensor(dir / phase_name(2, p, j2)));
        if (stack.size() != static_cast<std::size_t>((j2 - 1) * kOrientations * kOrientations))
          throw ConsistencyError(phase_name(2, p, j2) + ": unexpected channel count");
        std::size_t next = 0;
        for (int j1 = 1; j1 < j2; ++j1)
          for (int t1 = 0; t1 < kOrientations; ++t1)
            for (int t2 = 0; t2 < kOrientations; ++t2)
              pp.order2[static_cast<std::size_t>(j1 - 1)][static_cast<std::size_t>(t1)]
                       [static_cast<std::size_t>(j2 - j1 - 1)][static_cast<std::size_t>(t2)] = std::move(stack[next++]);
      }
    }
    ls.phases.planes.push_back(std::move(pp));
  }
  return ls;
}

PlanarImage normalized_for_display(const PlanarImage& image) { return render_grid({image}, 1, 1); }

std::pair<std::size_t, std::size_t> grid_layout(std::size_t n) {
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  return {(n + cols - 1) / cols, cols};
}

int cmd_scatter(const fs::path& image_path, const RunConfig& c, bool resize, std::ostream& out) {
  Report report("scatter " + image_path.string(), c);
  const auto start = Clock::now();
  PlanarImage image = load_image(image_path);
  if (resize) image = resize_and_crop(image, c.scatter.input_rows, c.scatter.input_cols);
  report.time("load", start);
  const auto t1 = Clock::now();
  const ScatterResult r = scatter(image, c.scatter);
  report.time("scatter", t1);
  const fs::path dir = ensure_output_dir(c);
  ScatterConfig used = c.scatter;
  used.input_rows = image.rows();
  used.input_cols = image.cols();
  const auto t2 = Clock::now();
  save_scatter_dir(dir, r, used, image.rows(), image.cols(), c);
  report.time("write", t2);
  const auto& s = r.output;
  report.note("input: " + std::to_string(image.rows()) + "x" + std::to_string(image.cols()) + "x" +
              std::to_string(image.channels()));
  report.note("crop: top=" + std::to_string(s.crop.top) + " bottom=" + std::to_string(s.crop.bottom) +
              " left=" + std::to_string(s.crop.left) + " right=" + std::to_string(s.crop.right));
  report.note("output: " + std::to_string(s.rows()) + "x" + std::to_string(s.cols()) + "x" +
              std::to_string(s.channel_count()));
  report.write(dir);
  out << "scatter: " << s.rows() << "x" << s.cols() << "x" << s.channel_count() << " -> " << dir.string() << "\n";
  return kExitOk;
}

int cmd_descatter(const fs::path& scatter_dir, const RunConfig& c, long channel, const std::string& site,
                  std::ostream& out) {
  Report report("descatter " + scatter_dir.string(), c);
  const auto start = Clock::now();
  const LoadedScatter ls = load_scatter_dir(scatter_dir);
  report.time("load", start);
  CoefficientMask mask = CoefficientMask::full_tensor();
  if (channel >= 0) {
    mask = CoefficientMask::full_channel(static_cast<std::size_t>(channel));
    if (!site.empty()) {
      const auto comma = site.find(',');
      if (comma == std::string::npos) throw ParameterError("--site expects row,col");
      mask = CoefficientMask::single(static_cast<std::size_t>(channel),
                                     {parse_count("site", trim(site.substr(0, comma))),
                                      parse_count("site", trim(site.substr(comma + 1)))});
    }
  } else if (!site.empty()) {
    throw ParameterError("--site needs --channel");
  }
  const auto t1 = Clock::now();
  const PlanarImage recon = descatter(ls.output, ls.phases, mask, ls.config);
  report.time("descatter", t1);
  const fs::path dir = ensure_output_dir(c);
  write_tensor(to_tensor(recon.planes, real_dtype(c)), dir / "reconstruction.skt");
  save_image(normalized_for_display(recon), dir / "reconstruction.png");
  report.write(dir);
  out << "descatter: " << recon.rows() << "x" << recon.cols() << "x" << recon.channels() << " -> "
      << dir.string() << "\n";
  return kExitOk;
}

int cmd_identify(const fs::path& corpus_dir, const RunConfig& c, std::ostream& out) {
  Report report("identify " + corpus_dir.string(), c);
  const auto start = Clock::now();
  const DirectorySource corpus(corpus_dir);
  if (corpus.size() == 0) throw ValidationError(corpus_dir.string() + ": corpus is empty");
  const IdentifyResult result = identify(corpus, c.scatter, c.k, c.workers);
  report.time("identify", start);
  for (const auto& s : result.skipped) report.skipped(s.id, s.reason);
  report.note("images: " + std::to_string(corpus.size()) + " processed: " + std::to_string(result.processed));
  report.note("preprocessing: shorter side resized, centre crop to " + std::to_string(c.scatter.input_rows) + "x" +
              std::to_string(c.scatter.input_cols) + ", RGB in [0, 1]");
  const fs::path dir = ensure_output_dir(c);
  std::ostringstream table;
  write_topk_table(table, result.table, c.scatter, fs::absolute(corpus_dir).string());
  Report::write_text(dir / "topk.txt", table.str());
  report.write(dir);
  out << "identify: " << result.processed << " images, " << result.skipped.size() << " skipped -> "
      << (dir / "topk.txt").string() << "\n";
  return kExitOk;
}

int cmd_reconstruct(const fs::path& table_path, RunConfig c, std::ostream& out, std::ostream& err) {
  std::ifstream in(table_path);
  if (!in) throw IoError(table_path.string() + ": cannot open");
  LoadedTable loaded = read_topk_table(in);
  // The table pins the scattering configuration it was built with.
  c.scatter = loaded.config;
  if (c.corpus_dir.empty()) c.corpus_dir = loaded.corpus;
  Report report("reconstruct " + table_path.string(), c);
  const auto start = Clock::now();
  const DirectorySource corpus(c.corpus_dir);
  std::vector<std::size_t> channels = c.channels;
  if (channels.empty())
    for (std::size_t ch = 0; ch < loaded.table.channels(); ++ch) channels.push_back(ch);
  const auto results = reconstruct_topk(loaded.table, corpus, channels, c.scatter, c.workers);
  report.time("reconstruct", start);
  const fs::path dir = ensure_output_dir(c);
  std::size_t grids = 0;
  for (const auto& r : results) {
    for (const auto& s : r.skipped) {
      report.skipped(s.id, s.reason);
      err << "warning: channel " << r.channel << ": skipped " << s.id << ": " << s.reason << "\n";
    }
    if (r.pairs.empty()) continue;
    std::vector<PlanarImage> recon, patches;
    for (const auto& p : r.pairs) {
      recon.push_back(p.reconstruction);
      patches.push_back(p.input_patch);
    }
    const auto [rows, cols] = grid_layout(recon.size());
    char name[64];
    std::snprintf(name, sizeof name, "channel_%03zu", r.channel);
    save_image(render_grid(recon, rows, cols), dir / (std::string(name) + "_recon.png"));
    save_image(render_grid(patches, rows, cols), dir / (std::string(name) + "_input.png"));
    ++grids;
  }
  report.time("total", start);
  report.write(dir);
  out << "reconstruct: " << grids << " channel grids, " << report.skipped_count() << " skipped -> " << dir.string()
      << "\n";
  return kExitOk;
}

std::vector<CrossOrientFilter> builtin_gallery(const std::string& name) {
  if (name == "onehot") return onehot_gallery();
  if (name == "corner") return corner_gallery();
  if (name == "rototranslation") return make_rototranslation_bank(kOrientations);
  if (name == "spatial") return spatial_gallery();
  if (name == "all") {
    std::vector<CrossOrientFilter> all;
    for (const char* n : {"onehot", "corner", "rototranslation", "spatial"}) {
      auto part = builtin_gallery(n);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  return {};
}

std::vector<CrossOrientFilter> load_gallery(const std::string& source) {
  if (fs::is_directory(source)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(source))
      if (e.is_regular_file() && e.path().extension() == ".skt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<CrossOrientFilter> out;
    for (const auto& f : files) {
      auto filter = filter_from_tensor(read_tensor(f));
      filter.set_name(f.stem().string());
      out.push_back(std::move(filter));
    }
    return out;
  }
  if (fs::is_regular_file(source)) {
    auto filter = filter_from_tensor(read_tensor(source));
    filter.set_name(fs::path(source).stem().string());
    return {filter};
  }
  auto builtin = builtin_gallery(source);
  if (builtin.empty() && source != "")
    throw ValidationError("gallery '" + source + "' is neither a directory, a tensor file nor a built-in name");
  return builtin;
}

int cmd_filtershapes(const std::string& gallery, const RunConfig& c, std::ostream& out) {
  Report report("filtershapes " + gallery, c);
  const auto start = Clock::now();
  const auto filters = load_gallery(gallery);
  if (filters.empty()) throw ValidationError("gallery '" + gallery + "' contains no filters");
  const fs::path dir = ensure_output_dir(c);
  std::ostringstream dots;
  dots << "# filter\tnormalized_dot(real, imaginary)\tscale=" << c.scale << "\n";
  std::vector<PlanarImage> tiles_real, tiles_imag;
  for (const auto& f : filters) {
    const RealImage re = reconstruct_filter_shape(f, VPart::Real, c.scale, c.scatter.input_rows, c.scatter.input_cols);
    const RealImage im =
        reconstruct_filter_shape(f, VPart::Imaginary, c.scale, c.scatter.input_rows, c.scatter.input_cols);
    const PlanarImage pre(std::vector<RealImage>{re});
    const PlanarImage pim(std::vector<RealImage>{im});
    save_image(normalized_for_display(pre), dir / (f.name() + "_real.png"));
    save_image(normalized_for_display(pim), dir / (f.name() + "_imag.png"));
    tiles_real.push_back(pre);
    tiles_imag.push_back(pim);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", normalized_dot(re, im));
    dots << f.name() << '\t' << buf << '\n';
  }
  // Real shapes on the top row, imaginary below, as pairs.
  std::vector<PlanarImage> tiles = tiles_real;
  tiles.insert(tiles.end(), tiles_imag.begin(), tiles_imag.end());
  save_image(render_grid(tiles, 2, filters.size()), dir / "shapes.png");
  Report::write_text(dir / "dots.txt", dots.str());
  report.time("filtershapes", start);
  report.write(dir);
  out << "filtershapes: " << filters.size() << " filters -> " << dir.string() << "\n";
  return kExitOk;
}

int cmd_gallery(const std::string& name, const RunConfig& c, std::ostream& out) {
  const auto filters = builtin_gallery(name);
  if (filters.empty()) throw ValidationError("unknown built-in gallery '" + name + "'");
  const fs::path dir = ensure_output_dir(c);
  for (const auto& f : filters) write_tensor(to_tensor(f, complex_dtype(c)), dir / (f.name() + ".skt"));
  out << "gallery: " << filters.size() << " filters -> " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

void RunConfig::validate() const {
  scatter.validate();
  if (k == 0) throw ParameterError("k must be >= 1");
  if (scale < 1) throw ParameterError("scale must be >= 1");
}

std::string RunConfig::canonical() const {
  std::ostringstream s;
  s << "J=" << scatter.J << " m=" << scatter.m << " color_mode=" << to_string(scatter.color_mode)
    << " size=" << scatter.input_rows << "x" << scatter.input_cols << " k=" << k << " scale=" << scale
    << " precision=" << (single_precision ? "single" : "double");
  return s.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void parse_size(const std::string& text, std::size_t& rows, std::size_t& cols) {
  const auto x = text.find('x');
  if (x == std::string::npos) {
    rows = cols = parse_count("size", text);
  } else {
    rows = parse_count("size", text.substr(0, x));
    cols = parse_count("size", text.substr(x + 1));
  }
  if (rows == 0 || cols == 0) throw ParameterError("size must be non-zero");
}

void apply_config_file(const fs::path& path, RunConfig& config) {
  for (const auto& [key, value] : read_key_values(path)) apply_setting(config, key, value);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scattering transform, inverse scattering and activation visualisation", "scatterkit"};
  app.require_subcommand(1);

  std::string input;
  long channel = -1;
  std::string site;
  std::string corpus;
  std::string channels;
  int scale = 0;

  auto* scatter_cmd = app.add_subcommand("scatter", "Scatter one image into tensor files");
  CommonFlags scatter_flags;
  scatter_flags.attach(scatter_cmd);
  scatter_cmd->add_option("image", input, "Input image")->required();

  auto* descatter_cmd = app.add_subcommand("descatter", "Back-project a scatter directory to pixels");
  CommonFlags descatter_flags;
  descatter_flags.attach(descatter_cmd);
  descatter_cmd->add_option("scatter_dir", input, "Directory written by 'scatter'")->required();
  descatter_cmd->add_option("--channel", channel, "Keep only this channel");
  descatter_cmd->add_option("--site", site, "With --channel, keep only this row,col");

  auto* identify_cmd = app.add_subcommand("identify", "Top-k activations per channel over a corpus");
  CommonFlags identify_flags;
  identify_flags.attach(identify_cmd);
  identify_cmd->add_option("corpus_dir", input, "Directory of images")->required();

  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Grids of top-k reconstructions and input patches");
  CommonFlags reconstruct_flags;
  reconstruct_flags.attach(reconstruct_cmd);
  reconstruct_cmd->add_option("table", input, "topk.txt written by 'identify'")->required();
  reconstruct_cmd->add_option("--corpus", corpus, "Corpus directory (default: the one in the table)");
  reconstruct_cmd->add_option("--channels", channels, "Channel list, e.g. 0,5,27-30 (default all)");

  auto* shapes_cmd = app.add_subcommand("filtershapes", "Real/imaginary pixel shapes of cross-orientation filters");
  CommonFlags shapes_flags;
  shapes_flags.attach(shapes_cmd);
  shapes_cmd->add_option("gallery", input,
                         "Built-in gallery (onehot, corner, rototranslation, spatial, all), a directory of "
                         ".skt filters or one .skt file")
      ->required();
  shapes_cmd->add_option("--scale", scale, "Wavelet scale the filter acts on (default 2)");

  auto* gallery_cmd = app.add_subcommand("gallery", "Export a built-in filter gallery as tensor files");
  CommonFlags gallery_flags;
  gallery_flags.attach(gallery_cmd);
  gallery_cmd->add_option("name", input, "onehot, corner, rototranslation, spatial or all")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (scatter_cmd->parsed()) {
      const RunConfig c = scatter_flags.resolve(scatter_cmd);
      const bool resize = scatter_cmd->count("--size") > 0 ||
                          (!scatter_flags.config_file.empty() &&
                           read_key_values(scatter_flags.config_file).count("size") > 0);
      return cmd_scatter(input, c, resize, out);
    }
    if (descatter_cmd->parsed()) return cmd_descatter(input, descatter_flags.resolve(descatter_cmd), channel, site, out);
    if (identify_cmd->parsed()) return cmd_identify(input, identify_flags.resolve(identify_cmd), out);
    if (reconstruct_cmd->parsed()) {
      RunConfig c = reconstruct_flags.resolve(reconstruct_cmd);
      if (!corpus.empty()) c.corpus_dir = corpus;
      if (!channels.empty()) c.channels = parse_channels(channels);
      return cmd_reconstruct(input, c, out, err);
    }
    if (shapes_cmd->parsed()) {
      RunConfig c = shapes_flags.resolve(shapes_cmd);
      if (shapes_cmd->count("--scale") > 0) c.scale = scale;
      c.validate();
      return cmd_filtershapes(input, c, out);
    }
    if (gallery_cmd->parsed()) return cmd_gallery(input, gallery_flags.resolve(gallery_cmd), out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace scatterkit::cli
