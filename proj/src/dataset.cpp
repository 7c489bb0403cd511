#include "hyperstar/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <thread>

#include "hyperstar/image.hpp"

namespace fs = std::filesystem;

namespace hyperstar {

namespace {

void hsv_to_rgb(double h, double s, double v, double rgb[3]) {
  h = h - std::floor(h);
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  rgb[0] = r + m;
  rgb[1] = g + m;
  rgb[2] = b + m;
}

void finalize_index(Dataset& ds) {
  ds.by_domain.assign(static_cast<size_t>(ds.num_domains), {});
  for (int64_t i = 0; i < ds.size(); ++i)
    ds.by_domain[static_cast<size_t>(ds.labels[static_cast<size_t>(i)])].push_back(i);
}

int load_threads() {
  const char* s = std::getenv("HYPERSTAR_THREADS");
  if (!s) return 1;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || v < 1) return 1;
  return static_cast<int>(std::min(v, 64L));
}

}  // namespace

Dataset generate_synthetic_dataset(int64_t num_domains, int64_t image_size,
                                   int64_t count, uint64_t seed) {
  if (num_domains < 2 || num_domains > 4)
    throw value_error("synthetic data supports 2 to 4 domains, got " +
                      std::to_string(num_domains));
  if (image_size < 8) throw value_error("image_size must be at least 8");
  if (count < num_domains) throw value_error("need at least one image per domain");

  Dataset ds;
  ds.num_domains = num_domains;
  ds.image_size = image_size;
  ds.images.reserve(static_cast<size_t>(count));
  ds.labels.reserve(static_cast<size_t>(count));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double s = static_cast<double>(image_size);

  for (int64_t i = 0; i < count; ++i) {
    const int64_t domain = i % num_domains;
    const int kind = static_cast<int>(domain % 4);  // circle, square, triangle, cross
    const double hue =
        static_cast<double>(domain) / static_cast<double>(num_domains) +
        (unit(rng) * 2.0 - 1.0) * 0.08;
    double fill[3];
    hsv_to_rgb(hue, 0.9, 0.9, fill);
    const double bg = 0.05 + unit(rng) * 0.13;
    const double r = s / 6.0 + unit(rng) * (s / 4.0 - s / 6.0);
    const double cx = s / 2.0 + (unit(rng) * 2.0 - 1.0) * s / 8.0;
    const double cy = s / 2.0 + (unit(rng) * 2.0 - 1.0) * s / 8.0;

    Tensor img = Tensor::zeros({3, image_size, image_size});
    double* d = img.data();
    const int64_t hw = image_size * image_size;
    for (int64_t y = 0; y < image_size; ++y)
      for (int64_t x = 0; x < image_size; ++x) {
        const double dx = (x + 0.5) - cx, dy = (y + 0.5) - cy;
        bool inside = false;
        switch (kind) {
          case 0: inside = dx * dx + dy * dy <= r * r; break;
          case 1: inside = std::max(std::fabs(dx), std::fabs(dy)) <= r * 0.9; break;
          case 2:
            inside = dy >= -r && dy <= 0.5 * r &&
                     std::fabs(dx) <= 0.866 * r * ((dy + r) / (1.5 * r));
            break;
          default:
            inside = (std::fabs(dx) <= 0.35 * r && std::fabs(dy) <= r) ||
                     (std::fabs(dy) <= 0.35 * r && std::fabs(dx) <= r);
            break;
        }
        const int64_t at = y * image_size + x;
        for (int c = 0; c < 3; ++c)
          d[c * hw + at] = (inside ? fill[c] : bg) * 2.0 - 1.0;
      }
    ds.images.push_back(std::move(img));
    ds.labels.push_back(domain);
  }
  finalize_index(ds);
  return ds;
}

Dataset load_image_folder(const std::string& root, int64_t image_size) {
  if (!fs::is_directory(root))
    throw value_error("data root " + root + " is not a directory");

  std::vector<fs::path> domains;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) domains.push_back(e.path());
  std::sort(domains.begin(), domains.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  if (domains.empty())
    throw value_error("data root " + root + " has no domain subdirectories");

  struct Entry {
    fs::path path;
    int64_t domain;
  };
  std::vector<Entry> files;
  for (size_t d = 0; d < domains.size(); ++d) {
    std::vector<fs::path> names;
    for (const auto& e : fs::directory_iterator(domains[d]))
      if (e.is_regular_file()) names.push_back(e.path());
    std::sort(names.begin(), names.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    for (auto& p : names) files.push_back({std::move(p), static_cast<int64_t>(d)});
  }

  std::vector<Tensor> decoded(files.size());
  std::vector<char> ok(files.size(), 0);
  std::vector<std::string> errors(files.size());
  auto decode_range = [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i) {
      try {
        ImageU8 img = read_png(files[i].path.string());
        decoded[i] = image_to_tensor(
            resize_bilinear(img, static_cast<int>(image_size), static_cast<int>(image_size)));
        ok[i] = 1;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int threads = std::min<int>(load_threads(), std::max<size_t>(files.size(), 1));
  if (threads <= 1 || files.size() < 2) {
    decode_range(0, files.size());
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (files.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const size_t lo = static_cast<size_t>(t) * chunk;
      if (lo >= files.size()) break;
      pool.emplace_back(decode_range, lo, std::min(lo + chunk, files.size()));
    }
    for (auto& th : pool) th.join();
  }

  Dataset ds;
  ds.num_domains = static_cast<int64_t>(domains.size());
  ds.image_size = image_size;
  for (size_t i = 0; i < files.size(); ++i) {
    if (!ok[i]) {
      std::cerr << "warning: skipping " << files[i].path.string() << ": " << errors[i]
                << "\n";
      continue;
    }
    ds.images.push_back(std::move(decoded[i]));
    ds.labels.push_back(files[i].domain);
  }
  finalize_index(ds);
  for (size_t d = 0; d < domains.size(); ++d)
    if (ds.by_domain[d].empty())
      throw value_error("domain directory " + domains[d].string() +
                        " contains no readable images");
  return ds;
}

Tensor to_model_channels(const Tensor& rgb, int64_t n) {
  if (rgb.ndim() != 4 || rgb.size(1) != 3)
    throw shape_error("expected [B,3,S,S], got " + shape_str(rgb.shape()));
  if (n == 3) return rgb;
  const int64_t b = rgb.size(0), hw = rgb.size(2) * rgb.size(3);
  Tensor out = Tensor::zeros({b, n, rgb.size(2), rgb.size(3)});
  const double* src = rgb.data();
  double* dst = out.data();
  for (int64_t i = 0; i < b; ++i) {
    const double* r = src + i * 3 * hw;
    const double* g = r + hw;
    const double* bl = g + hw;
    double* o = dst + i * n * hw;
    if (n == 1 || n == 2) {
      for (int64_t j = 0; j < hw; ++j)
        o[j] = 0.299 * r[j] + 0.587 * g[j] + 0.114 * bl[j];
    } else if (n == 4) {
      std::copy_n(r, 3 * hw, o);
    } else {
      throw value_error("no image layout for n=" + std::to_string(n));
    }
  }
  return out;
}

Tensor to_rgb_channels(const Tensor& x, int64_t n) {
  if (x.ndim() != 4 || x.size(1) != n)
    throw shape_error("expected [B," + std::to_string(n) + ",S,S], got " +
                      shape_str(x.shape()));
  if (n == 3) return x;
  const int64_t b = x.size(0), hw = x.size(2) * x.size(3);
  Tensor out = Tensor::zeros({b, 3, x.size(2), x.size(3)});
  const double* src = x.data();
  double* dst = out.data();
  for (int64_t i = 0; i < b; ++i) {
    const double* in = src + i * n * hw;
    double* o = dst + i * 3 * hw;
    if (n == 1 || n == 2) {
      for (int c = 0; c < 3; ++c) std::copy_n(in, hw, o + c * hw);
    } else if (n == 4) {
      std::copy_n(in, 3 * hw, o);
    } else {
      throw value_error("no image layout for n=" + std::to_string(n));
    }
  }
  return out;
}

Tensor stack_images(const Dataset& ds, const std::vector<int64_t>& indices) {
  if (indices.empty()) throw value_error("cannot stack an empty batch");
  const int64_t s = ds.image_size;
  Tensor out = Tensor::zeros({static_cast<int64_t>(indices.size()), 3, s, s});
  const int64_t per = 3 * s * s;
  for (size_t i = 0; i < indices.size(); ++i) {
    const Tensor& img = ds.images[static_cast<size_t>(indices[i])];
    std::copy_n(img.data(), per, out.data() + static_cast<int64_t>(i) * per);
  }
  return out;
}

}  // namespace hyperstar
