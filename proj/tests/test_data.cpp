#include <catch2/catch.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>

#include "hyperstar/checkpoint.hpp"
#include "hyperstar/config.hpp"
#include "hyperstar/dataset.hpp"
#include "hyperstar/image.hpp"

using namespace hyperstar;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("hyperstar_test_" + tag + "_" +
                                        std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

double channel_mean(const Tensor& img, int c) {
  const int64_t hw = img.size(1) * img.size(2);
  double acc = 0;
  for (int64_t i = 0; i < hw; ++i) acc += img.data()[c * hw + i];
  return acc / static_cast<double>(hw);
}

}  // namespace

TEST_CASE("synthetic dataset is deterministic, balanced, and hue-separated", "[data]") {
  Dataset a = generate_synthetic_dataset(2, 16, 100, 42);
  Dataset b = generate_synthetic_dataset(2, 16, 100, 42);
  Dataset c = generate_synthetic_dataset(2, 16, 100, 43);

  REQUIRE(a.size() == 100);
  REQUIRE(a.num_domains == 2);
  REQUIRE(a.by_domain[0].size() == 50);
  REQUIRE(a.by_domain[1].size() == 50);

  SECTION("same seed, same pixels") {
    for (int64_t i = 0; i < a.size(); ++i) {
      REQUIRE(a.labels[i] == b.labels[i]);
      for (int64_t k = 0; k < a.images[i].numel(); ++k)
        REQUIRE(a.images[i].data()[k] == b.images[i].data()[k]);
    }
  }
  SECTION("different seed, different pixels") {
    bool any_diff = false;
    for (int64_t k = 0; k < a.images[0].numel(); ++k)
      any_diff = any_diff || a.images[0].data()[k] != c.images[0].data()[k];
    REQUIRE(any_diff);
  }
  SECTION("per-domain mean colors separate") {
    double m0[3] = {0, 0, 0}, m1[3] = {0, 0, 0};
    for (int64_t idx : a.by_domain[0])
      for (int ch = 0; ch < 3; ++ch) m0[ch] += channel_mean(a.images[idx], ch) / 50.0;
    for (int64_t idx : a.by_domain[1])
      for (int ch = 0; ch < 3; ++ch) m1[ch] += channel_mean(a.images[idx], ch) / 50.0;
    const double gap =
        std::fabs(m0[0] - m1[0]) + std::fabs(m0[1] - m1[1]) + std::fabs(m0[2] - m1[2]);
    REQUIRE(gap > 0.05);
  }
  SECTION("domain count limits") {
    REQUIRE_THROWS(generate_synthetic_dataset(1, 16, 10, 0));
    REQUIRE_THROWS(generate_synthetic_dataset(5, 16, 10, 0));
  }
}

TEST_CASE("image tensor conversion hits the exact endpoints", "[data]") {
  ImageU8 img;
  img.width = 2;
  img.height = 1;
  img.rgb = {255, 255, 255, 0, 0, 0};  // one white, one black pixel
  Tensor t = image_to_tensor(img);
  REQUIRE(t.shape() == Shape{3, 1, 2});
  for (int c = 0; c < 3; ++c) {
    REQUIRE(t.data()[c * 2 + 0] == 1.0);
    REQUIRE(t.data()[c * 2 + 1] == -1.0);
  }
  ImageU8 back = tensor_to_image(t);
  REQUIRE(back.rgb == img.rgb);
}

TEST_CASE("byte images survive the tensor round trip", "[data]") {
  std::mt19937_64 rng(7);
  ImageU8 img;
  img.width = 9;
  img.height = 5;
  img.rgb.resize(9 * 5 * 3);
  for (auto& v : img.rgb) v = static_cast<uint8_t>(rng() % 256);
  ImageU8 back = tensor_to_image(image_to_tensor(img));
  REQUIRE(back.rgb == img.rgb);
}

TEST_CASE("folder ingestion labels domains lexicographically", "[data]") {
  TempDir root("folder");
  fs::create_directories(root.path / "dog");
  fs::create_directories(root.path / "cat");

  Dataset src = generate_synthetic_dataset(2, 16, 6, 9);
  for (int i = 0; i < 3; ++i)
    write_png((root.path / "cat" / ("img" + std::to_string(i) + ".png")).string(),
              tensor_to_image(src.images[i]));
  for (int i = 3; i < 6; ++i)
    write_png((root.path / "dog" / ("img" + std::to_string(i) + ".png")).string(),
              tensor_to_image(src.images[i]));

  Dataset ds = load_image_folder(root.str(), 16);
  REQUIRE(ds.num_domains == 2);
  REQUIRE(ds.size() == 6);
  // "cat" sorts before "dog"
  REQUIRE(ds.labels == std::vector<int64_t>{0, 0, 0, 1, 1, 1});

  // same size, so resize is the identity; only u8 quantization in the loop
  for (int64_t k = 0; k < ds.images[0].numel(); ++k)
    REQUIRE(ds.images[0].data()[k] == Approx(src.images[0].data()[k]).margin(1.0 / 127.5));
}

TEST_CASE("unreadable files are skipped, empty domains are fatal", "[data]") {
  TempDir root("badfiles");
  fs::create_directories(root.path / "a");
  fs::create_directories(root.path / "b");
  Dataset src = generate_synthetic_dataset(2, 16, 2, 1);
  write_png((root.path / "a" / "ok.png").string(), tensor_to_image(src.images[0]));
  write_png((root.path / "b" / "ok.png").string(), tensor_to_image(src.images[1]));
  std::ofstream(root.path / "a" / "junk.png") << "this is not a png";

  Dataset ds = load_image_folder(root.str(), 16);
  REQUIRE(ds.size() == 2);  // junk skipped

  fs::create_directories(root.path / "c");  // stays empty
  REQUIRE_THROWS_WITH(load_image_folder(root.str(), 16),
                      Catch::Contains("no readable images"));
}

TEST_CASE("parallel and serial folder loads agree", "[data]") {
  TempDir root("threads");
  fs::create_directories(root.path / "x");
  fs::create_directories(root.path / "y");
  Dataset src = generate_synthetic_dataset(2, 16, 10, 4);
  for (int i = 0; i < 10; ++i)
    write_png(
        (root.path / (i % 2 ? "y" : "x") / ("f" + std::to_string(i / 2) + ".png")).string(),
        tensor_to_image(src.images[i]));

  Dataset serial = load_image_folder(root.str(), 16);
  setenv("HYPERSTAR_THREADS", "4", 1);
  Dataset parallel = load_image_folder(root.str(), 16);
  unsetenv("HYPERSTAR_THREADS");

  REQUIRE(serial.size() == parallel.size());
  REQUIRE(serial.labels == parallel.labels);
  for (int64_t i = 0; i < serial.size(); ++i)
    for (int64_t k = 0; k < serial.images[i].numel(); ++k)
      REQUIRE(serial.images[i].data()[k] == parallel.images[i].data()[k]);
}

TEST_CASE("model channel layouts", "[data]") {
  Dataset src = generate_synthetic_dataset(2, 8, 2, 5);
  Tensor rgb = stack_images(src, {0, 1});
  const int64_t hw = 64;

  SECTION("n=3 passes through") {
    Tensor m = to_model_channels(rgb, 3);
    REQUIRE(m.data() == rgb.data());
  }
  SECTION("n=1 is the luminance projection") {
    Tensor m = to_model_channels(rgb, 1);
    REQUIRE(m.shape() == Shape{2, 1, 8, 8});
    const double* p = rgb.data();
    REQUIRE(m.data()[0] == Approx(0.299 * p[0] + 0.587 * p[hw] + 0.114 * p[2 * hw]));
  }
  SECTION("n=2 adds one silent channel") {
    Tensor m = to_model_channels(rgb, 2);
    REQUIRE(m.shape() == Shape{2, 2, 8, 8});
    for (int64_t i = 0; i < hw; ++i) REQUIRE(m.data()[hw + i] == 0.0);
  }
  SECTION("n=4 pads a zero channel after RGB") {
    Tensor m = to_model_channels(rgb, 4);
    REQUIRE(m.shape() == Shape{2, 4, 8, 8});
    for (int64_t i = 0; i < 3 * hw; ++i) REQUIRE(m.data()[i] == rgb.data()[i]);
    for (int64_t i = 0; i < hw; ++i) REQUIRE(m.data()[3 * hw + i] == 0.0);
    Tensor back = to_rgb_channels(m, 4);
    for (int64_t i = 0; i < back.numel(); ++i) REQUIRE(back.data()[i] == rgb.data()[i]);
  }
  SECTION("n=1 display replicates the channel") {
    Tensor m = to_model_channels(rgb, 1);
    Tensor back = to_rgb_channels(m, 1);
    REQUIRE(back.shape() == rgb.shape());
    for (int64_t i = 0; i < hw; ++i) {
      REQUIRE(back.data()[i] == m.data()[i]);
      REQUIRE(back.data()[hw + i] == m.data()[i]);
      REQUIRE(back.data()[2 * hw + i] == m.data()[i]);
    }
  }
}

TEST_CASE("grid tiling places images row-major", "[data]") {
  std::vector<ImageU8> tiles(4);
  for (int i = 0; i < 4; ++i) {
    tiles[i].width = tiles[i].height = 2;
    tiles[i].rgb.assign(12, static_cast<uint8_t>(i * 10));
  }
  ImageU8 grid = tile_grid(tiles, 2);
  REQUIRE(grid.width == 4);
  REQUIRE(grid.height == 4);
  REQUIRE(grid.rgb[0] == 0);                          // tile 0 top-left
  REQUIRE(grid.rgb[(0 * 4 + 2) * 3] == 10);           // tile 1 starts at x=2
  REQUIRE(grid.rgb[(2 * 4 + 0) * 3] == 20);           // tile 2 second row
  REQUIRE(grid.rgb[(3 * 4 + 3) * 3] == 30);           // tile 3 bottom-right
  REQUIRE_THROWS(tile_grid({}, 2));
}

TEST_CASE("config text round-trips and rejects what it does not know", "[data]") {
  TrainConfig cfg;
  cfg.n = 3;
  cfg.image_size = 64;
  cfg.lambda_sty = 0.7;
  cfg.lr = 3e-4;
  cfg.seed = 123456789;

  const std::string text = serialize_config(cfg);
  TrainConfig parsed = parse_config(text);
  REQUIRE(serialize_config(parsed) == text);

  SECTION("every field appears exactly once") {
    REQUIRE(std::count(text.begin(), text.end(), '=') == 17);
    REQUIRE(std::count(text.begin(), text.end(), '\n') == 17);
  }
  SECTION("comments and blanks are ignored") {
    TrainConfig c = parse_config("# hello\n\n  n = 2  # inline\nbatch=4\n");
    REQUIRE(c.n == 2);
    REQUIRE(c.batch == 4);
    REQUIRE(c.image_size == 32);  // default kept
  }
  SECTION("unknown keys are named in the error") {
    REQUIRE_THROWS_WITH(parse_config("lambda_foo=1\n"), Catch::Contains("lambda_foo"));
  }
  SECTION("malformed values are rejected") {
    REQUIRE_THROWS(parse_config("n=abc\n"));
    REQUIRE_THROWS(parse_config("lr=1e\n"));
    REQUIRE_THROWS(parse_config("just a line\n"));
  }
}

TEST_CASE("checkpoint container round-trips bitwise", "[data]") {
  TempDir dir("ckpt");
  const std::string path = (dir.path / "test.bin").string();

  Tensor t = Tensor::zeros({3, 4});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int64_t i = 0; i < t.numel(); ++i)
    t.data()[i] = static_cast<double>(static_cast<float>(u(rng)));  // on the f32 grid

  BlobMap out;
  out.emplace_back("w", blob_from_tensor(t));
  out.emplace_back("count", blob_from_i64(-77));
  out.emplace_back("note", blob_from_string("hello"));
  write_container(path, out);

  BlobMap in = read_container(path);
  REQUIRE(in.size() == 3);
  Tensor t2 = Tensor::zeros({3, 4});
  tensor_from_blob(require_blob(in, "w"), t2, "w");
  for (int64_t i = 0; i < t.numel(); ++i) REQUIRE(t.data()[i] == t2.data()[i]);
  REQUIRE(i64_from_blob(require_blob(in, "count"), "count") == -77);
  REQUIRE(string_from_blob(require_blob(in, "note")) == "hello");
  REQUIRE(find_blob(in, "absent") == nullptr);
  REQUIRE_THROWS_WITH(require_blob(in, "absent"), Catch::Contains("absent"));

  SECTION("shape mismatch is reported with both shapes") {
    Tensor wrong = Tensor::zeros({4, 3});
    REQUIRE_THROWS_AS(tensor_from_blob(require_blob(in, "w"), wrong, "w"), shape_error);
  }
  SECTION("corrupted magic") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
    f.close();
    REQUIRE_THROWS_WITH(read_container(path), Catch::Contains("bad magic"));
  }
  SECTION("version mismatch") {
    REQUIRE_THROWS_WITH(read_container(path, kCheckpointVersion + 1),
                        Catch::Contains("version"));
  }
  SECTION("truncation") {
    const auto full = fs::file_size(path);
    fs::resize_file(path, full - 5);
    REQUIRE_THROWS_WITH(read_container(path), Catch::Contains("truncated"));
  }
  SECTION("missing file") {
    REQUIRE_THROWS(read_container((dir.path / "nope.bin").string()));
  }
}
