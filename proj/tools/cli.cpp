#include <getopt.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "hyperstar/algebra.hpp"
#include "hyperstar/checkpoint.hpp"
#include "hyperstar/config.hpp"
#include "hyperstar/dataset.hpp"
#include "hyperstar/image.hpp"
#include "hyperstar/losses.hpp"
#include "hyperstar/norm.hpp"
#include "hyperstar/ops.hpp"
#include "hyperstar/trainer.hpp"
#include "grad_suite.hpp"

namespace fs = std::filesystem;
using namespace hyperstar;

namespace {

constexpr const char* kUsage =
    "usage: hyperstar <verb> [flags]\n"
    "\n"
    "verbs:\n"
    "  train         --out DIR (--data DIR | --synthetic[=COUNT]) [--config FILE]\n"
    "                [--seed S] [--iters N] [--n N] [--sample-every K]\n"
    "                [--checkpoint-every K] [--init-a SCHEME] [--freeze-a]\n"
    "  translate     --checkpoint FILE --source PNG --domain D --out DIR\n"
    "                (--latent SEED | --reference PNG)\n"
    "  report-params [--config FILE] [--full-preset] [--n N]\n"
    "  grad-check    [--scope layer|network|all] [--inject-fault]\n"
    "  init-hist     --out DIR [--schemes A,B,...] [--shape OxI|OxIxKxK]\n"
    "                [--bins B] [--seed S]\n"
    "  synth-data    --out DIR [--domains K] [--size S] [--count N] [--seed S]\n"
    "\n"
    "exit codes: 0 ok, 2 configuration error, 3 data error, 4 non-finite loss\n";

struct Flags {
  std::string verb;
  std::string config, data, out, checkpoint, source, reference, scope = "all";
  std::string init_a, schemes, shape;
  bool synthetic = false, freeze_a = false, inject_fault = false, full_preset = false;
  bool have_latent = false, have_seed = false;
  int64_t synthetic_count = 64;
  uint64_t seed = 0, latent_seed = 0;
  int64_t iters = -1, n = -1, sample_every = -1, checkpoint_every = -1;
  int64_t domain = -1, bins = 64, domains = 2, size = 32, count = 64;
};

int64_t parse_i64(const char* flag, const char* s) {
  size_t used = 0;
  int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != std::strlen(s))
    throw value_error(std::string(flag) + " expects an integer, got '" + s + "'");
  return v;
}

uint64_t parse_u64(const char* flag, const char* s) {
  size_t used = 0;
  uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != std::strlen(s))
    throw value_error(std::string(flag) + " expects an unsigned integer, got '" + s + "'");
  return v;
}

bool parse_flags(int argc, char** argv, Flags& fl) {
  static const option longopts[] = {
      {"config", required_argument, nullptr, 1},
      {"data", required_argument, nullptr, 2},
      {"synthetic", optional_argument, nullptr, 3},
      {"out", required_argument, nullptr, 4},
      {"seed", required_argument, nullptr, 5},
      {"iters", required_argument, nullptr, 6},
      {"n", required_argument, nullptr, 7},
      {"sample-every", required_argument, nullptr, 8},
      {"checkpoint-every", required_argument, nullptr, 9},
      {"init-a", required_argument, nullptr, 10},
      {"freeze-a", no_argument, nullptr, 11},
      {"checkpoint", required_argument, nullptr, 12},
      {"source", required_argument, nullptr, 13},
      {"latent", required_argument, nullptr, 14},
      {"reference", required_argument, nullptr, 15},
      {"domain", required_argument, nullptr, 16},
      {"scope", required_argument, nullptr, 17},
      {"inject-fault", no_argument, nullptr, 18},
      {"schemes", required_argument, nullptr, 19},
      {"shape", required_argument, nullptr, 20},
      {"bins", required_argument, nullptr, 21},
      {"domains", required_argument, nullptr, 22},
      {"size", required_argument, nullptr, 23},
      {"count", required_argument, nullptr, 24},
      {"full-preset", no_argument, nullptr, 25},
      {nullptr, 0, nullptr, 0},
  };

  fl.verb = argv[1];
  optind = 1;
  int c;
  // argv[1] (the verb) stands in as the program name for getopt
  while ((c = getopt_long(argc - 1, argv + 1, "", longopts, nullptr)) != -1) {
    switch (c) {
      case 1: fl.config = optarg; break;
      case 2: fl.data = optarg; break;
      case 3:
        fl.synthetic = true;
        if (optarg) fl.synthetic_count = parse_i64("--synthetic", optarg);
        break;
      case 4: fl.out = optarg; break;
      case 5: fl.seed = parse_u64("--seed", optarg); fl.have_seed = true; break;
      case 6: fl.iters = parse_i64("--iters", optarg); break;
      case 7: fl.n = parse_i64("--n", optarg); break;
      case 8: fl.sample_every = parse_i64("--sample-every", optarg); break;
      case 9: fl.checkpoint_every = parse_i64("--checkpoint-every", optarg); break;
      case 10: fl.init_a = optarg; break;
      case 11: fl.freeze_a = true; break;
      case 12: fl.checkpoint = optarg; break;
      case 13: fl.source = optarg; break;
      case 14: fl.latent_seed = parse_u64("--latent", optarg); fl.have_latent = true; break;
      case 15: fl.reference = optarg; break;
      case 16: fl.domain = parse_i64("--domain", optarg); break;
      case 17: fl.scope = optarg; break;
      case 18: fl.inject_fault = true; break;
      case 19: fl.schemes = optarg; break;
      case 20: fl.shape = optarg; break;
      case 21: fl.bins = parse_i64("--bins", optarg); break;
      case 22: fl.domains = parse_i64("--domains", optarg); break;
      case 23: fl.size = parse_i64("--size", optarg); break;
      case 24: fl.count = parse_i64("--count", optarg); break;
      case 25: fl.full_preset = true; break;
      default: return false;  // getopt already printed the complaint
    }
  }
  if (optind < argc - 1) {
    std::fprintf(stderr, "unexpected argument '%s'\n", argv[optind + 1]);
    return false;
  }
  return true;
}

// Shared config assembly: file, then command-line overrides, then validation.
TrainConfig make_config(const Flags& fl) {
  TrainConfig cfg;
  if (fl.full_preset) cfg = TrainConfig::full_preset(fl.n > 0 ? static_cast<int>(fl.n) : 4);
  if (!fl.config.empty()) cfg = load_config_file(fl.config);
  if (fl.n > 0) cfg.n = static_cast<int>(fl.n);
  if (fl.iters >= 0) cfg.total_iters = fl.iters;
  if (fl.have_seed) cfg.seed = fl.seed;
  if (!fl.init_a.empty()) cfg.a_scheme = a_scheme_from_string(fl.init_a);
  if (fl.freeze_a) cfg.freeze_a = true;
  cfg.validate();
  return cfg;
}

Tensor repeat_rows(const Tensor& row, int64_t times) {
  const int64_t w = row.size(1);
  Tensor out = Tensor::zeros({times, w});
  for (int64_t r = 0; r < times; ++r)
    std::memcpy(out.data() + r * w, row.data(), sizeof(double) * static_cast<size_t>(w));
  return out;
}

ImageU8 grid_tile(const Tensor& batch, int64_t row, int64_t n) {
  Tensor one = narrow(batch, 0, row, 1);
  Tensor rgb = to_rgb_channels(one, n);
  return tensor_to_image(reshape(rgb, {3, rgb.size(2), rgb.size(3)}));
}

// 4 source rows; columns: the source, then four latent-guided translations,
// then four reference-guided ones, all toward one target domain.
void write_sample_grid(ModelBundle& bundle, const Dataset& ds, uint64_t seed,
                       const std::string& path) {
  NoGrad ng;
  const TrainConfig& cfg = bundle.cfg;
  const int rows = 4, styles = 4;
  std::vector<int64_t> src;
  for (int i = 0; i < rows; ++i) {
    const auto& pool = ds.by_domain[i % ds.num_domains];
    src.push_back(pool[(i / ds.num_domains) % pool.size()]);
  }
  const int trg = 1 % cfg.num_domains;
  Tensor x = to_model_channels(stack_images(ds, src), cfg.n);
  Tensor oh = one_hot(std::vector<int>(rows, trg), cfg.num_domains);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<Tensor> lat(styles), ref(styles);
  for (int c = 0; c < styles; ++c) {
    Tensor z = Tensor::zeros({1, cfg.latent_dim});
    for (int64_t k = 0; k < cfg.latent_dim; ++k) z.data()[k] = nd(rng);
    lat[c] = bundle.g.forward(x, bundle.m.forward(repeat_rows(z, rows), oh));
  }
  const auto& pool = ds.by_domain[trg];
  for (int c = 0; c < styles; ++c) {
    Tensor rimg = to_model_channels(stack_images(ds, {pool[c % pool.size()]}), cfg.n);
    Tensor s = bundle.s.forward(rimg, one_hot({trg}, cfg.num_domains));
    ref[c] = bundle.g.forward(x, repeat_rows(s, rows));
  }

  std::vector<ImageU8> tiles;
  for (int r = 0; r < rows; ++r) {
    tiles.push_back(grid_tile(x, r, cfg.n));
    for (int c = 0; c < styles; ++c) tiles.push_back(grid_tile(lat[c], r, cfg.n));
    for (int c = 0; c < styles; ++c) tiles.push_back(grid_tile(ref[c], r, cfg.n));
  }
  write_png(path, tile_grid(tiles, 1 + 2 * styles));
}

char pathbuf[512];

const char* numbered(const std::string& dir, const char* stem, int64_t i, const char* ext) {
  std::snprintf(pathbuf, sizeof pathbuf, "%s/%s_%06lld.%s", dir.c_str(), stem,
                static_cast<long long>(i), ext);
  return pathbuf;
}

int cmd_train(const Flags& fl) {
  TrainConfig cfg;
  try {
    if (fl.out.empty()) throw value_error("train needs --out");
    if (fl.synthetic == !fl.data.empty())
      throw value_error("train needs exactly one of --data or --synthetic");
    cfg = make_config(fl);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  Dataset data;
  try {
    data = fl.synthetic ? generate_synthetic_dataset(cfg.num_domains, cfg.image_size,
                                                     fl.synthetic_count, cfg.seed)
                        : load_image_folder(fl.data, cfg.image_size);
    if (data.num_domains != cfg.num_domains)
      throw value_error("dataset has " + std::to_string(data.num_domains) +
                        " domains but the config says " + std::to_string(cfg.num_domains));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  }

  const int64_t sample_every =
      fl.sample_every >= 0 ? fl.sample_every : std::max<int64_t>(1, cfg.total_iters / 4);
  const int64_t ckpt_every =
      fl.checkpoint_every >= 0 ? fl.checkpoint_every : std::max<int64_t>(1, cfg.total_iters / 4);

  try {
    fs::create_directories(fl.out);
    Trainer trainer(cfg, data);
    std::ofstream csv(fl.out + "/loss.csv");
    csv << loss_csv_header();
    while (trainer.iter() < cfg.total_iters) {
      for (const auto& row : trainer.step()) csv << loss_csv_row(row);
      csv.flush();
      const int64_t it = trainer.iter();
      if (sample_every > 0 && it % sample_every == 0)
        write_sample_grid(trainer.bundle(), data, cfg.seed ^ static_cast<uint64_t>(it),
                          numbered(fl.out, "samples", it, "png"));
      if (ckpt_every > 0 && it % ckpt_every == 0 && it < cfg.total_iters)
        trainer.save(numbered(fl.out, "checkpoint", it, "bin"));
      if (it % 100 == 0 || it == cfg.total_iters)
        std::fprintf(stderr, "iter %lld/%lld\n", static_cast<long long>(it),
                     static_cast<long long>(cfg.total_iters));
    }
    trainer.save(fl.out + "/checkpoint_final.bin");
    save_model(trainer.bundle(), fl.out + "/model_final.bin");
    std::printf("trained %lld iterations; outputs in %s\n",
                static_cast<long long>(cfg.total_iters), fl.out.c_str());
    return 0;
  } catch (const numeric_error& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_translate(const Flags& fl) {
  try {
    if (fl.checkpoint.empty() || fl.source.empty() || fl.out.empty() || fl.domain < 0)
      throw value_error("translate needs --checkpoint, --source, --domain and --out");
    if (fl.have_latent == !fl.reference.empty())
      throw value_error("translate needs exactly one of --latent or --reference");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  std::unique_ptr<ModelBundle> bundle;
  Tensor x, ref;
  try {
    bundle = load_model(fl.checkpoint);
    const TrainConfig& cfg = bundle->cfg;
    ImageU8 img = read_png(fl.source);
    if (img.width != cfg.image_size || img.height != cfg.image_size)
      throw value_error("source image is " + std::to_string(img.width) + "x" +
                        std::to_string(img.height) + " but the checkpoint was built for " +
                        std::to_string(cfg.image_size) + "x" + std::to_string(cfg.image_size));
    x = reshape(image_to_tensor(img), {1, 3, cfg.image_size, cfg.image_size});
    if (!fl.reference.empty()) {
      ImageU8 r = read_png(fl.reference);
      if (r.width != cfg.image_size || r.height != cfg.image_size)
        throw value_error("reference image is " + std::to_string(r.width) + "x" +
                          std::to_string(r.height) + " but the checkpoint was built for " +
                          std::to_string(cfg.image_size) + "x" +
                          std::to_string(cfg.image_size));
      ref = reshape(image_to_tensor(r), {1, 3, cfg.image_size, cfg.image_size});
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  }

  const TrainConfig& cfg = bundle->cfg;
  if (fl.domain >= cfg.num_domains) {
    std::fprintf(stderr, "config error: domain %lld out of range, checkpoint has %d domains\n",
                 static_cast<long long>(fl.domain), cfg.num_domains);
    return 2;
  }

  try {
    NoGrad ng;
    Tensor oh = one_hot({static_cast<int>(fl.domain)}, cfg.num_domains);
    Tensor style;
    if (fl.have_latent) {
      std::mt19937_64 rng(fl.latent_seed);
      std::normal_distribution<double> nd(0.0, 1.0);
      Tensor z = Tensor::zeros({1, cfg.latent_dim});
      for (int64_t k = 0; k < cfg.latent_dim; ++k) z.data()[k] = nd(rng);
      style = bundle->m.forward(z, oh);
    } else {
      style = bundle->s.forward(to_model_channels(ref, cfg.n), oh);
    }
    Tensor y = bundle->g.forward(to_model_channels(x, cfg.n), style);
    Tensor rgb = to_rgb_channels(y, cfg.n);
    fs::create_directories(fl.out);
    const std::string path = fl.out + "/translated.png";
    write_png(path, tensor_to_image(reshape(rgb, {3, cfg.image_size, cfg.image_size})));
    std::printf("wrote %s\n", path.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_report_params(const Flags& fl) {
  TrainConfig cfg;
  try {
    cfg = make_config(fl);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  try {
    ModelBundle bundle(cfg);
    TrainConfig real = cfg;
    real.n = 1;
    ModelBundle baseline(real);

    const char* names[] = {"generator", "mapping", "style_encoder", "discriminator"};
    std::vector<Param> groups[] = {bundle.g_params(), bundle.m_params(), bundle.s_params(),
                                   bundle.d_params()};
    std::vector<Param> base_groups[] = {baseline.g_params(), baseline.m_params(),
                                        baseline.s_params(), baseline.d_params()};
    std::printf("n=%d image_size=%d channels=%lld..%lld domains=%d\n\n", cfg.n, cfg.image_size,
                static_cast<long long>(cfg.channels_base),
                static_cast<long long>(cfg.channels_max), cfg.num_domains);
    std::printf("%-15s %12s %14s %12s\n", "network", "params", "bytes(f32)", "savings");
    int64_t total = 0, base_total = 0;
    for (int i = 0; i < 4; ++i) {
      const ParamCount pc = count_params(groups[i]);
      const ParamCount bc = count_params(base_groups[i]);
      total += pc.trainable;
      base_total += bc.trainable;
      const double sav = 100.0 * (1.0 - static_cast<double>(pc.trainable) /
                                            static_cast<double>(bc.trainable));
      std::printf("%-15s %12lld %14lld %11.1f%%\n", names[i],
                  static_cast<long long>(pc.trainable),
                  static_cast<long long>(pc.bytes_at_32bit), sav);
    }
    const double sav =
        100.0 * (1.0 - static_cast<double>(total) / static_cast<double>(base_total));
    std::printf("%-15s %12lld %14lld %11.1f%%\n", "total", static_cast<long long>(total),
                static_cast<long long>(4 * total), sav);
    std::printf("\nsavings compare against the n=1 build of the same topology\n");
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_grad_check(const Flags& fl) {
  using gradsuite::CheckResult;
  if (fl.scope != "layer" && fl.scope != "network" && fl.scope != "all") {
    std::fprintf(stderr, "config error: --scope must be layer, network or all\n");
    return 2;
  }
  if (fl.inject_fault) testing::set_backward_fault(true);

  bool ok = true;
  auto report = [&](const std::vector<CheckResult>& results, double bound) {
    for (const auto& r : results) {
      const bool pass = r.max_rel < bound;
      ok = ok && pass;
      std::printf("%-32s %10.3e  %s\n", r.name.c_str(), r.max_rel, pass ? "ok" : "FAIL");
    }
  };
  if (fl.scope != "network") report(gradsuite::layer_suite(), 1e-4);
  if (fl.scope != "layer") report(gradsuite::network_suite(), 1e-3);
  testing::set_backward_fault(false);
  std::printf("%s\n", ok ? "all gradients verified" : "gradient check FAILED");
  return ok ? 0 : 1;
}

// --- initialization histograms ----------------------------------------------

std::vector<int64_t> parse_shape(const std::string& s) {
  std::vector<int64_t> dims;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t next = s.find('x', pos);
    if (next == std::string::npos) next = s.size();
    dims.push_back(parse_i64("--shape", s.substr(pos, next - pos).c_str()));
    pos = next + 1;
  }
  if (dims.size() != 2 && dims.size() != 4)
    throw value_error("--shape expects OxI or OxIxKxK");
  for (int64_t d : dims)
    if (d < 1) throw value_error("--shape dimensions must be positive");
  return dims;
}

Tensor synth_h(const std::string& scheme, const std::vector<int64_t>& dims,
               std::mt19937_64& rng) {
  const int64_t O = dims[0], I = dims[1];
  const int64_t ksq = dims.size() == 4 ? dims[2] * dims[3] : 1;
  if (scheme == "real_xavier") {
    Tensor t = Tensor::zeros(Shape(dims.begin(), dims.end()));
    fill_xavier_normal(t, I * ksq, O * ksq, rng);
    return t;
  }
  const int n = 4;
  if (O % n != 0 || I % n != 0)
    throw value_error("--shape " + std::to_string(O) + "x" + std::to_string(I) +
                      ": synthesized-weight schemes need both divisible by 4");
  Tensor a = Tensor::zeros({n, n, n});
  init_A(a, n, a_scheme_from_string(scheme), rng);
  if (dims.size() == 2) {
    Tensor f = Tensor::zeros({n, O / n, I / n});
    fill_xavier_normal(f, I, O, rng);
    return ph_compose_matrix(a, f);
  }
  Tensor f = Tensor::zeros({n, O / n, I / n, dims[2], dims[3]});
  fill_xavier_normal(f, I * ksq, O * ksq, rng);
  return ph_compose_conv(a, f);
}

int cmd_init_hist(const Flags& fl) {
  std::vector<std::string> schemes;
  std::vector<int64_t> dims;
  try {
    if (fl.out.empty()) throw value_error("init-hist needs --out");
    if (fl.bins < 2) throw value_error("--bins must be at least 2");
    std::string list =
        fl.schemes.empty() ? "real_xavier,xavier,quat_pattern,rand_integer" : fl.schemes;
    size_t pos = 0;
    while (pos <= list.size()) {
      size_t next = list.find(',', pos);
      if (next == std::string::npos) next = list.size();
      const std::string name = list.substr(pos, next - pos);
      if (name != "real_xavier") a_scheme_from_string(name);  // validates
      schemes.push_back(name);
      pos = next + 1;
    }
    dims = parse_shape(fl.shape.empty() ? "256x256" : fl.shape);
    for (const auto& s : schemes)
      if (s != "real_xavier" && (dims[0] % 4 != 0 || dims[1] % 4 != 0))
        throw value_error("--shape " + std::to_string(dims[0]) + "x" + std::to_string(dims[1]) +
                          ": synthesized-weight schemes need both divisible by 4");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  try {
    std::mt19937_64 rng(fl.seed);
    std::vector<Tensor> weights;
    for (const auto& s : schemes) weights.push_back(synth_h(s, dims, rng));
    std::vector<std::pair<std::string, std::vector<const Tensor*>>> input;
    for (size_t i = 0; i < schemes.size(); ++i) input.push_back({schemes[i], {&weights[i]}});
    DensityReport rep = weight_density_report(input, static_cast<int>(fl.bins));

    fs::create_directories(fl.out);
    const std::string path = fl.out + "/init_hist.csv";
    std::ofstream f(path);
    f << density_report_csv(rep);
    std::printf("%-16s %12s %16s\n", "scheme", "variance", "excess_kurtosis");
    for (const auto& s : rep.stats)
      std::printf("%-16s %12.6g %16.6g\n", s.scheme.c_str(), s.variance, s.excess_kurtosis);
    std::printf("wrote %s\n", path.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_synth_data(const Flags& fl) {
  Dataset ds;
  try {
    if (fl.out.empty()) throw value_error("synth-data needs --out");
    ds = generate_synthetic_dataset(fl.domains, fl.size, fl.count, fl.seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  try {
    for (int64_t d = 0; d < ds.num_domains; ++d)
      fs::create_directories(fl.out + "/domain" + std::to_string(d));
    std::vector<int64_t> counter(static_cast<size_t>(ds.num_domains), 0);
    for (int64_t i = 0; i < ds.size(); ++i) {
      const int64_t d = ds.labels[i];
      const std::string dir = fl.out + "/domain" + std::to_string(d);
      write_png(numbered(dir, "img", counter[d]++, "png"), tensor_to_image(ds.images[i]));
    }
    std::printf("wrote %lld images across %lld domains under %s\n",
                static_cast<long long>(ds.size()), static_cast<long long>(ds.num_domains),
                fl.out.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fputs(kUsage, stderr);
    return 2;
  }
  Flags fl;
  try {
    if (!parse_flags(argc, argv, fl)) return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  if (fl.verb == "train") return cmd_train(fl);
  if (fl.verb == "translate") return cmd_translate(fl);
  if (fl.verb == "report-params") return cmd_report_params(fl);
  if (fl.verb == "grad-check") return cmd_grad_check(fl);
  if (fl.verb == "init-hist") return cmd_init_hist(fl);
  if (fl.verb == "synth-data") return cmd_synth_data(fl);
  std::fprintf(stderr, "unknown verb '%s'\n\n%s", fl.verb.c_str(), kUsage);
  return 2;
}
