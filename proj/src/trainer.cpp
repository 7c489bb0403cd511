#include "hyperstar/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "hyperstar/config.hpp"
#include "hyperstar/losses.hpp"
#include "hyperstar/ops.hpp"

namespace hyperstar {

namespace {

double scal(const Tensor& t) { return t.data()[0]; }

std::string var_div_name(VarDivisor d) {
  return d == VarDivisor::spatial ? "spatial" : "spatial_x_components";
}

VarDivisor var_div_from_name(const std::string& s) {
  if (s == "spatial") return VarDivisor::spatial;
  if (s == "spatial_x_components") return VarDivisor::spatial_x_components;
  throw value_error("unknown variance divisor '" + s + "'");
}

Blob blob_from_buffer(const std::vector<double>& buf, const Shape& dims) {
  Blob b;
  b.dtype = Blob::kF32;
  b.dims = dims;
  b.payload.resize(buf.size() * 4);
  for (size_t i = 0; i < buf.size(); ++i) {
    const float v = static_cast<float>(buf[i]);
    std::memcpy(b.payload.data() + i * 4, &v, 4);
  }
  return b;
}

void buffer_from_blob(const Blob& b, std::vector<double>& buf, const std::string& name) {
  if (b.dtype != Blob::kF32 || b.payload.size() != buf.size() * 4)
    throw value_error("checkpoint entry " + name + " does not match the current model");
  for (size_t i = 0; i < buf.size(); ++i) {
    float v;
    std::memcpy(&v, b.payload.data() + i * 4, 4);
    buf[i] = static_cast<double>(v);
  }
}

void append_meta(BlobMap& out, const TrainConfig& cfg) {
  out.emplace_back("config", blob_from_string(serialize_config(cfg)));
  out.emplace_back("meta.init_a", blob_from_string(to_string(cfg.a_scheme)));
  out.emplace_back("meta.freeze_a", blob_from_i64(cfg.freeze_a ? 1 : 0));
  out.emplace_back("meta.var_div", blob_from_string(var_div_name(cfg.var_div)));
}

void append_params(BlobMap& out, std::vector<Param> state) {
  for (const Param& p : state)
    out.emplace_back("param." + p.name, blob_from_tensor(p.value));
}

void restore_params(const BlobMap& in, std::vector<Param> state) {
  for (Param& p : state)
    tensor_from_blob(require_blob(in, "param." + p.name), p.value, p.name);
}

}  // namespace

std::string loss_csv_header() { return "iter,phase,adv_d,adv_g,sty,ds,cyc,lambda_ds\n"; }

std::string loss_csv_row(const LossRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%lld,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                static_cast<long long>(r.iter), r.phase.c_str(), r.adv_d, r.adv_g, r.sty,
                r.ds, r.cyc, r.lambda_ds);
  return buf;
}

Trainer::Trainer(const TrainConfig& cfg, const Dataset& data)
    : cfg_(cfg), data_(&data), bundle_(std::make_unique<ModelBundle>(cfg)) {
  if (data.num_domains != cfg.num_domains)
    throw value_error("dataset has " + std::to_string(data.num_domains) +
                      " domains but the config expects " + std::to_string(cfg.num_domains));
  if (data.image_size != cfg.image_size)
    throw value_error("dataset images are " + std::to_string(data.image_size) +
                      "px but the config expects " + std::to_string(cfg.image_size));
  opt_g_ = Adam(bundle_->g_params(), cfg.lr, cfg.adam_beta1, cfg.adam_beta2);
  opt_m_ = Adam(bundle_->m_params(), cfg.lr_mapping, cfg.adam_beta1, cfg.adam_beta2);
  opt_s_ = Adam(bundle_->s_params(), cfg.lr, cfg.adam_beta1, cfg.adam_beta2);
  opt_d_ = Adam(bundle_->d_params(), cfg.lr, cfg.adam_beta1, cfg.adam_beta2);
  // Distinct stream from the weight-init RNG, which also starts at cfg.seed.
  rng_.seed(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
}

Batch Trainer::sample_batch() {
  const int b = cfg_.batch;
  std::uniform_int_distribution<int64_t> pick_img(0, data_->size() - 1);
  std::uniform_int_distribution<int> pick_dom(0, cfg_.num_domains - 1);

  std::vector<int64_t> src(b);
  Batch out;
  out.y_src.resize(b);
  out.y_trg.resize(b);
  for (int i = 0; i < b; ++i) {
    src[i] = pick_img(rng_);
    out.y_src[i] = static_cast<int>(data_->labels[static_cast<size_t>(src[i])]);
  }
  for (int i = 0; i < b; ++i) out.y_trg[i] = pick_dom(rng_);
  std::vector<int64_t> ref1(b), ref2(b);
  for (int i = 0; i < b; ++i) {
    const auto& pool = data_->by_domain[static_cast<size_t>(out.y_trg[i])];
    std::uniform_int_distribution<size_t> pick_ref(0, pool.size() - 1);
    ref1[i] = pool[pick_ref(rng_)];
    ref2[i] = pool[pick_ref(rng_)];
  }
  out.x = stack_images(*data_, src);
  out.x_ref = stack_images(*data_, ref1);
  out.x_ref2 = stack_images(*data_, ref2);
  return out;
}

std::vector<LossRow> Trainer::step() {
  const int64_t it = iter_ + 1;
  const double lds = lambda_ds_at(cfg_, it);
  Batch batch = sample_batch();

  const Tensor x = to_model_channels(batch.x, cfg_.n);
  const Tensor x_ref = to_model_channels(batch.x_ref, cfg_.n);
  const Tensor x_ref2 = to_model_channels(batch.x_ref2, cfg_.n);
  const Tensor oh_src = one_hot(batch.y_src, cfg_.num_domains);
  const Tensor oh_trg = one_hot(batch.y_trg, cfg_.num_domains);

  Tensor z = Tensor::zeros({cfg_.batch, cfg_.latent_dim});
  Tensor z2 = Tensor::zeros({cfg_.batch, cfg_.latent_dim});
  {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int64_t i = 0; i < z.numel(); ++i) z.data()[i] = gauss(rng_);
    for (int64_t i = 0; i < z2.numel(); ++i) z2.data()[i] = gauss(rng_);
  }

  auto zero_all = [&] {
    opt_g_.zero_grad();
    opt_m_.zero_grad();
    opt_s_.zero_grad();
    opt_d_.zero_grad();
    Graph::get().clear();
  };

  auto run_phase = [&](bool latent) {
    LossRow row;
    row.iter = it;
    row.phase = latent ? "latent" : "reference";
    row.lambda_ds = lds;

    auto style1 = [&] {
      return latent ? bundle_->m.forward(z, oh_trg) : bundle_->s.forward(x_ref, oh_trg);
    };
    auto style2 = [&] {
      return latent ? bundle_->m.forward(z2, oh_trg) : bundle_->s.forward(x_ref2, oh_trg);
    };

    {  // Discriminator update: fakes are generated outside the tape.
      Tensor fake;
      {
        NoGrad ng;
        fake = bundle_->g.forward(x, style1());
      }
      const Tensor d_loss =
          adversarial_loss_d(bundle_->d.forward(x, oh_src), bundle_->d.forward(fake, oh_trg));
      row.adv_d = scal(d_loss);
      d_loss.backward();
      opt_d_.step();
      zero_all();
    }

    {  // Generator-side update.
      const Tensor s1 = style1();
      const Tensor fake1 = bundle_->g.forward(x, s1);
      const Tensor adv_g = adversarial_loss_g(bundle_->d.forward(fake1, oh_trg));
      const Tensor sty = style_reconstruction_loss(s1, bundle_->s.forward(fake1, oh_trg));
      Tensor fake2;
      {
        NoGrad ng;
        fake2 = bundle_->g.forward(x, style2());
      }
      const Tensor ds =
          diversification_loss(image_content(fake1, cfg_.n), image_content(fake2, cfg_.n));
      const Tensor s_org = bundle_->s.forward(x, oh_src);
      const Tensor rec = bundle_->g.forward(fake1, s_org);
      const Tensor cyc = cycle_loss(image_content(x, cfg_.n), image_content(rec, cfg_.n));

      Tensor total = add(adv_g, scalar_mul(sty, cfg_.lambda_sty));
      total = sub(total, scalar_mul(ds, lds));
      total = add(total, scalar_mul(cyc, cfg_.lambda_cyc));
      row.adv_g = scal(adv_g);
      row.sty = scal(sty);
      row.ds = scal(ds);
      row.cyc = scal(cyc);
      total.backward();
      opt_g_.step();
      if (latent) opt_m_.step();
      opt_s_.step();
      zero_all();
    }
    check_finite(row);
    return row;
  };

  std::vector<LossRow> rows;
  rows.push_back(run_phase(true));
  rows.push_back(run_phase(false));
  ++iter_;
  return rows;
}

void Trainer::check_finite(const LossRow& r) const {
  const double vals[] = {r.adv_d, r.adv_g, r.sty, r.ds, r.cyc};
  for (double v : vals)
    if (!std::isfinite(v))
      throw numeric_error("non-finite loss at iteration " + std::to_string(r.iter) + " (" +
                          r.phase + " phase): adv_d=" + std::to_string(r.adv_d) +
                          " adv_g=" + std::to_string(r.adv_g) + " sty=" + std::to_string(r.sty) +
                          " ds=" + std::to_string(r.ds) + " cyc=" + std::to_string(r.cyc));
}

void Trainer::save(const std::string& path) {
  BlobMap out;
  append_meta(out, cfg_);
  out.emplace_back("iter", blob_from_i64(iter_));
  {
    std::ostringstream ss;
    ss << rng_;
    out.emplace_back("rng.trainer", blob_from_string(ss.str()));
  }
  append_params(out, bundle_->all_state());
  const char* names[] = {"g", "m", "s", "d"};
  Adam* opts[] = {&opt_g_, &opt_m_, &opt_s_, &opt_d_};
  for (int k = 0; k < 4; ++k) {
    const std::string base = std::string("opt.") + names[k] + ".";
    out.emplace_back(base + "step", blob_from_i64(opts[k]->step_count()));
    const auto& ps = opts[k]->params();
    for (size_t i = 0; i < ps.size(); ++i) {
      out.emplace_back(base + "m." + ps[i].name,
                       blob_from_buffer(opts[k]->m(i), ps[i].value.shape()));
      out.emplace_back(base + "v." + ps[i].name,
                       blob_from_buffer(opts[k]->v(i), ps[i].value.shape()));
    }
  }
  write_container(path, out);
}

void Trainer::load(const std::string& path) {
  const BlobMap in = read_container(path);

  const TrainConfig saved = parse_config(string_from_blob(require_blob(in, "config")));
  if (serialize_config(saved) != serialize_config(cfg_))
    throw value_error("checkpoint " + path + " was written with a different configuration");
  if (string_from_blob(require_blob(in, "meta.init_a")) != to_string(cfg_.a_scheme) ||
      i64_from_blob(require_blob(in, "meta.freeze_a"), "meta.freeze_a") !=
          (cfg_.freeze_a ? 1 : 0) ||
      string_from_blob(require_blob(in, "meta.var_div")) != var_div_name(cfg_.var_div))
    throw value_error("checkpoint " + path + " was built with different model switches");

  iter_ = i64_from_blob(require_blob(in, "iter"), "iter");
  {
    std::istringstream ss(string_from_blob(require_blob(in, "rng.trainer")));
    ss >> rng_;
    if (!ss) throw value_error("checkpoint " + path + " holds an unreadable RNG state");
  }
  restore_params(in, bundle_->all_state());
  const char* names[] = {"g", "m", "s", "d"};
  Adam* opts[] = {&opt_g_, &opt_m_, &opt_s_, &opt_d_};
  for (int k = 0; k < 4; ++k) {
    const std::string base = std::string("opt.") + names[k] + ".";
    opts[k]->set_step_count(i64_from_blob(require_blob(in, base + "step"), base + "step"));
    const auto& ps = opts[k]->params();
    for (size_t i = 0; i < ps.size(); ++i) {
      buffer_from_blob(require_blob(in, base + "m." + ps[i].name), opts[k]->m(i),
                       base + "m." + ps[i].name);
      buffer_from_blob(require_blob(in, base + "v." + ps[i].name), opts[k]->v(i),
                       base + "v." + ps[i].name);
    }
  }
}

int64_t save_model(const ModelBundle& bundle, const std::string& path) {
  BlobMap out;
  append_meta(out, bundle.cfg);
  append_params(out, const_cast<ModelBundle&>(bundle).all_state());
  write_container(path, out);
  return static_cast<int64_t>(std::filesystem::file_size(path));
}

std::unique_ptr<ModelBundle> load_model(const std::string& path) {
  const BlobMap in = read_container(path);
  TrainConfig cfg = parse_config(string_from_blob(require_blob(in, "config")));
  cfg.a_scheme = a_scheme_from_string(string_from_blob(require_blob(in, "meta.init_a")));
  cfg.freeze_a = i64_from_blob(require_blob(in, "meta.freeze_a"), "meta.freeze_a") != 0;
  cfg.var_div = var_div_from_name(string_from_blob(require_blob(in, "meta.var_div")));
  auto bundle = std::make_unique<ModelBundle>(cfg);
  restore_params(in, bundle->all_state());
  return bundle;
}

}  // namespace hyperstar
