#include "hyperstar/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hyperstar {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int64_t parse_int(const std::string& key, const std::string& v) {
  size_t used = 0;
  int64_t out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw value_error("config key " + key + ": expected an integer, got '" + v + "'");
  }
  if (used != v.size())
    throw value_error("config key " + key + ": expected an integer, got '" + v + "'");
  return out;
}

double parse_float(const std::string& key, const std::string& v) {
  size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw value_error("config key " + key + ": expected a number, got '" + v + "'");
  }
  if (used != v.size())
    throw value_error("config key " + key + ": expected a number, got '" + v + "'");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TrainConfig parse_config(const std::string& text) {
  TrainConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw value_error("config line " + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw value_error("config line " + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");

    if (key == "n") cfg.n = static_cast<int>(parse_int(key, val));
    else if (key == "image_size") cfg.image_size = static_cast<int>(parse_int(key, val));
    else if (key == "channels_base") cfg.channels_base = parse_int(key, val);
    else if (key == "channels_max") cfg.channels_max = parse_int(key, val);
    else if (key == "num_domains") cfg.num_domains = static_cast<int>(parse_int(key, val));
    else if (key == "latent_dim") cfg.latent_dim = parse_int(key, val);
    else if (key == "style_dim") cfg.style_dim = parse_int(key, val);
    else if (key == "batch") cfg.batch = static_cast<int>(parse_int(key, val));
    else if (key == "lambda_sty") cfg.lambda_sty = parse_float(key, val);
    else if (key == "lambda_cyc") cfg.lambda_cyc = parse_float(key, val);
    else if (key == "lambda_ds_init") cfg.lambda_ds_init = parse_float(key, val);
    else if (key == "total_iters") cfg.total_iters = parse_int(key, val);
    else if (key == "lr") cfg.lr = parse_float(key, val);
    else if (key == "lr_mapping") cfg.lr_mapping = parse_float(key, val);
    else if (key == "adam_beta1") cfg.adam_beta1 = parse_float(key, val);
    else if (key == "adam_beta2") cfg.adam_beta2 = parse_float(key, val);
    else if (key == "seed") cfg.seed = static_cast<uint64_t>(parse_int(key, val));
    else
      throw value_error("unknown config key '" + key + "' on line " +
                        std::to_string(lineno));
  }
  return cfg;
}

TrainConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw value_error("cannot open config file " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "n=" << cfg.n << "\n"
      << "image_size=" << cfg.image_size << "\n"
      << "channels_base=" << cfg.channels_base << "\n"
      << "channels_max=" << cfg.channels_max << "\n"
      << "num_domains=" << cfg.num_domains << "\n"
      << "latent_dim=" << cfg.latent_dim << "\n"
      << "style_dim=" << cfg.style_dim << "\n"
      << "batch=" << cfg.batch << "\n"
      << "lambda_sty=" << fmt(cfg.lambda_sty) << "\n"
      << "lambda_cyc=" << fmt(cfg.lambda_cyc) << "\n"
      << "lambda_ds_init=" << fmt(cfg.lambda_ds_init) << "\n"
      << "total_iters=" << cfg.total_iters << "\n"
      << "lr=" << fmt(cfg.lr) << "\n"
      << "lr_mapping=" << fmt(cfg.lr_mapping) << "\n"
      << "adam_beta1=" << fmt(cfg.adam_beta1) << "\n"
      << "adam_beta2=" << fmt(cfg.adam_beta2) << "\n"
      << "seed=" << cfg.seed << "\n";
  return out.str();
}

}  // namespace hyperstar
