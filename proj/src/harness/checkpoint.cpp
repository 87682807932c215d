#include "catrl/harness/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace catrl::harness {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'T', 'R', 'L', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_i64(std::ostream& out, std::int64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_vec(std::ostream& out, const VectorXd& v) {
  write_i64(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void write_layers(std::ostream& out, const std::vector<int>& sizes) {
  write_u32(out, static_cast<std::uint32_t>(sizes.size()));
  for (int s : sizes) write_u32(out, static_cast<std::uint32_t>(s));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

std::int64_t read_i64(std::istream& in) {
  std::int64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

VectorXd read_vec(std::istream& in) {
  const std::int64_t n = read_i64(in);
  if (n < 0 || n > (1 << 28)) {
    throw ConfigError("checkpoint vector length is implausible");
  }
  VectorXd v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  return v;
}

nn::Activation read_activation(std::istream& in) {
  const std::uint32_t raw = read_u32(in);
  if (raw > 1) {
    throw ConfigError("checkpoint activation id is unknown");
  }
  return static_cast<nn::Activation>(raw);
}

std::vector<int> read_layers(std::istream& in) {
  const std::uint32_t count = read_u32(in);
  if (count < 2 || count > 64) {
    throw ConfigError("checkpoint layer count is implausible");
  }
  std::vector<int> sizes(count);
  for (auto& s : sizes) {
    s = static_cast<int>(read_u32(in));
    if (s < 1 || s > (1 << 20)) {
      throw ConfigError("checkpoint layer size is implausible");
    }
  }
  return sizes;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw TrainingError("cannot open checkpoint file '" + path + "' for writing");
  }
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kVersion);

  write_layers(out, ckpt.net.actor.layer_sizes);
  write_u32(out, static_cast<std::uint32_t>(ckpt.net.actor.activation));
  write_layers(out, ckpt.net.critic.layer_sizes);
  write_u32(out, static_cast<std::uint32_t>(ckpt.net.critic.activation));
  write_f64(out, ckpt.net.log_std_min);
  write_f64(out, ckpt.net.log_std_max);
  write_vec(out, ckpt.net.flatten_params());

  write_vec(out, ckpt.adam.m);
  write_vec(out, ckpt.adam.v);
  write_i64(out, ckpt.adam.step);
  write_f64(out, ckpt.adam.learning_rate);
  write_f64(out, ckpt.adam.beta1);
  write_f64(out, ckpt.adam.beta2);
  write_f64(out, ckpt.adam.epsilon);

  write_vec(out, ckpt.termination.c_max);
  write_f64(out, ckpt.termination.tau_c);
  write_f64(out, ckpt.termination.c_max_floor);
  write_i64(out, ckpt.termination.epoch);

  out.flush();
  if (!out) {
    throw TrainingError("checkpoint write failed for '" + path + "'");
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open checkpoint file '" + path + "'");
  }
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ConfigError("'" + path + "' is not a checkpoint file");
  }
  const std::uint32_t version = read_u32(in);
  if (version != kVersion) {
    throw ConfigError("checkpoint '" + path + "' has unsupported schema version " +
                      std::to_string(version));
  }

  Checkpoint ckpt;
  const auto actor_sizes = read_layers(in);
  const auto actor_act = read_activation(in);
  const auto critic_sizes = read_layers(in);
  const auto critic_act = read_activation(in);
  ckpt.net.actor = nn::make_mlp(actor_sizes, actor_act);
  ckpt.net.critic = nn::make_mlp(critic_sizes, critic_act);
  ckpt.net.log_std_min = read_f64(in);
  ckpt.net.log_std_max = read_f64(in);
  ckpt.net.log_std = VectorXd::Zero(ckpt.net.actor.output_dim());
  const VectorXd flat = read_vec(in);
  if (flat.size() != ckpt.net.parameter_count()) {
    throw ConfigError("checkpoint parameter vector does not match the stored layout");
  }
  ckpt.net.load_flat(flat);

  ckpt.adam.m = read_vec(in);
  ckpt.adam.v = read_vec(in);
  ckpt.adam.step = read_i64(in);
  ckpt.adam.learning_rate = read_f64(in);
  ckpt.adam.beta1 = read_f64(in);
  ckpt.adam.beta2 = read_f64(in);
  ckpt.adam.epsilon = read_f64(in);

  ckpt.termination.c_max = read_vec(in);
  ckpt.termination.tau_c = read_f64(in);
  ckpt.termination.c_max_floor = read_f64(in);
  ckpt.termination.epoch = static_cast<int>(read_i64(in));

  if (!in) {
    throw ConfigError("checkpoint '" + path + "' is truncated");
  }
  return ckpt;
}

}  // namespace catrl::harness
