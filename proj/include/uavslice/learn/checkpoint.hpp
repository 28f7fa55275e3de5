#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "uavslice/errors.hpp"
#include "uavslice/learn/mlp.hpp"
#include "uavslice/learn/observation.hpp"
#include "uavslice/learn/trainer.hpp"

namespace uavslice::learn {

inline constexpr int kCheckpointVersion = 1;

// Text checkpoint:
//   uavslice-checkpoint 1
//   fleet <n>
//   alloc_actions simplex 0.1 66
//   move_actions compass 5
//   observation sectors 8 rings 25 75 150 max_fleet 5
//   normalizers agg_demand_bps 100000000 peer_offset arena_side
//   net <uav> <alloc|place>
//   layer_dims d0 d1 ... dk
//   one line per weight row (row-major), then one bias line, per layer
//   end
inline std::string format_param(float v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
  return buf;
}

inline void write_net(std::ostream& out, const Mlp<float>& net) {
  out << "layer_dims";
  for (int d : net.layer_dims()) out << ' ' << d;
  out << '\n';
  for (std::size_t l = 0; l < net.layers(); ++l) {
    const auto& w = net.weight(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out << (c ? " " : "") << format_param(w(r, c));
      out << '\n';
    }
    const auto& b = net.bias(l);
    for (Eigen::Index r = 0; r < b.size(); ++r) out << (r ? " " : "") << format_param(b(r));
    out << '\n';
  }
}

inline void write_checkpoint(std::ostream& out, const LearnedPolicy& policy) {
  out << "uavslice-checkpoint " << kCheckpointVersion << '\n';
  out << "fleet " << policy.fleet_size() << '\n';
  out << "alloc_actions simplex " << kAllocBwStep << ' ' << alloc_actions().size() << '\n';
  out << "move_actions compass " << kMoveCount << '\n';
  out << "observation sectors " << kSectors << " rings";
  for (double e : kRingEdgesM) out << ' ' << e;
  out << " max_fleet " << kMaxFleet << '\n';
  out << "normalizers agg_demand_bps " << format_param(static_cast<float>(kDemandNormalizerBps))
      << " peer_offset arena_side\n";
  for (std::size_t b = 0; b < policy.fleet_size(); ++b) {
    out << "net " << b << " alloc\n";
    write_net(out, policy.alloc_nets()[b]);
    out << "net " << b << " place\n";
    write_net(out, policy.place_nets()[b]);
  }
  out << "end\n";
}

inline void save_checkpoint(const std::string& path, const LearnedPolicy& policy) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot write checkpoint: " + path);
  write_checkpoint(out, policy);
  if (!out) throw RuntimeError("error writing checkpoint: " + path);
}

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next(const char* what) {
    std::string line;
    if (!std::getline(in_, line)) throw RuntimeError(std::string("checkpoint truncated while reading ") + what);
    ++line_no_;
    return std::istringstream(line);
  }

  std::string expect_tag(std::istringstream& ss, const std::string& tag) {
    std::string t;
    ss >> t;
    if (t != tag) throw RuntimeError("checkpoint line " + std::to_string(line_no_) + ": expected '" + tag + "', got '" + t + "'");
    return t;
  }

  int line() const { return line_no_; }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

// strtof accepts subnormals that operator>> rejects.
inline bool read_float(std::istringstream& ss, float& out) {
  std::string token;
  if (!(ss >> token)) return false;
  char* end = nullptr;
  out = std::strtof(token.c_str(), &end);
  return end != token.c_str() && *end == '\0';
}

inline Mlp<float> read_net(LineReader& reader) {
  auto dims_line = reader.next("layer_dims");
  reader.expect_tag(dims_line, "layer_dims");
  std::vector<int> dims;
  for (int d; dims_line >> d;) dims.push_back(d);
  Mlp<float> net(dims);
  for (std::size_t l = 0; l < net.layers(); ++l) {
    auto& w = net.weight(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      auto row = reader.next("weights");
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        if (!read_float(row, w(r, c))) throw RuntimeError("checkpoint line " + std::to_string(reader.line()) + ": short weight row");
    }
    auto bias = reader.next("biases");
    for (Eigen::Index r = 0; r < net.bias(l).size(); ++r)
      if (!read_float(bias, net.bias(l)(r))) throw RuntimeError("checkpoint line " + std::to_string(reader.line()) + ": short bias row");
  }
  return net;
}

}  // namespace detail

inline LearnedPolicy read_checkpoint(std::istream& in) {
  detail::LineReader reader(in);
  auto header = reader.next("header");
  reader.expect_tag(header, "uavslice-checkpoint");
  int version = 0;
  header >> version;
  if (version != kCheckpointVersion) throw RuntimeError("unsupported checkpoint version " + std::to_string(version));

  auto fleet_line = reader.next("fleet");
  reader.expect_tag(fleet_line, "fleet");
  std::size_t fleet = 0;
  fleet_line >> fleet;

  auto alloc_line = reader.next("alloc_actions");
  reader.expect_tag(alloc_line, "alloc_actions");
  std::string kind;
  double step = 0.0;
  std::size_t count = 0;
  alloc_line >> kind >> step >> count;
  if (kind != "simplex" || count != alloc_actions().size()) throw RuntimeError("checkpoint allocation action space mismatch");

  auto move_line = reader.next("move_actions");
  reader.expect_tag(move_line, "move_actions");
  move_line >> kind >> count;
  if (kind != "compass" || count != kMoveCount) throw RuntimeError("checkpoint move action space mismatch");

  auto obs_line = reader.next("observation");
  reader.expect_tag(obs_line, "observation");
  reader.next("normalizers");

  std::vector<Mlp<float>> alloc(fleet), place(fleet);
  for (std::size_t k = 0; k < 2 * fleet; ++k) {
    auto net_line = reader.next("net");
    reader.expect_tag(net_line, "net");
    std::size_t uav = 0;
    std::string role;
    net_line >> uav >> role;
    if (uav >= fleet) throw RuntimeError("checkpoint net for UAV " + std::to_string(uav) + " outside fleet");
    auto net = detail::read_net(reader);
    if (role == "alloc") {
      if (net.input_size() != static_cast<int>(kAllocObsSize) || net.output_size() != static_cast<int>(alloc_actions().size()))
        throw RuntimeError("allocation net has wrong shape");
      alloc[uav] = std::move(net);
    } else if (role == "place") {
      if (net.input_size() != static_cast<int>(kPlaceObsSize) || net.output_size() != static_cast<int>(kMoveCount))
        throw RuntimeError("placement net has wrong shape");
      place[uav] = std::move(net);
    } else {
      throw RuntimeError("unknown net role '" + role + "'");
    }
  }
  return LearnedPolicy(std::move(alloc), std::move(place));
}

inline LearnedPolicy load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open checkpoint: " + path);
  return read_checkpoint(in);
}

}  // namespace uavslice::learn
