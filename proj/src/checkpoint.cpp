#include "fsflow/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "fsflow/errors.hpp"

namespace fsflow {

namespace {

constexpr char kMagic[8] = {'F', 'S', 'F', 'C', 'K', 'P', 'T', '1'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return out;
}

void put_u64(std::ostream& os, std::uint64_t v) {
  v = to_le(v);
  os.write(reinterpret_cast<const char*>(&v), 8);
}

std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return to_le(v);
}

struct Array {
  std::string name;
  Eigen::Index rows;
  Eigen::Index cols;
  const double* data;
};

class Writer {
 public:
  void add(std::string name, const Eigen::MatrixXd& m) { arrays_.push_back({std::move(name), m.rows(), m.cols(), m.data()}); }
  void add(std::string name, const Eigen::RowVectorXd& v) { arrays_.push_back({std::move(name), 1, v.size(), v.data()}); }
  void add_scalar(std::string name, const double* value) { arrays_.push_back({std::move(name), 1, 1, value}); }

  nlohmann::ordered_json layout() const {
    auto out = nlohmann::ordered_json::array();
    for (const auto& a : arrays_) out.push_back({{"name", a.name}, {"rows", a.rows}, {"cols", a.cols}});
    return out;
  }

  void write_data(std::ostream& os) const {
    for (const auto& a : arrays_)
      for (Eigen::Index i = 0; i < a.rows * a.cols; ++i) put_u64(os, std::bit_cast<std::uint64_t>(a.data[i]));
  }

 private:
  std::vector<Array> arrays_;
};

void add_state(Writer& w, const std::string& prefix, const State& s) {
  w.add_scalar(prefix + ".t", &s.t);
  w.add(prefix + ".q", s.q);
  for (std::size_t i = 0; i < s.u.size(); ++i) w.add(prefix + ".u" + std::to_string(i), s.u[i]);
  w.add(prefix + ".eta", s.eta);
}

nlohmann::ordered_json grid_json(const Grid& grid) {
  return {{"d", grid.dim()}, {"L", grid.period()}, {"n_h", grid.modes()}, {"n_v", grid.vertical_size()}, {"b", grid.depth()}};
}

}  // namespace

void write_checkpoint(const std::string& path, const Grid& grid, const nlohmann::ordered_json& meta, const State& state,
                      const StepperHistory& history) {
  Writer w;
  add_state(w, "state", state);
  if (history.previous) add_state(w, "previous", *history.previous);
  if (history.previous_terms) {
    const auto& g = *history.previous_terms;
    w.add("terms.G1", g.G1);
    for (std::size_t i = 0; i < g.G2.size(); ++i) w.add("terms.G2_" + std::to_string(i), g.G2[i]);
    w.add("terms.G3", g.G3);
    for (std::size_t i = 0; i < g.G4.size(); ++i) w.add("terms.G4_" + std::to_string(i), g.G4[i]);
  }
  nlohmann::ordered_json header;
  header["format"] = "fsflow-checkpoint";
  header["version"] = 1;
  header["grid"] = grid_json(grid);
  header["layout"] = "float64 little-endian; volume arrays vertical-node fastest";
  header["arrays"] = w.layout();
  header["meta"] = meta;
  const std::string text = header.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("checkpoint: cannot open " + path + " for writing");
  os.write(kMagic, sizeof kMagic);
  put_u64(os, text.size());
  os.write(text.data(), std::streamsize(text.size()));
  w.write_data(os);
  if (!os) throw ConfigError("checkpoint: write failed for " + path);
}

CheckpointData read_checkpoint(const std::string& path, const Grid& grid) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("checkpoint: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) throw ConfigError("checkpoint: bad magic in " + path);
  const std::uint64_t len = get_u64(is);
  if (!is || len > (1ull << 30)) throw ConfigError("checkpoint: bad header length in " + path);
  std::string text(len, '\0');
  is.read(text.data(), std::streamsize(len));
  nlohmann::ordered_json header;
  try {
    header = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: malformed header: ") + e.what());
  }
  if (header.value("grid", nlohmann::ordered_json()) != grid_json(grid))
    throw ConfigError("checkpoint: grid in " + path + " does not match the configured grid");

  std::map<std::string, Eigen::MatrixXd> arrays;
  for (const auto& a : header.at("arrays")) {
    const Eigen::Index rows = a.at("rows"), cols = a.at("cols");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows * cols; ++i) m.data()[i] = std::bit_cast<double>(get_u64(is));
    if (!is) throw ConfigError("checkpoint: truncated data in " + path);
    arrays.emplace(a.at("name").get<std::string>(), std::move(m));
  }

  const int d = grid.dim();
  auto take_state = [&](const std::string& prefix) {
    State s;
    s.t = arrays.at(prefix + ".t")(0, 0);
    s.q = arrays.at(prefix + ".q");
    for (int i = 0; i < d; ++i) s.u.push_back(arrays.at(prefix + ".u" + std::to_string(i)));
    s.eta = arrays.at(prefix + ".eta").row(0);
    return s;
  };

  CheckpointData out;
  out.meta = header.at("meta");
  try {
    out.state = take_state("state");
    if (arrays.count("previous.t")) out.history.previous = take_state("previous");
    if (arrays.count("terms.G1")) {
      ExplicitTerms g;
      g.G1 = arrays.at("terms.G1");
      for (int i = 0; i < d; ++i) g.G2.push_back(arrays.at("terms.G2_" + std::to_string(i)));
      g.G3 = arrays.at("terms.G3").row(0);
      for (int i = 0; i < d; ++i) g.G4.push_back(arrays.at("terms.G4_" + std::to_string(i)).row(0));
      out.history.previous_terms = std::move(g);
    }
  } catch (const std::out_of_range&) {
    throw ConfigError("checkpoint: missing array in " + path);
  }
  return out;
}

}  // namespace fsflow
