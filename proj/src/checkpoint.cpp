#include "crflow/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace crflow {

namespace {

constexpr char kMagic[8] = {'C', 'R', 'F', 'C', 'K', 'P', 'T', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

void put_f64(std::string& out, double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

void put_f64s(std::string& out, const double* v, std::size_t count) {
  out.append(reinterpret_cast<const char*>(v), count * sizeof(double));
}

struct Reader {
  const std::string& bytes;
  std::size_t pos = 0;
  void need(std::size_t n) const {
    if (pos + n > bytes.size()) throw Error("checkpoint: truncated file");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
  }
  double f64() {
    need(8);
    double v;
    std::memcpy(&v, bytes.data() + pos, 8);
    pos += 8;
    return v;
  }
  std::vector<double> f64s(std::size_t count) {
    need(count * 8);
    std::vector<double> v(count);
    std::memcpy(v.data(), bytes.data() + pos, count * 8);
    pos += count * 8;
    return v;
  }
};

}  // namespace

std::string serialize_checkpoint(const CheckpointMeta& meta, const CheckpointData& data) {
  nlohmann::json hdr;
  hdr["version"] = 1;
  hdr["formulation"] = to_string(meta.formulation);
  hdr["n"] = meta.n;
  hdr["N"] = meta.N;
  hdr["num_periods"] = meta.periods.size();
  hdr["metric_entries"] = data.metric.size();
  hdr["phi_entries"] = data.phi.size();
  hdr["phi_dot_entries"] = data.phi_dot.size();
  hdr["scalar_R_entries"] = data.scalar_R.size();
  const std::string hs = hdr.dump();

  std::string out(kMagic, 8);
  put_u32(out, static_cast<std::uint32_t>(hs.size()));
  out += hs;
  put_f64(out, 1.0);  // byte-order probe
  put_f64(out, data.t);
  put_f64s(out, meta.periods.data(), meta.periods.size());
  put_f64s(out, reinterpret_cast<const double*>(data.metric.data()),
           data.metric.size() * 2);
  put_f64s(out, data.phi.data(), data.phi.size());
  put_f64s(out, data.phi_dot.data(), data.phi_dot.size());
  put_f64s(out, data.scalar_R.data(), data.scalar_R.size());
  return out;
}

CheckpointFile deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw Error("checkpoint: bad magic");
  Reader r{bytes, 8};
  const std::uint32_t hlen = r.u32();
  r.need(hlen);
  const nlohmann::json hdr =
      nlohmann::json::parse(bytes.substr(r.pos, hlen));
  r.pos += hlen;

  CheckpointFile f;
  const std::string form = hdr.at("formulation").get<std::string>();
  if (form == "tensor")
    f.meta.formulation = Formulation::tensor;
  else if (form == "potential")
    f.meta.formulation = Formulation::potential;
  else if (form == "closed_form")
    f.meta.formulation = Formulation::closed_form;
  else
    throw Error("checkpoint: unknown formulation " + form);
  f.meta.n = hdr.at("n").get<int>();
  f.meta.N = hdr.at("N").get<int>();

  if (r.f64() != 1.0) throw Error("checkpoint: byte-order mismatch");
  f.data.t = r.f64();
  f.meta.periods = r.f64s(hdr.at("num_periods").get<std::size_t>());
  const std::size_t me = hdr.at("metric_entries").get<std::size_t>();
  const std::vector<double> raw = r.f64s(me * 2);
  f.data.metric.reserve(me);
  for (std::size_t i = 0; i < me; ++i)
    f.data.metric.emplace_back(raw[2 * i], raw[2 * i + 1]);
  f.data.phi = r.f64s(hdr.at("phi_entries").get<std::size_t>());
  f.data.phi_dot = r.f64s(hdr.at("phi_dot_entries").get<std::size_t>());
  f.data.scalar_R = r.f64s(hdr.at("scalar_R_entries").get<std::size_t>());
  if (r.pos != bytes.size()) throw Error("checkpoint: trailing bytes");
  return f;
}

void write_checkpoint(const std::string& path, const CheckpointMeta& meta,
                      const CheckpointData& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("checkpoint: cannot open for write: " + path);
  const std::string bytes = serialize_checkpoint(meta, data);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("checkpoint: write failed: " + path);
}

CheckpointFile read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint: cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

CheckpointMeta checkpoint_meta(const Trajectory& tr) {
  CheckpointMeta m;
  m.formulation = tr.formulation;
  if (tr.torus_ctx) {
    m.n = tr.torus_ctx->grid.n();
    m.N = tr.torus_ctx->grid.N();
    m.periods = tr.torus_ctx->grid.periods();
  } else if (tr.hopf_ctx) {
    m.n = tr.hopf_ctx->model.n;
    m.N = 0;
  }
  return m;
}

}  // namespace crflow
