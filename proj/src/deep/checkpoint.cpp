#include "emax/deep/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace emax::deep {

namespace {

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') throw Error("checkpoint: bad number '" + token + "'");
  return v;
}

void check_name(const std::string& name) {
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
    throw Error("checkpoint: invalid entry name '" + name + "'");
}

}  // namespace

void Checkpoint::write(std::ostream& os) const {
  os << "emax-checkpoint " << kVersion << '\n';
  for (const auto& [name, t] : tensors) {
    check_name(name);
    os << "tensor " << name << ' ' << t.rows() << ' ' << t.cols() << '\n';
    for (Index i = 0; i < t.size(); ++i) os << hexfloat(t.data()[i]) << ((i + 1) % 8 == 0 || i + 1 == t.size() ? '\n' : ' ');
  }
  for (const auto& [name, v] : integers) {
    check_name(name);
    os << "ints " << name << ' ' << v.size() << '\n';
    for (std::size_t i = 0; i < v.size(); ++i) os << v[i] << ((i + 1) % 16 == 0 || i + 1 == v.size() ? '\n' : ' ');
  }
  for (const auto& [name, s] : strings) {
    check_name(name);
    if (s.find('\n') != std::string::npos) throw Error("checkpoint: string entries must be single-line");
    os << "string " << name << ' ' << s << '\n';
  }
  os << "end\n";
}

Checkpoint Checkpoint::read(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "emax-checkpoint") throw Error("checkpoint: not a checkpoint file");
  if (version != kVersion) throw Error("checkpoint: unsupported version " + std::to_string(version));
  Checkpoint ck;
  std::string kind;
  while (is >> kind) {
    if (kind == "end") return ck;
    std::string name;
    if (!(is >> name)) throw Error("checkpoint: truncated entry");
    if (kind == "tensor") {
      Index rows = 0, cols = 0;
      if (!(is >> rows >> cols) || rows < 0 || cols < 0) throw Error("checkpoint: bad shape for " + name);
      Tensor t(rows, cols);
      std::string tok;
      for (Index i = 0; i < t.size(); ++i) {
        if (!(is >> tok)) throw Error("checkpoint: truncated tensor " + name);
        t.data()[i] = parse_double(tok);
      }
      ck.tensors[name] = std::move(t);
    } else if (kind == "ints") {
      std::size_t n = 0;
      if (!(is >> n)) throw Error("checkpoint: bad length for " + name);
      std::vector<std::int64_t> v(n);
      for (auto& x : v)
        if (!(is >> x)) throw Error("checkpoint: truncated ints " + name);
      ck.integers[name] = std::move(v);
    } else if (kind == "string") {
      std::string rest;
      std::getline(is, rest);
      if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
      ck.strings[name] = rest;
    } else {
      throw Error("checkpoint: unknown entry kind '" + kind + "'");
    }
  }
  throw Error("checkpoint: missing end marker");
}

void Checkpoint::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw Error("checkpoint: cannot write " + path.string());
  write(os);
  if (!os) throw Error("checkpoint: write failed for " + path.string());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("checkpoint: cannot open " + path.string());
  return read(is);
}

const Tensor& Checkpoint::tensor(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw Error("checkpoint: missing tensor " + name);
  return it->second;
}

const std::vector<std::int64_t>& Checkpoint::ints(const std::string& name) const {
  auto it = integers.find(name);
  if (it == integers.end()) throw Error("checkpoint: missing ints " + name);
  return it->second;
}

std::int64_t Checkpoint::scalar_int(const std::string& name) const {
  const auto& v = ints(name);
  if (v.size() != 1) throw Error("checkpoint: " + name + " is not a scalar");
  return v.front();
}

double Checkpoint::scalar(const std::string& name) const {
  const Tensor& t = tensor(name);
  if (t.size() != 1) throw Error("checkpoint: " + name + " is not a scalar");
  return t(0, 0);
}

const std::string& Checkpoint::text(const std::string& name) const {
  auto it = strings.find(name);
  if (it == strings.end()) throw Error("checkpoint: missing string " + name);
  return it->second;
}

std::string rng_state(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void set_rng_state(Rng& rng, const std::string& state) {
  std::istringstream is(state);
  is >> rng;
  if (!is) throw Error("checkpoint: corrupt rng state");
}

}  // namespace emax::deep
