#include "tallip/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace tallip {

namespace {

Vector to_vector(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
  Vector v(static_cast<Index>(j.size()));
  Index i = 0;
  for (const auto& e : j) v[i++] = e.get<double>();
  return v;
}

LpInstance parse_text(std::istream& in) {
  LpInstance inst;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("lp text: empty file");
  {
    std::istringstream head(line);
    if (!(head >> inst.n >> inst.d))
      throw std::invalid_argument("lp text: first line must be 'n d'");
  }
  if (inst.n < 1 || inst.d < 1) throw std::invalid_argument("lp text: bad dimensions");
  inst.A = Matrix(inst.n, inst.d);
  inst.b = Vector(inst.n);
  inst.c = Vector(inst.d);
  for (Index i = 0; i < inst.n; ++i) {
    if (!std::getline(in, line))
      throw std::invalid_argument("lp text: missing constraint row");
    std::istringstream row(line);
    for (Index j = 0; j < inst.d; ++j)
      if (!(row >> inst.A(i, j)))
        throw std::invalid_argument("lp text: malformed constraint row");
    if (!(row >> inst.b[i])) throw std::invalid_argument("lp text: missing rhs entry");
  }
  if (!std::getline(in, line)) throw std::invalid_argument("lp text: missing cost line");
  {
    std::istringstream cost(line);
    for (Index j = 0; j < inst.d; ++j)
      if (!(cost >> inst.c[j]))
        throw std::invalid_argument("lp text: malformed cost line");
  }
  return inst;
}

}  // namespace

LpInstance lp_from_json(const nlohmann::json& j) {
  LpInstance inst;
  inst.n = j.at("n").get<Index>();
  inst.d = j.at("d").get<Index>();
  if (inst.n < 1 || inst.d < 1) throw std::invalid_argument("lp json: bad dimensions");
  const Vector flat = to_vector(j.at("A"));
  if (flat.size() != inst.n * inst.d)
    throw std::invalid_argument("lp json: A must hold n*d entries (row-major)");
  inst.A = Matrix(inst.n, inst.d);
  for (Index i = 0; i < inst.n; ++i)
    for (Index k = 0; k < inst.d; ++k) inst.A(i, k) = flat[i * inst.d + k];
  inst.b = to_vector(j.at("b"));
  inst.c = to_vector(j.at("c"));
  if (j.contains("x0") && !j.at("x0").is_null()) inst.x0 = to_vector(j.at("x0"));
  inst.validate();
  return inst;
}

nlohmann::json lp_to_json(const LpInstance& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["d"] = inst.d;
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(inst.n * inst.d));
  for (Index i = 0; i < inst.n; ++i)
    for (Index k = 0; k < inst.d; ++k) flat.push_back(inst.A(i, k));
  j["A"] = flat;
  j["b"] = std::vector<double>(inst.b.data(), inst.b.data() + inst.b.size());
  j["c"] = std::vector<double>(inst.c.data(), inst.c.data() + inst.c.size());
  if (inst.x0)
    j["x0"] = std::vector<double>(inst.x0->data(), inst.x0->data() + inst.x0->size());
  return j;
}

LpInstance read_lp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input: " + path);
  // sniff: JSON starts with '{'
  char first = 0;
  in >> std::ws;
  first = static_cast<char>(in.peek());
  if (first == '{') {
    nlohmann::json j;
    in >> j;
    return lp_from_json(j);
  }
  LpInstance inst = parse_text(in);
  inst.validate();
  return inst;
}

void write_lp_json(const LpInstance& inst, const std::string& path) {
  write_json(lp_to_json(inst), path);
}

void write_lp_text(const LpInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output: " + path);
  out.precision(17);
  out << inst.n << ' ' << inst.d << '\n';
  for (Index i = 0; i < inst.n; ++i) {
    for (Index j = 0; j < inst.d; ++j) out << inst.A(i, j) << ' ';
    out << inst.b[i] << '\n';
  }
  for (Index j = 0; j < inst.d; ++j) out << inst.c[j] << (j + 1 < inst.d ? ' ' : '\n');
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace tallip
