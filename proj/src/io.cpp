#include "axxz/io.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace axxz {

namespace {

ojson cplx_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

cplx cplx_from(const ojson& j) {
  return cplx(j.at(0).get<double>(), j.at(1).get<double>());
}

}  // namespace

ojson params_json(const ModelParams& p) {
  ojson j;
  j["n_sites"] = p.n_sites;
  j["eta"] = cplx_json(p.eta);
  ojson th = ojson::array();
  for (const cplx& t : p.thetas) th.push_back(cplx_json(t));
  j["thetas"] = th;
  return j;
}

ModelParams params_from_json(const ojson& j) {
  ModelParams p(j.at("n_sites").get<int>(), cplx_from(j.at("eta")));
  p.thetas.clear();
  for (const auto& t : j.at("thetas")) p.thetas.push_back(cplx_from(t));
  p.validate();
  return p;
}

ojson rootset_json(const RootSet& rs) {
  ojson j;
  j["lambda0"] = cplx_json(rs.lambda0);
  j["recon_residual"] = rs.recon_residual;
  ojson roots = ojson::array();
  for (const cplx& z : rs.roots) roots.push_back(cplx_json(z));
  j["roots"] = roots;
  ojson tags = ojson::array();
  for (const RootTag& t : rs.tags) {
    ojson tj;
    tj["type"] = t.type == RootType::imaginary  ? "imaginary"
                 : t.type == RootType::pair     ? "pair"
                                                : "unpaired";
    tj["partner"] = t.partner;
    tj["n"] = t.n;
    tj["n_alt"] = t.n_alt;
    tags.push_back(tj);
  }
  j["tags"] = tags;
  return j;
}

RootSet rootset_from_json(const ojson& j) {
  RootSet rs;
  rs.lambda0 = cplx_from(j.at("lambda0"));
  rs.recon_residual = j.at("recon_residual").get<double>();
  for (const auto& z : j.at("roots")) rs.roots.push_back(cplx_from(z));
  for (const auto& tj : j.at("tags")) {
    RootTag t;
    std::string ty = tj.at("type").get<std::string>();
    t.type = ty == "imaginary" ? RootType::imaginary
             : ty == "pair"    ? RootType::pair
                               : RootType::unpaired;
    t.partner = tj.at("partner").get<int>();
    t.n = tj.at("n").get<int>();
    t.n_alt = tj.at("n_alt").get<int>();
    rs.tags.push_back(t);
  }
  return rs;
}

ojson fit_json(const FitResult& f) {
  ojson j;
  j["law"] = f.exponential ? "exponential" : "power";
  j["amplitude"] = f.amplitude;
  j["rate"] = f.rate;
  j["rms_residual"] = f.rms_residual;
  return j;
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size())
      throw std::invalid_argument("write_csv: ragged row");
    line(r);
  }
}

void atomic_write_text(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string());
    os.write(content.data(), (std::streamsize)content.size());
    if (!os.flush())
      throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace axxz
