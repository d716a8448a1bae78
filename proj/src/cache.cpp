#include "axxz/cache.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace axxz {

namespace {

std::string g_override;

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* scan_tag(RootScan what) {
  switch (what) {
    case RootScan::ground: return "roots-ground";
    case RootScan::first_pair: return "roots-first-pair";
    case RootScan::three_pairs_two_imag: return "roots-3p2i";
  }
  return "roots-unknown";
}

bool scan_matches(RootScan what, const ClassifyReport& rep) {
  switch (what) {
    case RootScan::ground:
      return true;
    case RootScan::first_pair:
      return rep.n_pairs == 1 && rep.n_unpaired == 0;
    case RootScan::three_pairs_two_imag:
      return rep.n_pairs == 3 && rep.n_imaginary == 2 && rep.n_unpaired == 0;
  }
  return false;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void set_cache_dir(const std::string& dir) { g_override = dir; }

std::filesystem::path cache_dir() {
  if (!g_override.empty()) return g_override;
  if (const char* env = std::getenv("AXXZ_CACHE_DIR"); env && *env)
    return env;
  return std::filesystem::temp_directory_path() / "axxz_cache";
}

std::string cache_key(const ModelParams& p, const std::string& tag,
                      const std::string& tol_block) {
  std::vector<cplx> th = p.thetas;
  std::sort(th.begin(), th.end(), [](cplx a, cplx b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  std::ostringstream ss;
  ss << tag << "|N=" << p.n_sites << "|eta=" << num17(p.eta.real()) << ','
     << num17(p.eta.imag()) << "|thetas=";
  for (const cplx& t : th) ss << num17(t.real()) << ',' << num17(t.imag()) << ';';
  ss << "|tol=" << tol_block << "|v=" << kVersion;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                (unsigned long long)fnv1a64(ss.str()));
  return std::string(tag) + "-" + hex;
}

bool cache_get(const std::string& key, ojson& out) {
  std::filesystem::path path = cache_dir() / (key + ".json");
  std::ifstream is(path, std::ios::binary);
  if (!is) return false;
  try {
    out = ojson::parse(is);
    return true;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "warning: cache entry %s unreadable (%s), recomputing\n",
                 path.string().c_str(), e.what());
    return false;
  }
}

void cache_put(const std::string& key, const ojson& doc) {
  std::filesystem::path path = cache_dir() / (key + ".json");
  atomic_write_text(path.string(), doc.dump());
}

Eigen::VectorXd cached_energy_levels(const ModelParams& p) {
  std::string key = cache_key(p, "levels", "");
  ojson doc;
  if (cache_get(key, doc)) {
    try {
      const auto& w = doc.at("levels");
      Eigen::VectorXd out((Eigen::Index)w.size());
      for (Eigen::Index i = 0; i < out.size(); ++i)
        out[i] = w.at((std::size_t)i).get<double>();
      if (out.size() == (Eigen::Index)p.dim()) return out;
      std::fprintf(stderr, "warning: cache entry %s has wrong size, recomputing\n",
                   key.c_str());
    } catch (const std::exception& e) {
      std::fprintf(stderr, "warning: cache entry %s malformed (%s), recomputing\n",
                   key.c_str(), e.what());
    }
  }
  Eigen::VectorXd w = energy_levels(p);
  doc = ojson();
  doc["params"] = params_json(p);
  ojson arr = ojson::array();
  for (Eigen::Index i = 0; i < w.size(); ++i) arr.push_back(w[i]);
  doc["levels"] = arr;
  cache_put(key, doc);
  return w;
}

ScanResult cached_root_scan(const ModelParams& p, RootScan what) {
  std::string key = cache_key(p, scan_tag(what), "classify=default");
  ojson doc;
  if (cache_get(key, doc)) {
    try {
      ScanResult r;
      r.index = doc.at("index").get<int>();
      r.energy = doc.at("energy").get<double>();
      r.roots = rootset_from_json(doc.at("roots"));
      return r;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "warning: cache entry %s malformed (%s), recomputing\n",
                   key.c_str(), e.what());
    }
  }
  Spectrum s = joint_eigenbasis(p);
  ScanResult r;
  int cap = std::min<int>((int)s.records.size(), 64);
  for (int i = 0; i < cap; ++i) {
    RootSet rs = extract_roots(s, i);
    ClassifyReport rep = classify_roots(rs, p);
    if (scan_matches(what, rep)) {
      r.index = i;
      r.energy = s.records[i].energy;
      r.roots = std::move(rs);
      break;
    }
    if (what == RootScan::ground) break;  // index 0 only
  }
  if (r.index < 0)
    throw std::runtime_error(std::string("root scan found no match: ") +
                             scan_tag(what));
  doc = ojson();
  doc["params"] = params_json(p);
  doc["index"] = r.index;
  doc["energy"] = r.energy;
  doc["roots"] = rootset_json(r.roots);
  cache_put(key, doc);
  return r;
}

}  // namespace axxz
