#include "peck/manifest.hpp"

#include <openssl/evp.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "peck/errors.hpp"

namespace peck {

namespace {

std::string hex_digest(const unsigned char* digest, unsigned len) {
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) { EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr); }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, std::size_t len) { EVP_DigestUpdate(ctx_, data, len); }

  std::string hex() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx_, digest, &len);
    return hex_digest(digest, len);
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_hex_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing file '" + path + "'");
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

void RunManifest::finalize() {
  input_sha256.clear();
  for (const std::string& path : inputs) input_sha256.push_back(sha256_hex_file(path));
  std::ostringstream acc;
  acc << command << '\n' << experiment_id << '\n' << layout_ref << '\n';
  for (const std::string& h : input_sha256) acc << h << '\n';
  acc << calibration_ref << '\n';
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.12g %.12g %.12g %d %llu %s", qc_likelihood, qc_fraction,
                bin_seconds, n_quad, static_cast<unsigned long long>(seed),
                tool_version.c_str());
  acc << buf;
  content_hash = sha256_hex(acc.str());
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::json doc;
  doc["command"] = m.command;
  doc["experiment_id"] = m.experiment_id;
  doc["layout"] = m.layout_ref;
  doc["inputs"] = m.inputs;
  doc["input_sha256"] = m.input_sha256;
  doc["calibration"] = m.calibration_ref;
  doc["parameters"] = {{"qc_likelihood", m.qc_likelihood},
                       {"qc_fraction", m.qc_fraction},
                       {"bin_seconds", m.bin_seconds},
                       {"n_quad", m.n_quad},
                       {"seed", m.seed}};
  doc["tool_version"] = m.tool_version;
  doc["content_hash"] = m.content_hash;
  return doc.dump(2) + "\n";
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << manifest_to_json(manifest);
}

}  // namespace peck
