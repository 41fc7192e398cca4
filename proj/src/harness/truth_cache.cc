/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/harness/truth_cache.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "enff/core/errors.hpp"
#include "enff/harness/config.hpp"

namespace enff::harness {

static_assert(std::endian::native == std::endian::little, "truth cache assumes little-endian");

namespace {

constexpr char kMagic[8] = {'E', 'N', 'F', 'F', 'D', 'A', '0', '1'};

template <class T>
void put(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t end, std::string origin)
      : bytes_(bytes), end_(end), origin_(std::move(origin)) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > end_) throw IoError(origin_ + ": truth cache is truncated");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::size_t remaining() const { return end_ - pos_; }

 private:
  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
  std::string origin_;
};

}  // namespace

std::string encode_truth(const TruthRun& run) {
  const std::uint64_t n_truth = run.truth.size();
  const std::uint64_t dim = n_truth ? static_cast<std::uint64_t>(run.truth[0].size()) : 0;
  const std::uint64_t n_obs = run.observations.size();
  const std::uint64_t obs_dim = n_obs ? static_cast<std::uint64_t>(run.observations[0].second.size()) : 0;
  std::string out(kMagic, sizeof kMagic);
  put(out, kTruthCacheVersion);
  put(out, n_truth);
  put(out, dim);
  put(out, n_obs);
  put(out, obs_dim);
  for (const auto& o : run.observations) put<std::uint64_t>(out, o.first);
  for (const auto& x : run.truth) {
    if (static_cast<std::uint64_t>(x.size()) != dim) throw IoError("ragged truth trajectory");
    for (Index i = 0; i < x.size(); ++i) put(out, x[i]);
  }
  for (const auto& o : run.observations) {
    if (static_cast<std::uint64_t>(o.second.size()) != obs_dim) throw IoError("ragged observations");
    for (Index i = 0; i < o.second.size(); ++i) put(out, o.second[i]);
  }
  if (static_cast<std::uint64_t>(run.initial_condition.size()) != dim)
    throw IoError("initial condition dimension differs from the truth");
  for (Index i = 0; i < run.initial_condition.size(); ++i) put(out, run.initial_condition[i]);
  put(out, fnv1a64(out.data(), out.size()));
  return out;
}

TruthRun decode_truth(const std::string& bytes, const std::string& origin) {
  if (bytes.size() < sizeof kMagic + 6 * sizeof(std::uint64_t) ||
      std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw IoError(origin + ": not a truth cache file");
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body, sizeof stored);
  if (stored != fnv1a64(bytes.data(), body)) throw IoError(origin + ": truth cache checksum mismatch");

  Reader r(bytes, body, origin);
  for (std::size_t i = 0; i < sizeof kMagic; ++i) r.get<char>();
  const auto version = r.get<std::uint64_t>();
  if (version != kTruthCacheVersion)
    throw IoError(origin + ": unsupported truth cache version " + std::to_string(version));
  const auto n_truth = r.get<std::uint64_t>();
  const auto dim = r.get<std::uint64_t>();
  const auto n_obs = r.get<std::uint64_t>();
  const auto obs_dim = r.get<std::uint64_t>();
  const std::uint64_t expected = 8 * (n_obs + n_truth * dim + n_obs * obs_dim + dim);
  if (r.remaining() != expected) throw IoError(origin + ": truth cache size does not match its header");

  TruthRun run;
  std::vector<std::size_t> steps(n_obs);
  for (auto& s : steps) s = r.get<std::uint64_t>();
  run.truth.assign(n_truth, StateVec(static_cast<Index>(dim)));
  for (auto& x : run.truth)
    for (Index i = 0; i < x.size(); ++i) x[i] = r.get<double>();
  for (std::uint64_t k = 0; k < n_obs; ++k) {
    ObsVec y(static_cast<Index>(obs_dim));
    for (Index i = 0; i < y.size(); ++i) y[i] = r.get<double>();
    run.observations.emplace_back(steps[k], std::move(y));
  }
  run.initial_condition.resize(static_cast<Index>(dim));
  for (Index i = 0; i < run.initial_condition.size(); ++i) run.initial_condition[i] = r.get<double>();
  return run;
}

void save_truth(const std::string& path, const TruthRun& run) {
  const std::string bytes = encode_truth(run);
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  // Write then rename so a concurrent reader never sees a partial file.
  const std::filesystem::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write truth cache " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing truth cache " + tmp.string());
  }
  std::filesystem::rename(tmp, p, ec);
  if (ec) throw IoError("cannot move truth cache into place at " + path + ": " + ec.message());
}

TruthRun load_truth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open truth cache " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_truth(ss.str(), path);
}

}  // namespace enff::harness
