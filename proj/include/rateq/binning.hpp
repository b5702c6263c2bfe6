#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "rateq/defaults.hpp"
#include "rateq/dist.hpp"
#include "rateq/info.hpp"
#include "rateq/parallel.hpp"
#include "rateq/region.hpp"
#include "rateq/rng.hpp"

namespace rateq {

struct SimConfig {
  JointDist source;        // axes (x,y,z,e)
  Channel u_channel;       // P(u|y); |U| = 1 selects the Slepian-Wolf baseline
  int n = 8;
  double eps = defaults::kEps;
  double delta_typ = -1;   // < 0 picks the blocklength default
  std::uint64_t seed = 1;
  int trials = 0;
  std::int64_t state_guard = defaults::kStateGuard;

  double delta() const { return delta_typ < 0 ? defaults::deltaTyp(n) : delta_typ; }
};

inline Channel constantUChannel(Eigen::Index ySize) {
  return makeChannel({{"y", ySize}}, Axis{"u", 1}, Eigen::MatrixXd::Ones(ySize, 1));
}

/// Marginals keep source order; tests want their own axis order.
inline Eigen::VectorXd reorderPmf(const JointDist& d, const NameVec& order) {
  std::vector<Eigen::Index> idx = axisIndices(d.axes, order);
  AxisVec outAxes;
  for (Eigen::Index i : idx) outAxes.push_back(d.axes[i]);
  std::vector<Eigen::Index> outStrides = rowMajorStrides(outAxes);
  Eigen::VectorXd out(d.p.size());
  std::vector<Eigen::Index> coords;
  for (Eigen::Index flat = 0; flat < d.p.size(); ++flat) {
    unravel(flat, d.axes, coords);
    Eigen::Index o = 0;
    for (size_t k = 0; k < idx.size(); ++k) o += coords[idx[k]] * outStrides[k];
    out[o] = d.p[flat];
  }
  return out;
}

/// Joint strong typicality with additive slack delta per cell and forbidden
/// zero-probability cells. Axes of alphabet size 1 carry no statistics and
/// are dropped; a test with fewer than two live axes passes unconditionally
/// (a constant codeword is typical with everything).
class TypicalityTest {
 public:
  TypicalityTest() = default;
  TypicalityTest(std::vector<Eigen::Index> sizes, Eigen::VectorXd pmf, double delta)
      : sizes_(std::move(sizes)), pmf_(std::move(pmf)), delta_(delta) {
    Eigen::Index cells = 1;
    int live = 0;
    for (Eigen::Index s : sizes_) {
      cells *= s;
      if (s > 1) ++live;
    }
    if (cells != pmf_.size()) throw Error("typicality: pmf shape mismatch");
    active_ = live >= 2;
  }

  bool active() const { return active_; }

  /// seqs[k][i] is the i-th symbol of the k-th sequence.
  bool test(const std::vector<const std::int32_t*>& seqs, int n) const {
    if (!active_) return true;
    thread_local std::vector<int> counts;
    counts.assign(static_cast<size_t>(pmf_.size()), 0);
    for (int i = 0; i < n; ++i) {
      Eigen::Index cell = 0;
      for (size_t k = 0; k < sizes_.size(); ++k) cell = cell * sizes_[k] + seqs[k][i];
      ++counts[static_cast<size_t>(cell)];
    }
    const double inv = 1.0 / n;
    for (Eigen::Index c = 0; c < pmf_.size(); ++c) {
      double freq = counts[static_cast<size_t>(c)] * inv;
      if (counts[static_cast<size_t>(c)] > 0 && pmf_[c] <= 0.0) return false;
      if (std::abs(freq - pmf_[c]) > delta_ + 1e-12) return false;
    }
    return true;
  }

 private:
  std::vector<Eigen::Index> sizes_;
  Eigen::VectorXd pmf_;
  double delta_ = 0.1;
  bool active_ = false;
};

struct Codebook {
  Eigen::Index count = 0;
  // Row-major so words.row(w).data() is a contiguous sequence.
  Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> words;
};

struct BinMap {
  std::int64_t b_bins = 1;  // codeword bins, indices 1..b_bins (0 = encode failure)
  std::int64_t c_bins = 1;  // sequence bins, indices 1..c_bins
  std::vector<std::int32_t> codeword_bin;          // per codeword
  std::vector<std::int32_t> sequence_bin;          // per y^n id
  std::vector<std::vector<std::int32_t>> b_members;  // bin -> codeword indices
  std::vector<std::vector<std::int64_t>> c_members;  // bin -> y^n ids
};

/// Precomputed joint statistics of the scheme for one configuration.
struct SchemeStats {
  double i_y_u = 0, i_u_z = 0, h_y_given_uz = 0, h_y_given_z = 0;
  Eigen::VectorXd pu;             // codeword symbol law
  TypicalityTest typ_yu, typ_uz, typ_yuz;
};

inline SchemeStats buildSchemeStats(const SimConfig& cfg) {
  requireSourceAxes(cfg.source);
  if (cfg.u_channel.from.size() != 1 || cfg.u_channel.from[0].name != "y")
    throw Error("simulator u-channel must condition on y");
  JointDist ext = attachAux(cfg.source, cfg.u_channel, "u");
  SchemeStats s;
  s.i_y_u = mutualInfoBits(ext, {"y"}, {"u"});
  s.i_u_z = mutualInfoBits(ext, {"u"}, {"z"});
  s.h_y_given_uz = condEntropyBits(ext, {"y"}, {"u", "z"});
  s.h_y_given_z = condEntropyBits(ext, {"y"}, {"z"});
  s.pu = marginal(ext, {"u"}).p;
  const double delta = cfg.delta();
  const Eigen::Index ny = cfg.source.axes[1].size;
  const Eigen::Index nz = cfg.source.axes[2].size;
  const Eigen::Index nu = cfg.u_channel.to.size;
  s.typ_yu = TypicalityTest({ny, nu}, marginal(ext, {"y", "u"}).p, delta);
  s.typ_uz = TypicalityTest({nu, nz}, reorderPmf(marginal(ext, {"z", "u"}), {"u", "z"}), delta);
  s.typ_yuz = TypicalityTest({ny, nu, nz}, reorderPmf(marginal(ext, {"y", "z", "u"}), {"y", "u", "z"}), delta);
  return s;
}

inline std::int64_t powerOfTwoBins(double exponentBits) {
  std::int64_t e = std::llround(exponentBits);
  if (e < 0) e = 0;
  if (e > 40) throw Error("bin count exponent too large");
  return std::int64_t(1) << e;
}

/// 2^{n(I(Y;U)+eps)} i.i.d. codewords from P(u), deterministic per seed.
inline Codebook buildCodebook(const SimConfig& cfg, const SchemeStats& s) {
  double raw = std::exp2(cfg.n * (s.i_y_u + cfg.eps));
  if (!(raw < static_cast<double>(defaults::kCodebookMax)))
    throw Error("codebook size exceeds 2^31; reduce n or eps");
  Eigen::Index count = std::max<std::int64_t>(1, std::llround(raw));
  Codebook cb;
  cb.count = count;
  cb.words.resize(count, cfg.n);
  CounterRng rng(cfg.seed, kStreamCodebook);
  for (Eigen::Index w = 0; w < count; ++w)
    for (int i = 0; i < cfg.n; ++i)
      cb.words(w, i) = static_cast<std::int32_t>(rng.sampleDiscrete(s.pu));
  return cb;
}

inline std::int64_t sequenceCount(Eigen::Index ny, int n) {
  double total = std::pow(static_cast<double>(ny), n);
  if (!(total <= static_cast<double>(defaults::kSequenceSpaceMax)))
    throw Error("|Y|^n exceeds the sequence-space guard");
  return static_cast<std::int64_t>(total + 0.5);
}

inline std::int64_t uniformBelow(CounterRng& rng, std::int64_t bound) {
  // Multiply-shift keeps the draw unbiased enough for bin assignment while
  // staying a pure function of the counter.
  return static_cast<std::int64_t>(
      (static_cast<unsigned __int128>(rng.nextU64()) * static_cast<unsigned __int128>(bound)) >> 64);
}

/// Uniform double binning of codewords and Y^n sequences; bin counts are the
/// nearest power of two of the real-valued exponent, minimum one.
inline BinMap buildBinMaps(const SimConfig& cfg, const SchemeStats& s, const Codebook& cb) {
  BinMap bm;
  bm.b_bins = powerOfTwoBins(cfg.n * (s.i_y_u - s.i_u_z));
  bm.c_bins = powerOfTwoBins(cfg.n * (s.h_y_given_uz + cfg.eps));
  bm.codeword_bin.resize(static_cast<size_t>(cb.count));
  bm.b_members.assign(static_cast<size_t>(bm.b_bins) + 1, {});
  CounterRng rngB(cfg.seed, kStreamCodewordBins);
  for (Eigen::Index w = 0; w < cb.count; ++w) {
    std::int32_t bin = static_cast<std::int32_t>(1 + uniformBelow(rngB, bm.b_bins));
    bm.codeword_bin[static_cast<size_t>(w)] = bin;
    bm.b_members[static_cast<size_t>(bin)].push_back(static_cast<std::int32_t>(w));
  }
  const std::int64_t nseq = sequenceCount(cfg.source.axes[1].size, cfg.n);
  bm.sequence_bin.resize(static_cast<size_t>(nseq));
  bm.c_members.assign(static_cast<size_t>(bm.c_bins) + 1, {});
  CounterRng rngC(cfg.seed, kStreamSequenceBins);
  for (std::int64_t y = 0; y < nseq; ++y) {
    std::int32_t bin = static_cast<std::int32_t>(1 + uniformBelow(rngC, bm.c_bins));
    bm.sequence_bin[static_cast<size_t>(y)] = bin;
    bm.c_members[static_cast<size_t>(bin)].push_back(y);
  }
  return bm;
}

inline std::int64_t sequenceId(const std::int32_t* seq, int n, Eigen::Index alphabet) {
  std::int64_t id = 0;
  for (int i = 0; i < n; ++i) id = id * alphabet + seq[i];
  return id;
}

inline void sequenceFromId(std::int64_t id, int n, Eigen::Index alphabet, std::int32_t* out) {
  for (int i = n - 1; i >= 0; --i) {
    out[i] = static_cast<std::int32_t>(id % alphabet);
    id /= alphabet;
  }
}

struct EncodeResult {
  bool ok = false;
  std::int32_t j1 = 0;  // 0 is the reserved encode-failure symbol
  std::int64_t j2 = 0;
  Eigen::Index codeword = -1;
};

/// First (lowest-index) codeword jointly typical with y^n, plus the two bin
/// indices. Failure is a value: J1 = 0, J2 still carries the sequence bin.
inline EncodeResult encode(const std::int32_t* ySeq, const SimConfig& cfg,
                           const SchemeStats& s, const Codebook& cb, const BinMap& bm) {
  EncodeResult r;
  r.j2 = bm.sequence_bin[static_cast<size_t>(sequenceId(ySeq, cfg.n, cfg.source.axes[1].size))];
  for (Eigen::Index w = 0; w < cb.count; ++w) {
    if (s.typ_yu.test({ySeq, cb.words.row(w).data()}, cfg.n)) {
      r.ok = true;
      r.codeword = w;
      r.j1 = bm.codeword_bin[static_cast<size_t>(w)];
      return r;
    }
  }
  return r;
}

enum class DecodeStatus {
  kOk,
  kNoCodeword,
  kAmbiguousCodeword,
  kNoSequence,
  kAmbiguousSequence,
};

struct DecodeResult {
  DecodeStatus status = DecodeStatus::kNoCodeword;
  std::vector<std::int32_t> y_hat;
};

/// Typicality decoder: the unique codeword content in bin J1 typical with
/// z^n, then the unique sequence in bin J2 typical with (u^n, z^n). Several
/// indices holding the same codeword content count as one candidate.
inline DecodeResult decode(std::int32_t j1, std::int64_t j2, const std::int32_t* zSeq,
                           const SimConfig& cfg, const SchemeStats& s, const Codebook& cb,
                           const BinMap& bm) {
  DecodeResult r;
  if (j1 <= 0 || j1 > bm.b_bins) return r;  // reserved failure symbol or junk
  Eigen::Index found = -1;
  for (std::int32_t w : bm.b_members[static_cast<size_t>(j1)]) {
    if (!s.typ_uz.test({cb.words.row(w).data(), zSeq}, cfg.n)) continue;
    if (found < 0) {
      found = w;
    } else if (!std::equal(cb.words.row(w).data(), cb.words.row(w).data() + cfg.n,
                           cb.words.row(found).data())) {
      r.status = DecodeStatus::kAmbiguousCodeword;
      return r;
    }
  }
  if (found < 0) return r;  // kNoCodeword

  const Eigen::Index ny = cfg.source.axes[1].size;
  std::vector<std::int32_t> cand(static_cast<size_t>(cfg.n));
  std::int64_t hit = -1;
  if (j2 <= 0 || j2 > bm.c_bins) {
    r.status = DecodeStatus::kNoSequence;
    return r;
  }
  for (std::int64_t yid : bm.c_members[static_cast<size_t>(j2)]) {
    sequenceFromId(yid, cfg.n, ny, cand.data());
    if (s.typ_yuz.test({cand.data(), cb.words.row(found).data(), zSeq}, cfg.n)) {
      if (hit >= 0) {
        r.status = DecodeStatus::kAmbiguousSequence;
        return r;
      }
      hit = yid;
    }
  }
  if (hit < 0) {
    r.status = DecodeStatus::kNoSequence;
    return r;
  }
  r.status = DecodeStatus::kOk;
  r.y_hat.resize(static_cast<size_t>(cfg.n));
  sequenceFromId(hit, cfg.n, ny, r.y_hat.data());
  return r;
}

struct TrialReport {
  int trials = 0;
  std::int64_t errors = 0;
  std::int64_t encode_failures = 0;
  std::int64_t no_codeword = 0, ambiguous_codeword = 0;
  std::int64_t no_sequence = 0, ambiguous_sequence = 0;
  double error_rate = std::numeric_limits<double>::quiet_NaN();
  double encode_failure_rate = std::numeric_limits<double>::quiet_NaN();
  double equivocation = std::numeric_limits<double>::quiet_NaN();  // exact mode only
  // Parameter echo.
  int n = 0;
  double eps = 0, delta = 0;
  std::uint64_t seed = 0;
  std::int64_t codebook_count = 0, b_bins = 0, c_bins = 0;
};

/// Monte Carlo error measurement: draw i.i.d. source blocks, run the
/// encoder/decoder pair, count mismatches. Trials are independent counter
/// streams, so reports are identical under any worker count.
inline TrialReport runTrials(const SimConfig& cfg, const SchemeStats& s, const Codebook& cb,
                             const BinMap& bm, int jobs = 1) {
  TrialReport rep;
  rep.trials = cfg.trials;
  rep.n = cfg.n;
  rep.eps = cfg.eps;
  rep.delta = cfg.delta();
  rep.seed = cfg.seed;
  rep.codebook_count = cb.count;
  rep.b_bins = bm.b_bins;
  rep.c_bins = bm.c_bins;
  if (cfg.trials <= 0) return rep;

  const Eigen::VectorXd& p = cfg.source.p;
  const Eigen::Index ny = cfg.source.axes[1].size;
  const Eigen::Index nz = cfg.source.axes[2].size;
  const Eigen::Index ne = cfg.source.axes[3].size;

  // Outcome codes per trial, reduced in index order afterwards.
  std::vector<std::int8_t> outcome(static_cast<size_t>(cfg.trials));
  parallelFor(static_cast<size_t>(cfg.trials), jobs, [&](std::size_t t) {
    CounterRng rng(cfg.seed, kStreamTrials, t);
    std::vector<std::int32_t> ys(static_cast<size_t>(cfg.n)), zs(static_cast<size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) {
      Eigen::Index cell = rng.sampleDiscrete(p);
      Eigen::Index e = cell % ne;
      Eigen::Index zc = (cell / ne) % nz;
      Eigen::Index yc = (cell / (ne * nz)) % ny;
      (void)e;
      ys[static_cast<size_t>(i)] = static_cast<std::int32_t>(yc);
      zs[static_cast<size_t>(i)] = static_cast<std::int32_t>(zc);
    }
    EncodeResult er = encode(ys.data(), cfg, s, cb, bm);
    if (!er.ok) {
      outcome[t] = 1;  // encode failure
      return;
    }
    DecodeResult dr = decode(er.j1, er.j2, zs.data(), cfg, s, cb, bm);
    if (dr.status == DecodeStatus::kOk &&
        std::equal(dr.y_hat.begin(), dr.y_hat.end(), ys.begin())) {
      outcome[t] = 0;
    } else {
      switch (dr.status) {
        case DecodeStatus::kOk: outcome[t] = 2; break;  // wrong sequence
        case DecodeStatus::kNoCodeword: outcome[t] = 3; break;
        case DecodeStatus::kAmbiguousCodeword: outcome[t] = 4; break;
        case DecodeStatus::kNoSequence: outcome[t] = 5; break;
        case DecodeStatus::kAmbiguousSequence: outcome[t] = 6; break;
      }
    }
  });
  for (std::int8_t o : outcome) {
    if (o != 0) ++rep.errors;
    if (o == 1) ++rep.encode_failures;
    if (o == 3) ++rep.no_codeword;
    if (o == 4) ++rep.ambiguous_codeword;
    if (o == 5) ++rep.no_sequence;
    if (o == 6) ++rep.ambiguous_sequence;
  }
  rep.error_rate = static_cast<double>(rep.errors) / cfg.trials;
  rep.encode_failure_rate = static_cast<double>(rep.encode_failures) / cfg.trials;
  return rep;
}

/// (1/n) H(X^n | J1, J2, E^n) for the fixed codebook and bin maps, by
/// exhaustive enumeration: the encoder map is deterministic, so the joint
/// over (x^n, e^n, j1, j2) is a sum over the y^n in each message group.
/// Encode failures land in the reserved group J1 = 0.
inline double exactEquivocation(const SimConfig& cfg, const SchemeStats& s,
                                const Codebook& cb, const BinMap& bm) {
  requireSourceAxes(cfg.source);
  const Eigen::Index nx = cfg.source.axes[0].size;
  const Eigen::Index ny = cfg.source.axes[1].size;
  const Eigen::Index ne = cfg.source.axes[3].size;
  double states = std::pow(static_cast<double>(nx * ny * ne), cfg.n);
  if (!(states <= static_cast<double>(cfg.state_guard)))
    throw Error("exact equivocation state count exceeds the guard; reduce n or raise the guard");

  // Per-symbol kernel P(x,e|y) and P(y).
  JointDist pxye = marginal(cfg.source, {"x", "y", "e"});
  JointDist py = marginal(cfg.source, {"y"});
  Eigen::MatrixXd kern(ny, nx * ne);
  for (Eigen::Index y = 0; y < ny; ++y)
    for (Eigen::Index x = 0; x < nx; ++x)
      for (Eigen::Index e = 0; e < ne; ++e)
        kern(y, x * ne + e) =
            py.p[y] > 0 ? pxye.p[(x * ny + y) * ne + e] / py.p[y] : 0.0;

  const std::int64_t nseq = sequenceCount(ny, cfg.n);
  // Group sequences by the transmitted message (j1, j2).
  std::map<std::pair<std::int32_t, std::int64_t>, std::vector<std::int64_t>> groups;
  std::vector<std::int32_t> yseq(static_cast<size_t>(cfg.n));
  for (std::int64_t yid = 0; yid < nseq; ++yid) {
    sequenceFromId(yid, cfg.n, ny, yseq.data());
    EncodeResult er = encode(yseq.data(), cfg, s, cb, bm);
    groups[{er.j1, er.j2}].push_back(yid);
  }

  // Map from interleaved (x_i,e_i) product index to the e^n key.
  std::int64_t xeLen = 1, eLen = 1;
  for (int i = 0; i < cfg.n; ++i) {
    xeLen *= nx * ne;
    eLen *= ne;
  }
  std::vector<std::int64_t> eKey(static_cast<size_t>(xeLen));
  for (std::int64_t f = 0; f < xeLen; ++f) {
    std::int64_t rem = f, ek = 0, place = 1;
    for (int i = cfg.n - 1; i >= 0; --i) {
      std::int64_t cell = rem % (nx * ne);
      rem /= nx * ne;
      ek += (cell % ne) * place;
      place *= ne;
    }
    eKey[static_cast<size_t>(f)] = ek;
  }

  KahanSum hTotal;
  Eigen::VectorXd tgroup(xeLen), acc(eLen), row;
  for (const auto& [key, members] : groups) {
    tgroup.setZero();
    for (std::int64_t yid : members) {
      sequenceFromId(yid, cfg.n, ny, yseq.data());
      double w = 1.0;
      for (int i = 0; i < cfg.n; ++i) w *= py.p[yseq[static_cast<size_t>(i)]];
      if (w <= 0) continue;
      // Iterated Kronecker product of the per-symbol kernels.
      row.resize(1);
      row[0] = w;
      for (int i = 0; i < cfg.n; ++i) {
        Eigen::VectorXd next(row.size() * nx * ne);
        for (Eigen::Index a = 0; a < row.size(); ++a)
          for (Eigen::Index b = 0; b < nx * ne; ++b)
            next[a * nx * ne + b] = row[a] * kern(yseq[static_cast<size_t>(i)], b);
        row.swap(next);
      }
      tgroup += row;
    }
    acc.setZero();
    for (std::int64_t f = 0; f < xeLen; ++f)
      acc[eKey[static_cast<size_t>(f)]] += tgroup[f];
    for (std::int64_t f = 0; f < xeLen; ++f) {
      double t = tgroup[f];
      if (t > 0) hTotal.add(-t * std::log2(t / acc[eKey[static_cast<size_t>(f)]]));
    }
  }
  return hTotal.value() / cfg.n;
}

/// Slepian-Wolf baseline: the same pipeline with the single constant
/// codeword; the sequence bins land at 2^{n(H(Y|Z)+eps)}.
inline TrialReport swBaseline(SimConfig cfg, int jobs = 1) {
  const Eigen::Index nu = cfg.u_channel.to.size;
  if (nu != 1) {
    // Accept |U| > 1 only when every row is the same point mass.
    Eigen::Index col = -1;
    for (Eigen::Index c = 0; c < nu; ++c)
      if (cfg.u_channel.rows(0, c) == 1.0) col = c;
    bool constant = col >= 0;
    for (Eigen::Index r = 0; constant && r < cfg.u_channel.rows.rows(); ++r)
      constant = cfg.u_channel.rows(r, col) == 1.0;
    if (!constant) throw Error("sw_baseline requires a constant u-channel");
  }
  cfg.u_channel = constantUChannel(cfg.source.axes[1].size);
  SchemeStats s = buildSchemeStats(cfg);
  Codebook cb = buildCodebook(cfg, s);
  cb.count = 1;
  cb.words.conservativeResize(1, cfg.n);
  BinMap bm = buildBinMaps(cfg, s, cb);
  return runTrials(cfg, s, cb, bm, jobs);
}

}  // namespace rateq
