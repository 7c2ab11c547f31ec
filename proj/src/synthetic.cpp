#include "leccr/synthetic.hpp"

#include <cmath>
#include <map>

#include "leccr/errors.hpp"
#include "leccr/rng.hpp"

namespace leccr {

namespace {

// Feature files store f32, so generated values are quantized up front and
// a write/read cycle is an exact identity.
void quantize_f32(DenseMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = double(float(m.data()[i]));
}

// Cross-dimension modality maps are a fixed function of the dims alone, so
// independently seeded datasets (train/test splits) stay mutually consistent.
const DenseMatrix& modality_map(std::size_t d_in, std::size_t d_out) {
  static std::map<std::pair<std::size_t, std::size_t>, DenseMatrix> cache;
  auto key = std::make_pair(d_in, d_out);
  auto it = cache.find(key);
  if (it == cache.end()) {
    Rng rng(0x5eca11u ^ (std::uint64_t(d_in) << 20) ^ std::uint64_t(d_out));
    it = cache.emplace(key, DenseMatrix::gaussian(d_in, d_out, 1.0 / std::sqrt(double(d_in)), rng))
             .first;
  }
  return it->second;
}

std::vector<double> map_to(const std::vector<double>& x, std::size_t d_out) {
  if (x.size() == d_out) return x;
  const DenseMatrix& p = modality_map(x.size(), d_out);
  std::vector<double> y(d_out, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < d_out; ++j) y[j] += x[i] * p(i, j);
  return y;
}

void add_noise(std::vector<double>& x, double sigma, Rng& rng) {
  if (sigma == 0.0) return;
  const double s = sigma / std::sqrt(double(x.size()));
  for (double& v : x) v += rng.normal(0.0, s);
}

std::vector<double> unit_gaussian(std::size_t d, Rng& rng) {
  std::vector<double> v(d);
  double sq = 0.0;
  for (double& x : v) {
    x = rng.normal();
    sq += x * x;
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
  return v;
}

DenseMatrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  DenseMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  quantize_f32(m);
  return m;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_items == 0) throw config_error("synthetic spec: n_items must be >= 1");
  if (sigma_en < 0.0 || sigma_noneng < 0.0)
    throw config_error("synthetic spec: noise levels must be >= 0");
  if (sigma_noneng < sigma_en)
    throw config_error("synthetic spec: sigma_noneng must be >= sigma_en");
  if (facets < 1) throw config_error("synthetic spec: facets must be >= 1");
  if (len_v < 1 || len_s < 1 || len_t < 1 || len_c < 1)
    throw config_error("synthetic spec: every sequence length must be >= 1");
  if (dim_v < 1 || dim_s < 1 || dim_t < 1 || dim_c < 1)
    throw config_error("synthetic spec: every feature dim must be >= 1");
}

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  Dataset ds;
  ds.items.reserve(spec.n_items);
  Rng root(seed ^ 0x1ecc9u);
  // Extra noise that turns the English noise level into the non-English one.
  const double sigma_extra =
      std::sqrt(std::max(0.0, spec.sigma_noneng * spec.sigma_noneng -
                                  spec.sigma_en * spec.sigma_en));

  for (std::size_t i = 0; i < spec.n_items; ++i) {
    Rng rng = root.fork(i);
    TripletExample ex;
    ex.id = "item-" + std::to_string(i);

    const std::vector<double> latent = unit_gaussian(spec.dim_v, rng);
    std::vector<std::vector<double>> facets(spec.facets);
    for (std::size_t f = 0; f < spec.facets; ++f) {
      std::vector<double> dir = latent;
      std::vector<double> jitter = unit_gaussian(spec.dim_v, rng);
      for (std::size_t j = 0; j < dir.size(); ++j) dir[j] += spec.facet_jitter * jitter[j];
      double sq = 0.0;
      for (double v : dir) sq += v * v;
      const double inv = 1.0 / std::sqrt(sq);
      for (double& v : dir) v *= inv;
      facets[f] = std::move(dir);
    }
    std::vector<double> facet_mean(spec.dim_v, 0.0);
    for (const auto& f : facets)
      for (std::size_t j = 0; j < f.size(); ++j) facet_mean[j] += f[j] / double(spec.facets);

    // Visual: [CLS] = facet mean, then facet observations; every token
    // carries the observation noise.
    std::vector<std::vector<double>> vrows(spec.len_v);
    vrows[0] = facet_mean;
    add_noise(vrows[0], spec.token_noise, rng);
    for (std::size_t k = 1; k < spec.len_v; ++k) {
      vrows[k] = facets[(k - 1) % spec.facets];
      add_noise(vrows[k], spec.token_noise, rng);
    }
    ex.visual = {rows_to_matrix(vrows), Modality::visual, 0};

    // English: [CLS] = latent + sigma_en noise; tail tokens are noisy facets.
    std::vector<std::vector<double>> srows(spec.len_s);
    srows[0] = map_to(latent, spec.dim_s);
    add_noise(srows[0], spec.sigma_en, rng);
    for (std::size_t k = 1; k < spec.len_s; ++k) {
      srows[k] = map_to(facets[(k - 1) % spec.facets], spec.dim_s);
      add_noise(srows[k], spec.sigma_en, rng);
    }
    ex.english = {rows_to_matrix(srows), Modality::english, 0};

    // Non-English: the realized English tokens plus the extra degradation.
    std::vector<std::vector<double>> trows(spec.len_t);
    for (std::size_t k = 0; k < spec.len_t; ++k) {
      trows[k] = map_to(srows[k % spec.len_s], spec.dim_t);
      add_noise(trows[k], sigma_extra, rng);
    }
    ex.non_english = {rows_to_matrix(trows), Modality::non_english, 0};

    // Description: clean facet enumeration behind a [CLS] summary.
    std::vector<std::vector<double>> crows(spec.len_c);
    crows[0] = map_to(facet_mean, spec.dim_c);
    for (std::size_t k = 1; k < spec.len_c; ++k)
      crows[k] = map_to(facets[(k - 1) % spec.facets], spec.dim_c);
    ex.description = {rows_to_matrix(crows), Modality::description, 0};

    ds.items.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace leccr
