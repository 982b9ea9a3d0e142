#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hetlink/graph.hpp"
#include "hetlink/tensor.hpp"

namespace hetlink {

enum class EncoderKind { HGCN = 0, HGAT = 1 };

const char* encoder_kind_name(EncoderKind k);
std::optional<EncoderKind> parse_encoder_kind(const std::string& s);

// Message-passing directions, each with its own relation weight. DPI gets one
// weight per direction because drug and protein inputs can have different
// widths at the first layer.
enum class RelView {
  DDI = 0,
  SIM = 1,
  DPI_IntoDrug = 2,     // rows = drugs, neighbors = proteins
  DPI_IntoProtein = 3,  // rows = proteins, neighbors = drugs
  PPI = 4,
};
inline constexpr size_t kRelViews = 5;
inline constexpr std::array<RelView, kRelViews> kAllRelViews = {
    RelView::DDI, RelView::SIM, RelView::DPI_IntoDrug, RelView::DPI_IntoProtein,
    RelView::PPI};

const char* relview_name(RelView v);
Rel relview_rel(RelView v);
NodeType relview_rows(RelView v);  // aggregation target type
NodeType relview_cols(RelView v);  // neighbor (message source) type

struct LayerParams {
  std::array<Tensor, kRelViews> w_rel;  // [d_in(cols type) x d_out]
  std::array<Tensor, kRelViews> attn;   // HGAT only, [2 * d_out]
  std::array<Tensor, 2> w_self;         // per NodeType, [d_in(type) x d_out]
  std::array<Tensor, 2> bias;           // per NodeType, [d_out]
};

struct ModelDims {
  size_t d_in_drug = 0;
  size_t d_in_protein = 0;
  size_t d_h = 64;
  size_t m_hidden = 128;
  size_t class_count = 0;  // C; decoder output width is C+1

  size_t d_in(NodeType t) const {
    return t == NodeType::Drug ? d_in_drug : d_in_protein;
  }
};

struct ModelParams {
  EncoderKind kind = EncoderKind::HGCN;
  ModelDims dims;
  double leaky_slope = 0.01;  // attention logits
  bool sim_weighted = true;   // SIM weights as weighted-mean coefficients
  std::array<LayerParams, 3> layers;
  Tensor dec_w1, dec_b1;  // [2*d_h x m], [m]
  Tensor dec_w2, dec_b2;  // [m x m], [m]
  Tensor dec_w3, dec_b3;  // [m x (C+1)], [C+1]

  // Fixed-order (name, tensor) view over every learnable tensor; the order
  // defines optimizer state slots and the checkpoint layout.
  std::vector<std::pair<std::string, Tensor>> named() const;
};

// Allocates every parameter tensor at its correct shape (zero-filled,
// requires_grad set); initialization and checkpoint loading fill them in.
ModelParams make_params(EncoderKind kind, const ModelDims& dims);

struct TypedFeatures {
  Tensor drug;     // [n_drugs x d]
  Tensor protein;  // [n_proteins x d]

  const Tensor& of(NodeType t) const {
    return t == NodeType::Drug ? drug : protein;
  }
};

// One relational GCN step:
//   h'_v = ReLU(W_self h_v + sum_r mean_{u in N_r(v)} W_r h_u + b)
// with the SIM mean weighted by edge similarity when sim_weighted is set.
TypedFeatures hetero_gcn_layer(const HeteroGraph& g, const TypedFeatures& h,
                               const LayerParams& p, bool sim_weighted = true);

// Same update with attention in place of the mean: per relation,
//   e_vu = LeakyReLU(a^T [W_self h_v || W_r h_u]),  alpha = softmax_u(e),
//   aggregation = sum_u alpha_vu W_r h_u.
TypedFeatures hetero_gat_layer(const HeteroGraph& g, const TypedFeatures& h,
                               const LayerParams& p, double leaky_slope = 0.01);

// Three-layer composition selected by params.kind.
TypedFeatures encode(const HeteroGraph& g, const TypedFeatures& features,
                     const ModelParams& params);

// Order-invariant pair decoder:
//   logits = (MLP([h_u || h_v]) + MLP([h_v || h_u])) / 2
// over [k x d_h] row batches; returns [k x (C+1)].
Tensor decode_pair_batch(const Tensor& h_u, const Tensor& h_v, const ModelParams& p);
// Single pair from rank-1 embeddings; returns [C+1] logits.
Tensor decode_pair(const Tensor& h_u, const Tensor& h_v, const ModelParams& p);

// Full pipeline for one drug pair; returns probabilities over classes 0..C.
std::vector<double> predict_edge(const ModelParams& params, const HeteroGraph& g,
                                 const TypedFeatures& features,
                                 const std::string& drug_a, const std::string& drug_b);

}  // namespace hetlink
