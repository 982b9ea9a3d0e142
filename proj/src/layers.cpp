#include "hetlink/layers.hpp"

#include <cmath>

namespace hetlink {

const char* encoder_kind_name(EncoderKind k) {
  return k == EncoderKind::HGCN ? "hgcn" : "hgat";
}

std::optional<EncoderKind> parse_encoder_kind(const std::string& s) {
  if (s == "hgcn") return EncoderKind::HGCN;
  if (s == "hgat") return EncoderKind::HGAT;
  return std::nullopt;
}

const char* relview_name(RelView v) {
  switch (v) {
    case RelView::DDI: return "ddi";
    case RelView::SIM: return "sim";
    case RelView::DPI_IntoDrug: return "dpi_into_drug";
    case RelView::DPI_IntoProtein: return "dpi_into_protein";
    case RelView::PPI: return "ppi";
  }
  return "?";
}

Rel relview_rel(RelView v) {
  switch (v) {
    case RelView::DDI: return Rel::DDI;
    case RelView::SIM: return Rel::SIM;
    case RelView::PPI: return Rel::PPI;
    default: return Rel::DPI;
  }
}

NodeType relview_rows(RelView v) {
  switch (v) {
    case RelView::DDI:
    case RelView::SIM:
    case RelView::DPI_IntoDrug:
      return NodeType::Drug;
    default:
      return NodeType::Protein;
  }
}

NodeType relview_cols(RelView v) {
  switch (v) {
    case RelView::DDI:
    case RelView::SIM:
    case RelView::DPI_IntoProtein:
      return NodeType::Drug;
    default:
      return NodeType::Protein;
  }
}

std::vector<std::pair<std::string, Tensor>> ModelParams::named() const {
  std::vector<std::pair<std::string, Tensor>> out;
  for (size_t l = 0; l < layers.size(); ++l) {
    const std::string prefix = "enc" + std::to_string(l) + ".";
    for (RelView v : kAllRelViews) {
      out.emplace_back(prefix + "w." + relview_name(v),
                       layers[l].w_rel[static_cast<size_t>(v)]);
      if (kind == EncoderKind::HGAT) {
        out.emplace_back(prefix + "a." + relview_name(v),
                         layers[l].attn[static_cast<size_t>(v)]);
      }
    }
    for (NodeType t : {NodeType::Drug, NodeType::Protein}) {
      out.emplace_back(prefix + "self." + node_type_name(t),
                       layers[l].w_self[static_cast<size_t>(t)]);
      out.emplace_back(prefix + "bias." + node_type_name(t),
                       layers[l].bias[static_cast<size_t>(t)]);
    }
  }
  out.emplace_back("dec.w1", dec_w1);
  out.emplace_back("dec.b1", dec_b1);
  out.emplace_back("dec.w2", dec_w2);
  out.emplace_back("dec.b2", dec_b2);
  out.emplace_back("dec.w3", dec_w3);
  out.emplace_back("dec.b3", dec_b3);
  return out;
}

ModelParams make_params(EncoderKind kind, const ModelDims& dims) {
  if (dims.d_in_drug == 0 || dims.d_in_protein == 0 || dims.d_h == 0 ||
      dims.m_hidden == 0 || dims.class_count == 0) {
    throw config_error("make_params: all model dimensions must be positive");
  }
  ModelParams p;
  p.kind = kind;
  p.dims = dims;
  for (size_t l = 0; l < p.layers.size(); ++l) {
    auto d_in = [&](NodeType t) { return l == 0 ? dims.d_in(t) : dims.d_h; };
    for (RelView v : kAllRelViews) {
      const size_t vi = static_cast<size_t>(v);
      p.layers[l].w_rel[vi] = Tensor({d_in(relview_cols(v)), dims.d_h}, true);
      if (kind == EncoderKind::HGAT) {
        p.layers[l].attn[vi] = Tensor({2 * dims.d_h}, true);
      }
    }
    for (NodeType t : {NodeType::Drug, NodeType::Protein}) {
      const size_t ti = static_cast<size_t>(t);
      p.layers[l].w_self[ti] = Tensor({d_in(t), dims.d_h}, true);
      p.layers[l].bias[ti] = Tensor({dims.d_h}, true);
    }
  }
  p.dec_w1 = Tensor({2 * dims.d_h, dims.m_hidden}, true);
  p.dec_b1 = Tensor({dims.m_hidden}, true);
  p.dec_w2 = Tensor({dims.m_hidden, dims.m_hidden}, true);
  p.dec_b2 = Tensor({dims.m_hidden}, true);
  p.dec_w3 = Tensor({dims.m_hidden, dims.class_count + 1}, true);
  p.dec_b3 = Tensor({dims.class_count + 1}, true);
  return p;
}

namespace {

// Shared node update: self transform + per-relation aggregates + bias, ReLU.
// `aggregate` produces one term per relation view or an undefined tensor to
// skip it.
template <typename AggregateFn>
TypedFeatures node_update(const TypedFeatures& h, const LayerParams& p,
                          AggregateFn&& aggregate) {
  std::array<Tensor, 2> self;
  for (NodeType t : {NodeType::Drug, NodeType::Protein}) {
    const size_t ti = static_cast<size_t>(t);
    self[ti] = matmul(h.of(t), p.w_self[ti]);
  }
  std::array<Tensor, 2> acc = self;
  for (RelView v : kAllRelViews) {
    const size_t ti = static_cast<size_t>(relview_rows(v));
    Tensor term = aggregate(v, self[ti]);
    if (term.defined()) acc[ti] = add(acc[ti], term);
  }
  TypedFeatures out;
  out.drug = relu(add_rowvec(acc[0], p.bias[0]));
  out.protein = relu(add_rowvec(acc[1], p.bias[1]));
  return out;
}

}  // namespace

TypedFeatures hetero_gcn_layer(const HeteroGraph& g, const TypedFeatures& h,
                               const LayerParams& p, bool sim_weighted) {
  return node_update(h, p, [&](RelView v, const Tensor&) -> Tensor {
    const Csr& adj = g.view(relview_rel(v), relview_rows(v));
    if (adj.arcs() == 0) return {};
    Tensor m = matmul(h.of(relview_cols(v)), p.w_rel[static_cast<size_t>(v)]);
    return neighbor_mean(adj, m, v == RelView::SIM ? sim_weighted : true);
  });
}

TypedFeatures hetero_gat_layer(const HeteroGraph& g, const TypedFeatures& h,
                               const LayerParams& p, double leaky_slope) {
  return node_update(h, p, [&](RelView v, const Tensor& self_rows) -> Tensor {
    const Csr& adj = g.view(relview_rel(v), relview_rows(v));
    if (adj.arcs() == 0) return {};
    const size_t vi = static_cast<size_t>(v);
    Tensor m = matmul(h.of(relview_cols(v)), p.w_rel[vi]);
    const size_t d = m.cols();
    // split the attention vector into its center/neighbor halves
    Tensor a2 = reshape(p.attn[vi], {2, d});
    Tensor a_dst = reshape(gather_rows(a2, {0}), {d});
    Tensor a_src = reshape(gather_rows(a2, {1}), {d});
    Tensor s_dst = matvec(self_rows, a_dst);
    Tensor s_src = matvec(m, a_src);
    Tensor e = leaky_relu(edge_logits(adj, s_dst, s_src), leaky_slope);
    Tensor alpha = segment_softmax(adj, e);
    return edge_weighted_sum(adj, m, alpha);
  });
}

TypedFeatures encode(const HeteroGraph& g, const TypedFeatures& features,
                     const ModelParams& params) {
  TypedFeatures h = features;
  for (const LayerParams& layer : params.layers) {
    h = params.kind == EncoderKind::HGCN
            ? hetero_gcn_layer(g, h, layer, params.sim_weighted)
            : hetero_gat_layer(g, h, layer, params.leaky_slope);
  }
  return h;
}

namespace {

Tensor mlp(const Tensor& z, const ModelParams& p) {
  Tensor h1 = relu(add_rowvec(matmul(z, p.dec_w1), p.dec_b1));
  Tensor h2 = relu(add_rowvec(matmul(h1, p.dec_w2), p.dec_b2));
  return add_rowvec(matmul(h2, p.dec_w3), p.dec_b3);
}

}  // namespace

Tensor decode_pair_batch(const Tensor& h_u, const Tensor& h_v, const ModelParams& p) {
  if (h_u.shape() != h_v.shape()) {
    throw shape_error("decode: embedding batches must have equal shape");
  }
  if (h_u.cols() != p.dims.d_h) {
    throw shape_error("decode: embedding width " + std::to_string(h_u.cols()) +
                      " does not match d_h " + std::to_string(p.dims.d_h));
  }
  Tensor fwd = mlp(concat_cols(h_u, h_v), p);
  Tensor rev = mlp(concat_cols(h_v, h_u), p);
  return scale(add(fwd, rev), 0.5);
}

Tensor decode_pair(const Tensor& h_u, const Tensor& h_v, const ModelParams& p) {
  if (h_u.rank() != 1 || h_v.rank() != 1) {
    throw shape_error("decode_pair: expected rank-1 embeddings");
  }
  Tensor u = reshape(h_u, {1, h_u.dim(0)});
  Tensor v = reshape(h_v, {1, h_v.dim(0)});
  Tensor logits = decode_pair_batch(u, v, p);
  return reshape(logits, {logits.numel()});
}

std::vector<double> predict_edge(const ModelParams& params, const HeteroGraph& g,
                                 const TypedFeatures& features,
                                 const std::string& drug_a, const std::string& drug_b) {
  const NodeTable& drugs = g.nodes(NodeType::Drug);
  const size_t u = drugs.require(drug_a);
  const size_t v = drugs.require(drug_b);
  if (u == v) {
    throw contract_error("predict: needs two distinct drugs, got " + drug_a + " twice");
  }
  TypedFeatures h = encode(g, features, params);
  Tensor hu = gather_rows(h.drug, {u});
  Tensor hv = gather_rows(h.drug, {v});
  Tensor probs = softmax_rows(decode_pair_batch(hu, hv, params));
  return {probs.data().begin(), probs.data().end()};
}

}  // namespace hetlink
