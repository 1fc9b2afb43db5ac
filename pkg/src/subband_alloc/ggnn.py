"""Gated graph neural network for sub-band allocation.

Message passing aggregates neighbor embeddings through a per-layer linear
transform; a GRU updates each node's embedding; a softmax readout maps the
final embedding to a distribution over sub-bands.  Training is unsupervised,
minimizing a Potts-style loss that charges each edge the dot product of its
endpoints' soft assignments.
"""

import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import autodiff as ad
from .autodiff import Adam, Tensor
from .baselines import Allocation

MODEL_MAGIC = b"SBALGGNN"
MODEL_VERSION = 1

_INIT_SCHEMES = {"constant": 0, "random": 1}
_INIT_SCHEME_NAMES = {v: k for k, v in _INIT_SCHEMES.items()}


class DatasetEmpty(Exception):
    pass


class FormatVersionMismatch(Exception):
    pass


class CorruptFile(Exception):
    pass


@dataclass
class GgnnConfig:
    n_layers: int = 10
    embedding_dim: int = 64
    n_subbands: int = 5
    init_scheme: str = "random"
    init_seed: int = 0

    def __post_init__(self):
        if self.n_layers < 1:
            raise ValueError("n_layers must be >= 1")
        if self.embedding_dim < self.n_subbands:
            raise ValueError("embedding_dim must be >= n_subbands")
        if self.init_scheme not in _INIT_SCHEMES:
            raise ValueError(f"init_scheme must be one of {sorted(_INIT_SCHEMES)}")


@dataclass
class TrainerConfig:
    batch_size: int = 64
    max_epochs: int = 500
    learning_rate: float = 1e-3
    stop_tolerance: float = 1e-4
    dataset_size: int = 50000

    def __post_init__(self):
        if min(self.batch_size, self.max_epochs, self.dataset_size) < 1:
            raise ValueError("batch_size, max_epochs and dataset_size must be positive")
        if self.learning_rate <= 0 or self.stop_tolerance < 0:
            raise ValueError("learning_rate must be > 0 and stop_tolerance >= 0")


class _Layer:
    """One GGNN layer: aggregation transform + GRU gate parameters."""

    FIELDS = ("agg_w",
              "reset_in_w", "reset_in_b", "reset_hid_w", "reset_hid_b",
              "update_in_w", "update_in_b", "update_hid_w", "update_hid_b",
              "cand_in_w", "cand_in_b", "cand_hid_w", "cand_hid_b")

    def __init__(self, dim, rng):
        bound = 1.0 / np.sqrt(dim)

        def weight():
            return Tensor(rng.uniform(-bound, bound, (dim, dim)), requires_grad=True)

        def bias():
            return Tensor(np.zeros(dim), requires_grad=True)

        self.agg_w = weight()
        self.reset_in_w, self.reset_in_b = weight(), bias()
        self.reset_hid_w, self.reset_hid_b = weight(), bias()
        self.update_in_w, self.update_in_b = weight(), bias()
        self.update_hid_w, self.update_hid_b = weight(), bias()
        self.cand_in_w, self.cand_in_b = weight(), bias()
        self.cand_hid_w, self.cand_hid_b = weight(), bias()

    def parameters(self):
        return [getattr(self, name) for name in self.FIELDS]


class GgnnModel:
    """All trainable parameters; embeddings are row vectors, weights applied
    on the right."""

    def __init__(self, config: GgnnConfig, rng=None):
        self.config = config
        if rng is None:
            rng = np.random.default_rng(config.init_seed)
        dim, k = config.embedding_dim, config.n_subbands
        self.layers = [_Layer(dim, rng) for _ in range(config.n_layers)]
        bound = 1.0 / np.sqrt(dim)
        self.readout_w = Tensor(rng.uniform(-bound, bound, (dim, k)), requires_grad=True)
        self.readout_b = Tensor(np.zeros(k), requires_grad=True)

    def parameters(self):
        params = []
        for layer in self.layers:
            params.extend(layer.parameters())
        params.append(self.readout_w)
        params.append(self.readout_b)
        return params

    def forward(self, adjacency, embeddings: Tensor) -> Tensor:
        """Differentiable forward pass; returns the N x K soft assignment."""
        emb = embeddings
        for layer in self.layers:
            emb = layer_forward(adjacency, emb, layer)
        return readout(emb, self.readout_w, self.readout_b)

    def infer(self, adjacency, embeddings: np.ndarray) -> np.ndarray:
        """Plain-numpy forward pass (no tape); same math as forward()."""
        adj = adjacency if sp.issparse(adjacency) else sp.csr_matrix(
            np.asarray(adjacency, dtype=np.float64))
        adj = adj.astype(np.float64)
        emb = np.asarray(embeddings, dtype=np.float64)
        for layer in self.layers:
            msg = (adj @ emb) @ layer.agg_w.data
            r = _np_sigmoid(msg @ layer.reset_in_w.data + layer.reset_in_b.data
                            + emb @ layer.reset_hid_w.data + layer.reset_hid_b.data)
            u = _np_sigmoid(msg @ layer.update_in_w.data + layer.update_in_b.data
                            + emb @ layer.update_hid_w.data + layer.update_hid_b.data)
            o = np.tanh(msg @ layer.cand_in_w.data + layer.cand_in_b.data
                        + r * (emb @ layer.cand_hid_w.data + layer.cand_hid_b.data))
            emb = (1.0 - u) * o + u * emb
        logits = emb @ self.readout_w.data + self.readout_b.data
        z = np.exp(logits - logits.max(axis=1, keepdims=True))
        return z / z.sum(axis=1, keepdims=True)

    # ------------------------------------------------------------------
    # versioned binary serialization (little-endian float64 parameters)

    def save(self, path) -> None:
        cfg = self.config
        header = MODEL_MAGIC + struct.pack(
            "<IIIIBq", MODEL_VERSION, cfg.n_layers, cfg.embedding_dim,
            cfg.n_subbands, _INIT_SCHEMES[cfg.init_scheme], cfg.init_seed)
        with open(path, "wb") as f:
            f.write(header)
            for p in self.parameters():
                f.write(np.ascontiguousarray(p.data, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "GgnnModel":
        with open(path, "rb") as f:
            blob = f.read()
        header_len = len(MODEL_MAGIC) + struct.calcsize("<IIIIBq")
        if len(blob) < header_len or blob[: len(MODEL_MAGIC)] != MODEL_MAGIC:
            raise CorruptFile(f"{path}: not a GGNN model file")
        version, n_layers, dim, k, scheme_code, init_seed = struct.unpack(
            "<IIIIBq", blob[len(MODEL_MAGIC): header_len])
        if version != MODEL_VERSION:
            raise FormatVersionMismatch(f"{path}: version {version}, expected {MODEL_VERSION}")
        if scheme_code not in _INIT_SCHEME_NAMES:
            raise CorruptFile(f"{path}: unknown init scheme code {scheme_code}")
        config = GgnnConfig(n_layers=n_layers, embedding_dim=dim, n_subbands=k,
                            init_scheme=_INIT_SCHEME_NAMES[scheme_code], init_seed=init_seed)
        model = cls(config, rng=np.random.default_rng(0))
        offset = header_len
        for p in model.parameters():
            nbytes = p.data.size * 8
            if offset + nbytes > len(blob):
                raise CorruptFile(f"{path}: truncated parameter block")
            p.data = np.frombuffer(blob, dtype="<f8", count=p.data.size,
                                   offset=offset).reshape(p.data.shape).astype(np.float64)
            offset += nbytes
        if offset != len(blob):
            raise CorruptFile(f"{path}: {len(blob) - offset} trailing bytes")
        return model


def _np_sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def init_embeddings(graph_or_n, config: GgnnConfig, seed=None, rng=None) -> np.ndarray:
    """Initial node embeddings.

    The input graphs carry no node attributes, so the default draws random
    Normal(0, 1/dim) rows to break symmetry between structurally equivalent
    nodes; "constant" gives every node the identical row (ablation switch).
    """
    n = graph_or_n if isinstance(graph_or_n, (int, np.integer)) else graph_or_n.n_nodes
    dim = config.embedding_dim
    if config.init_scheme == "constant":
        return np.full((n, dim), 1.0 / np.sqrt(dim))
    if rng is None:
        rng = np.random.default_rng(config.init_seed if seed is None else seed)
    return rng.standard_normal((n, dim)) / np.sqrt(dim)


def layer_forward(adjacency, embeddings: Tensor, layer: _Layer) -> Tensor:
    """One message-passing + GRU update step over all nodes at once."""
    emb = embeddings
    msg = ad.scatter_sum(emb, adjacency) @ layer.agg_w
    r = ad.sigmoid(msg @ layer.reset_in_w + layer.reset_in_b
                   + emb @ layer.reset_hid_w + layer.reset_hid_b)
    u = ad.sigmoid(msg @ layer.update_in_w + layer.update_in_b
                   + emb @ layer.update_hid_w + layer.update_hid_b)
    o = ad.tanh(msg @ layer.cand_in_w + layer.cand_in_b
                + r * (emb @ layer.cand_hid_w + layer.cand_hid_b))
    one = Tensor(np.ones(u.shape))
    return (one - u) * o + u * emb


def readout(embeddings: Tensor, readout_w: Tensor, readout_b: Tensor) -> Tensor:
    """Row-wise softmax projection of embeddings onto the K sub-bands."""
    return ad.softmax_rows(embeddings @ readout_w + readout_b)


def potts_loss(graph_or_adjacency, theta):
    """Sum over undirected edges (each counted once) of the endpoint
    assignment dot products.  On hard one-hot rows this equals the number
    of monochromatic edges.  Accepts a Tensor (differentiable) or ndarray."""
    adj = getattr(graph_or_adjacency, "adjacency", graph_or_adjacency)
    if isinstance(theta, Tensor):
        return 0.5 * ad.tensor_sum(ad.scatter_sum(theta, adj) * theta)
    theta = np.asarray(theta, dtype=np.float64)
    if sp.issparse(adj):
        return 0.5 * float(((adj.astype(np.float64) @ theta) * theta).sum())
    return 0.5 * float(((np.asarray(adj, dtype=np.float64) @ theta) * theta).sum())


def predict(graph, model: GgnnModel, embeddings=None, seed=None) -> Allocation:
    """Hard sub-band decision: row-wise argmax of the soft assignment,
    ties to the lowest sub-band index."""
    if embeddings is None:
        embeddings = init_embeddings(graph.n_nodes, model.config, seed=seed)
    theta = model.infer(graph.adjacency, embeddings)
    return Allocation(subband=np.argmax(theta, axis=1), n_subbands=model.config.n_subbands)


@dataclass
class TrainResult:
    model: GgnnModel
    loss_history: list  # mean per-graph loss per epoch
    epochs_run: int
    stopped_early: bool


def train(dataset, ggnn_config: GgnnConfig, trainer_config: TrainerConfig,
          seed: int = 0) -> TrainResult:
    """Unsupervised mini-batch training on a dataset of interference graphs.

    Each graph gets a fixed random initial embedding; batches run as one
    block-diagonal graph.  Stops when the epoch-mean loss improvement falls
    below stop_tolerance, when the loss hits its lower bound of zero, or at
    max_epochs.  Deterministic per seed.
    """
    dataset = list(dataset)
    if not dataset:
        raise DatasetEmpty("training dataset is empty")
    ks = {g.n_subbands for g in dataset}
    if len(ks) > 1:
        raise ValueError(f"mixed sub-band counts in dataset: {sorted(ks)}")
    if ks.pop() != ggnn_config.n_subbands:
        raise ValueError("dataset sub-band count does not match the model config")

    param_ss, emb_ss, shuffle_ss = np.random.SeedSequence(seed).spawn(3)
    model = GgnnModel(ggnn_config, rng=np.random.default_rng(param_ss))
    emb_rng = np.random.default_rng(emb_ss)
    embeddings = [init_embeddings(g.n_nodes, ggnn_config, rng=emb_rng) for g in dataset]
    adjacencies = [sp.csr_matrix(g.adjacency.astype(np.float64)) for g in dataset]

    optimizer = Adam(model.parameters(), lr=trainer_config.learning_rate)
    shuffle_rng = np.random.default_rng(shuffle_ss)
    history = []
    stopped_early = False
    for epoch in range(trainer_config.max_epochs):
        order = shuffle_rng.permutation(len(dataset))
        loss_total = 0.0
        for start in range(0, len(dataset), trainer_config.batch_size):
            idx = order[start: start + trainer_config.batch_size]
            adj = adjacencies[idx[0]] if len(idx) == 1 else sp.block_diag(
                [adjacencies[i] for i in idx], format="csr")
            emb = Tensor(np.vstack([embeddings[i] for i in idx]))
            theta = model.forward(adj, emb)
            batch_sum = potts_loss(adj, theta)
            loss = batch_sum * (1.0 / len(idx))
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            loss_total += batch_sum.item()
        epoch_loss = loss_total / len(dataset)
        history.append(epoch_loss)
        if epoch_loss == 0.0:
            stopped_early = True
            break
        if epoch > 0 and history[-2] - history[-1] < trainer_config.stop_tolerance:
            stopped_early = True
            break
    return TrainResult(model=model, loss_history=history,
                       epochs_run=len(history), stopped_early=stopped_early)


def save_loss_history(path, history) -> None:
    with open(path, "w") as f:
        f.write("epoch,mean_loss\n")
        for epoch, loss in enumerate(history, start=1):
            f.write(f"{epoch},{loss!r}\n")
