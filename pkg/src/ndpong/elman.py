"""Elman simple recurrent network trained online without unrolling.

Layout follows the classic formulation: logistic hidden and output layers,
a context layer that receives a verbatim copy of the hidden layer after each
step, squared-error loss, and plain per-step gradient descent in which the
context is treated as an ordinary (frozen) input.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np

from .env import (
    BallSensor,
    ConfigError,
    PaddleSensor,
    Response,
    SensorReading,
)

N_INPUT = len(BallSensor) + len(PaddleSensor)
N_OUTPUT = len(Response)
FORMAT_VERSION = 1


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def encode_observation(obs: SensorReading) -> np.ndarray:
    """One-hot pair: ball sensor in slots 0-5, paddle sensor in slots 6-7."""
    x = np.zeros(N_INPUT)
    x[int(obs.ball)] = 1.0
    x[len(BallSensor) + int(obs.paddle)] = 1.0
    return x


def encode_response(response: Response) -> np.ndarray:
    y = np.zeros(N_OUTPUT)
    y[int(response)] = 1.0
    return y


@dataclass
class ElmanNet:
    W_ih: np.ndarray
    W_ch: np.ndarray
    W_ho: np.ndarray
    b_h: np.ndarray
    b_o: np.ndarray
    context_init: float = 0.5
    seed: int | None = None
    hidden: np.ndarray = field(init=False)
    context: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.reset_context()

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.W_ih.shape[0], self.W_ih.shape[1], self.W_ho.shape[1]

    def params(self) -> dict[str, np.ndarray]:
        return {
            "W_ih": self.W_ih,
            "W_ch": self.W_ch,
            "W_ho": self.W_ho,
            "b_h": self.b_h,
            "b_o": self.b_o,
        }

    def copy(self) -> "ElmanNet":
        net = ElmanNet(
            **{k: v.copy() for k, v in self.params().items()},
            context_init=self.context_init,
            seed=self.seed,
        )
        net.hidden = self.hidden.copy()
        net.context = self.context.copy()
        return net

    def reset_context(self) -> "ElmanNet":
        n_hidden = self.W_ih.shape[1]
        self.hidden = np.zeros(n_hidden)
        self.context = np.full(n_hidden, float(self.context_init))
        return self

    def forward(self, x: np.ndarray) -> np.ndarray:
        self.hidden = sigmoid(x @ self.W_ih + self.context @ self.W_ch + self.b_h)
        out = sigmoid(self.hidden @ self.W_ho + self.b_o)
        self.context = self.hidden.copy()
        return out

    def predict_response(self, obs: SensorReading) -> Response:
        return response_from_output(self.forward(encode_observation(obs)))

    def save(self, path) -> None:
        meta = {
            "format": "ndpong-elman",
            "version": FORMAT_VERSION,
            "sizes": list(self.sizes),
            "seed": self.seed,
            "context_init": self.context_init,
        }
        buf = io.BytesIO()
        np.savez(buf, meta=np.array(json.dumps(meta)), **self.params())
        Path(path).write_bytes(buf.getvalue())

    @classmethod
    def load(cls, path) -> "ElmanNet":
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            if meta.get("format") != "ndpong-elman" or meta.get("version") != FORMAT_VERSION:
                raise ConfigError(f"{path}: not an Elman weight file of version {FORMAT_VERSION}")
            params = {k: data[k].copy() for k in ("W_ih", "W_ch", "W_ho", "b_h", "b_o")}
        return cls(**params, context_init=meta["context_init"], seed=meta["seed"])


def response_from_output(output: np.ndarray) -> Response:
    # np.argmax returns the first maximum, i.e. the lowest response id on ties
    return Response(int(np.argmax(output)))


def init_network(
    seed: int,
    init_range: float = 0.1,
    sizes: tuple[int, int, int] = (N_INPUT, 20, N_OUTPUT),
    context_init: float = 0.5,
) -> ElmanNet:
    if init_range <= 0:
        raise ConfigError("init_range must be positive")
    n_in, n_hid, n_out = sizes
    rng = np.random.default_rng(seed)

    def u(*shape):
        return rng.uniform(-init_range, init_range, size=shape)

    return ElmanNet(
        W_ih=u(n_in, n_hid),
        W_ch=u(n_hid, n_hid),
        W_ho=u(n_hid, n_out),
        b_h=u(n_hid),
        b_o=u(n_out),
        context_init=context_init,
        seed=seed,
    )


def loss(net: ElmanNet, x: np.ndarray, target: np.ndarray, context: np.ndarray) -> float:
    """Half squared error of one step from a given context (no state change)."""
    h = sigmoid(x @ net.W_ih + context @ net.W_ch + net.b_h)
    o = sigmoid(h @ net.W_ho + net.b_o)
    return 0.5 * float(np.sum((o - target) ** 2))


def gradients(
    net: ElmanNet, x: np.ndarray, target: np.ndarray, context: np.ndarray
) -> dict[str, np.ndarray]:
    """Analytic gradient of :func:`loss` with the context held fixed."""
    h = sigmoid(x @ net.W_ih + context @ net.W_ch + net.b_h)
    o = sigmoid(h @ net.W_ho + net.b_o)
    delta_o = (o - target) * o * (1.0 - o)
    delta_h = (net.W_ho @ delta_o) * h * (1.0 - h)
    return {
        "W_ih": np.outer(x, delta_h),
        "W_ch": np.outer(context, delta_h),
        "W_ho": np.outer(h, delta_o),
        "b_h": delta_h,
        "b_o": delta_o,
    }


@numba.njit(cache=True)
def _train_kernel(W_ih, W_ch, W_ho, b_h, b_o, X, Y, starts, lengths, order, lr, context_init):
    n_in, n_hid = W_ih.shape
    n_out = W_ho.shape[1]
    n_epochs, n_seq = order.shape
    mse = np.zeros(n_epochs)
    h = np.empty(n_hid)
    c = np.empty(n_hid)
    o = np.empty(n_out)
    d_o = np.empty(n_out)
    d_h = np.empty(n_hid)
    total_steps = 0
    for s in range(n_seq):
        total_steps += lengths[s]
    for e in range(n_epochs):
        err = 0.0
        for k in range(n_seq):
            s = order[e, k]
            for j in range(n_hid):
                c[j] = context_init
            for t in range(starts[s], starts[s] + lengths[s]):
                for j in range(n_hid):
                    a = b_h[j]
                    for i in range(n_in):
                        a += X[t, i] * W_ih[i, j]
                    for i in range(n_hid):
                        a += c[i] * W_ch[i, j]
                    h[j] = 1.0 / (1.0 + np.exp(-a))
                for m in range(n_out):
                    a = b_o[m]
                    for j in range(n_hid):
                        a += h[j] * W_ho[j, m]
                    o[m] = 1.0 / (1.0 + np.exp(-a))
                    diff = o[m] - Y[t, m]
                    err += diff * diff
                    d_o[m] = diff * o[m] * (1.0 - o[m])
                for j in range(n_hid):
                    a = 0.0
                    for m in range(n_out):
                        a += W_ho[j, m] * d_o[m]
                    d_h[j] = a * h[j] * (1.0 - h[j])
                for j in range(n_hid):
                    for m in range(n_out):
                        W_ho[j, m] -= lr * h[j] * d_o[m]
                for m in range(n_out):
                    b_o[m] -= lr * d_o[m]
                for i in range(n_in):
                    if X[t, i] != 0.0:
                        for j in range(n_hid):
                            W_ih[i, j] -= lr * X[t, i] * d_h[j]
                for i in range(n_hid):
                    for j in range(n_hid):
                        W_ch[i, j] -= lr * c[i] * d_h[j]
                for j in range(n_hid):
                    b_h[j] -= lr * d_h[j]
                    c[j] = h[j]
        mse[e] = err / (total_steps * n_out)
    return mse


@dataclass
class TrainingReport:
    epochs: int
    lr: float
    mse: np.ndarray  # per-epoch mean squared error over all output units

    @property
    def final_mse(self) -> float:
        return float(self.mse[-1]) if len(self.mse) else float("nan")


def _validate_one_hot(arr: np.ndarray, what: str) -> None:
    if not (np.all((arr == 0) | (arr == 1)) and np.all(arr.sum(axis=1) == 1)):
        raise ConfigError(f"{what} must be one-hot rows of 0/1")


def train(
    net: ElmanNet,
    sequences: list[tuple[np.ndarray, np.ndarray]],
    epochs: int = 5000,
    lr: float = 0.2,
    shuffle_seed: int | None = 0,
) -> TrainingReport:
    """Online Elman training in place.

    ``sequences`` holds per-game ``(inputs, targets)`` arrays of shape
    ``(T, n_in)`` and ``(T, n_out)``.  The context is reset at the start of every
    sequence; with ``shuffle_seed=None`` sequences keep their given order.
    """
    if not sequences:
        raise ConfigError("training set is empty")
    n_in, _, n_out = net.sizes
    X = np.ascontiguousarray(np.concatenate([np.asarray(x, float) for x, _ in sequences]))
    Y = np.ascontiguousarray(np.concatenate([np.asarray(y, float) for _, y in sequences]))
    if X.shape[1] != n_in or Y.shape[1] != n_out or len(X) != len(Y):
        raise ConfigError("sequence shapes do not match the network")
    _validate_one_hot(Y, "targets")
    if n_in == N_INPUT:
        _validate_one_hot(X[:, : len(BallSensor)], "ball inputs")
        _validate_one_hot(X[:, len(BallSensor) :], "paddle inputs")
    lengths = np.array([len(x) for x, _ in sequences], dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(lengths)[:-1]]).astype(np.int64)
    if epochs <= 0:
        return TrainingReport(0, lr, np.zeros(0))
    if shuffle_seed is None:
        order = np.tile(np.arange(len(sequences)), (epochs, 1))
    else:
        rng = np.random.default_rng(shuffle_seed)
        order = np.stack([rng.permutation(len(sequences)) for _ in range(epochs)])
    mse = _train_kernel(
        net.W_ih, net.W_ch, net.W_ho, net.b_h, net.b_o,
        X, Y, starts, lengths, order.astype(np.int64), float(lr), float(net.context_init),
    )
    net.reset_context()
    return TrainingReport(epochs, lr, mse)


def sgd_step(net: ElmanNet, x: np.ndarray, target: np.ndarray, lr: float) -> None:
    """Reference single online update (numpy); the compiled kernel must match it."""
    grads = gradients(net, x, target, net.context)
    net.forward(x)
    for name, g in grads.items():
        getattr(net, name)[...] -= lr * g


def sequences_from_traces(traces) -> list[tuple[np.ndarray, np.ndarray]]:
    return [
        (
            np.array([encode_observation(s.observation) for s in tr.steps]),
            np.array([encode_response(s.response) for s in tr.steps]),
        )
        for tr in traces
    ]
