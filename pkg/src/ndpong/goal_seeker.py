"""Goal-seeking learner built on a bounded-history cause/effect model.

Training records, for every context (the last ``K`` observation/response pairs
plus the current observation), which response the teacher gave and which
observation followed.  At play time the learner scores each response it has
seen in the current context by the discounted probability of reaching a goal
observation (ball in view) within a finite horizon, and picks the best one.
Unseen contexts back off to the longest seen suffix.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .env import BallSensor, ConfigError, Response, SensorReading

Pair = tuple[SensorReading, Response]
ContextKey = tuple[tuple[Pair, ...], SensorReading]


class ColdStartError(LookupError):
    """No context (not even the bare observation) has been seen in training."""


@dataclass(frozen=True)
class GoalConfig:
    goal_ball: BallSensor = BallSensor.BALL_PRESENT
    horizon: int = 12
    discount: float = 0.9

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if not 0 < self.discount <= 1:
            raise ConfigError("discount must be in (0, 1]")

    def is_goal(self, obs: SensorReading) -> bool:
        return obs.ball == self.goal_ball


@dataclass(frozen=True)
class WorkingMemory:
    K: int
    pairs: tuple[Pair, ...] = ()

    def key(self, observation: SensorReading) -> ContextKey:
        return (self.pairs, observation)


def step_memory(memory: WorkingMemory, observation: SensorReading, response: Response) -> WorkingMemory:
    pairs = memory.pairs + ((observation, Response(response)),)
    if memory.K == 0:
        pairs = ()
    elif len(pairs) > memory.K:
        pairs = pairs[-memory.K :]
    return WorkingMemory(memory.K, pairs)


def _suffixes(key: ContextKey):
    """Key itself, then shorter histories down to the bare observation."""
    pairs, obs = key
    for j in range(len(pairs), -1, -1):
        yield (pairs[len(pairs) - j :], obs)


@dataclass
class TransitionModel:
    K: int
    counts: dict = field(default_factory=lambda: defaultdict(Counter))
    response_counts: dict = field(default_factory=lambda: defaultdict(Counter))

    def __post_init__(self) -> None:
        self._backoff_responses = defaultdict(Counter)
        self._backoff_counts = defaultdict(Counter)
        self._value_cache: dict = {}

    def _index(self) -> None:
        self._backoff_responses.clear()
        self._backoff_counts.clear()
        self._value_cache.clear()
        for key, responses in self.response_counts.items():
            for suffix in _suffixes(key):
                self._backoff_responses[suffix].update(responses)
        for (key, response), nexts in self.counts.items():
            for suffix in _suffixes(key):
                self._backoff_counts[(suffix, response)].update(nexts)

    def __bool__(self) -> bool:
        return bool(self.response_counts)

    def lookup(self, key: ContextKey) -> tuple[ContextKey, Counter, bool]:
        """Longest seen suffix of ``key``, its response counts, and exactness."""
        if key in self.response_counts:
            return key, self.response_counts[key], True
        for suffix in _suffixes(key):
            if suffix in self._backoff_responses:
                return suffix, self._backoff_responses[suffix], False
        raise ColdStartError(f"no trained context for observation {key[1]}")

    def transitions(self, key: ContextKey, response: Response, exact: bool) -> Counter:
        table = self.counts if exact else self._backoff_counts
        return table.get((key, response), Counter())

    # -- persistence -------------------------------------------------------

    def dump(self) -> str:
        lines = [f"# ndpong transition model\nK\t{self.K}"]
        for key in sorted(self.response_counts, key=_key_text):
            for r, n in sorted(self.response_counts[key].items()):
                lines.append(f"R\t{_key_text(key)}\t{r.name}\t{n}")
        for key, r in sorted(self.counts, key=lambda kr: (_key_text(kr[0]), kr[1])):
            for nxt, n in sorted(self.counts[(key, r)].items(), key=lambda kv: str(kv[0])):
                lines.append(f"T\t{_key_text(key)}\t{r.name}\t{nxt}\t{n}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dump())

    @classmethod
    def loads(cls, text: str) -> "TransitionModel":
        model = None
        for line in text.splitlines():
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if parts[0] == "K":
                model = cls(int(parts[1]))
            elif model is None:
                raise ConfigError("model file lacks a K header")
            elif parts[0] == "R":
                model.response_counts[_parse_key(parts[1])][Response[parts[2]]] = int(parts[3])
            elif parts[0] == "T":
                key = (_parse_key(parts[1]), Response[parts[2]])
                model.counts[key][SensorReading.parse(parts[3])] = int(parts[4])
            else:
                raise ConfigError(f"bad model line: {line!r}")
        if model is None:
            raise ConfigError("empty model file")
        model._index()
        return model

    @classmethod
    def load(cls, path) -> "TransitionModel":
        return cls.loads(Path(path).read_text())


def _key_text(key: ContextKey) -> str:
    pairs, obs = key
    hist = ";".join(f"{o}>{r.name}" for o, r in pairs)
    return f"{hist}|{obs}"


def _parse_key(text: str) -> ContextKey:
    hist, obs = text.split("|")
    pairs = []
    if hist:
        for item in hist.split(";"):
            o, r = item.split(">")
            pairs.append((SensorReading.parse(o), Response[r]))
    return tuple(pairs), SensorReading.parse(obs)


def train_from_traces(traces, K: int = 3) -> TransitionModel:
    """Single pass over teacher traces; working memory cleared per game."""
    if not traces:
        raise ConfigError("no traces to train on")
    if K < 0:
        raise ConfigError("context order K must be >= 0")
    model = TransitionModel(K)
    for trace in traces:
        memory = WorkingMemory(K)
        obs = list(trace.observations)
        if trace.final_observation is not None:
            obs.append(trace.final_observation)
        for t, step in enumerate(trace.steps):
            key = memory.key(step.observation)
            model.response_counts[key][step.response] += 1
            if t + 1 < len(obs):
                model.counts[(key, step.response)][obs[t + 1]] += 1
            memory = step_memory(memory, step.observation, step.response)
    model._index()
    return model


def _best(candidates: Counter, values: dict) -> Response:
    # highest value, then most demonstrated, then lowest id
    return min(candidates, key=lambda r: (-values[r], -candidates[r], int(r)))


def motivation(model: TransitionModel, key: ContextKey, goal: GoalConfig) -> dict[Response, float]:
    """Goal-reaching value of every response seen in ``key`` (exact or backed off)."""
    key, candidates, exact = model.lookup(key)
    return {r: _q(model, key, exact, r, goal.horizon, goal) for r in candidates}


def _value(model: TransitionModel, key: ContextKey, depth: int, goal: GoalConfig) -> float:
    if depth <= 0:
        return 0.0
    cache_key = (key, depth, goal)
    cached = model._value_cache.get(cache_key)
    if cached is not None:
        return cached
    try:
        found, candidates, exact = model.lookup(key)
    except ColdStartError:
        value = 0.0
    else:
        value = max(_q(model, found, exact, r, depth, goal) for r in candidates)
    model._value_cache[cache_key] = value
    return value


def _q(model, key, exact, response, depth, goal) -> float:
    nexts = model.transitions(key, response, exact)
    total = sum(nexts.values())
    if not total:
        return 0.0
    pairs, obs = key
    history = (pairs + ((obs, response),))[-model.K :] if model.K else ()
    acc = 0.0
    for nxt, n in nexts.items():
        if goal.is_goal(nxt):
            v = 1.0
        else:
            v = _value(model, (history, nxt), depth - 1, goal)
        acc += n / total * v
    return goal.discount * acc


def plan_response(
    model: TransitionModel,
    memory: WorkingMemory,
    observation: SensorReading,
    goal: GoalConfig = GoalConfig(),
) -> Response:
    """Most motivated response in the current context.

    Contexts never seen whole fall back to the teacher's majority response
    at the longest seen suffix.
    """
    if not model:
        raise ConfigError("model is empty")
    key = memory.key(observation)
    found, candidates, exact = model.lookup(key)
    if not exact:
        return min(candidates, key=lambda r: (-candidates[r], int(r)))
    values = {r: _q(model, found, True, r, goal.horizon, goal) for r in candidates}
    return _best(candidates, values)


class GoalSeeker:
    """Trained model plus per-game working memory, as used by the evaluator."""

    def __init__(self, model: TransitionModel, goal: GoalConfig = GoalConfig()):
        self.model = model
        self.goal = goal
        self.reset()

    def reset(self) -> None:
        self.memory = WorkingMemory(self.model.K)

    def respond(self, observation: SensorReading) -> Response:
        response = plan_response(self.model, self.memory, observation, self.goal)
        self.memory = step_memory(self.memory, observation, response)
        return response
