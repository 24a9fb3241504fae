"""Sequential run engine: seeded uniform-random activation, adversarial
food schedules, change-event logging, metrics sampling, and deterministic
replay.

One step = apply the food/parameter events due at this step, then activate
one particle.  Time is discrete; equal-rate activation clocks are realized
as uniform random selection (optionally weighted), and one "sweep" is n
steps.  The event log records only configuration-changing activations plus
every schedule event; together with (config, seed) it determines the run
bit-for-bit.
"""

from __future__ import annotations

import bisect
import hashlib
import json
import random
from dataclasses import dataclass, field

from .lattice import World
from . import compression as cp
from . import spiral as sp
from . import analysis

FORMAT_TAG = "foragesim/1"


# ---------------------------------------------------------------------------
# schedules

LEGAL_ACTIONS = ("place", "move", "remove", "set_param")


@dataclass
class Event:
    step: int
    action: str
    at: tuple = None
    to: tuple = None
    name: str = None
    value: float = None

    def to_dict(self):
        d = {"step": self.step, "action": self.action}
        if self.at is not None:
            d["at"] = list(self.at)
        if self.to is not None:
            d["to"] = list(self.to)
        if self.name is not None:
            d["name"] = self.name
            d["value"] = self.value
        return d

    @staticmethod
    def from_dict(d):
        if d["action"] not in LEGAL_ACTIONS:
            raise ValueError(f"unknown action {d['action']!r}")
        return Event(
            step=int(d["step"]),
            action=d["action"],
            at=tuple(d["at"]) if "at" in d else None,
            to=tuple(d["to"]) if "to" in d else None,
            name=d.get("name"),
            value=d.get("value"),
        )


def load_schedule(path_or_list):
    """A schedule is a JSON list of {"step", "action", "at", "to"?} dicts
    with non-decreasing steps."""
    if isinstance(path_or_list, (list, tuple)):
        raw = path_or_list
    else:
        with open(path_or_list) as fh:
            raw = json.load(fh)
    events = [Event.from_dict(d) for d in raw]
    for a, b in zip(events, events[1:]):
        if b.step < a.step:
            raise ValueError("schedule steps must be non-decreasing")
    return events


# ---------------------------------------------------------------------------
# configuration

@dataclass
class RunConfig:
    side: int
    n: int
    algo: str                      # "compression" | "spiral"
    params: dict = field(default_factory=dict)
    seed: int = 0
    max_steps: int = 0
    metrics_every: int = 0         # 0 -> one sweep (n steps)
    terminal: str = None           # None | gathered | all_dispersion | spiral_complete
    terminal_every: int = 0        # 0 -> one sweep
    food: list = field(default_factory=list)   # initial food coords
    rates: list = None             # optional per-particle activation weights

    def __post_init__(self):
        if self.algo not in ("compression", "spiral"):
            raise ValueError("algo must be 'compression' or 'spiral'")
        if self.side < 6:
            # a radius-1 hexagon plus its boundary must never self-intersect
            raise ValueError("simulations need side >= 6")
        if not (0 < self.n < self.side * self.side):
            raise ValueError("need 0 < n < side^2")
        self.param_obj()  # validate ranges now

    def param_obj(self):
        return _params_from(self.algo, self.params)

    def to_dict(self):
        return {
            "format": FORMAT_TAG,
            "side": self.side, "n": self.n, "algo": self.algo,
            "params": self.params, "seed": self.seed,
            "max_steps": self.max_steps, "metrics_every": self.metrics_every,
            "terminal": self.terminal, "terminal_every": self.terminal_every,
            "food": [list(c) for c in self.food], "rates": self.rates,
        }

    @staticmethod
    def from_dict(d):
        return RunConfig(
            side=d["side"], n=d["n"], algo=d["algo"],
            params=d.get("params", {}), seed=d.get("seed", 0),
            max_steps=d.get("max_steps", 0),
            metrics_every=d.get("metrics_every", 0),
            terminal=d.get("terminal"),
            terminal_every=d.get("terminal_every", 0),
            food=[tuple(c) for c in d.get("food", [])],
            rates=d.get("rates"),
        )


def _params_from(algo, params):
    if algo == "compression":
        return cp.CompressionParams(
            p=float(params.get("p", 0.1)),
            lam=float(params.get("lambda", 4.0)),
        )
    return sp.SpiralParams(rho=float(params.get("rho", 0.25)))


# ---------------------------------------------------------------------------
# terminal predicates

def gathered(world):
    """All particles in a compression state forming one cluster with food."""
    n = world.n_particles
    if not world.food:
        return False
    for s in world.states:
        if not (1 <= s <= 4):
            return False
    seen = set()
    stack = list(world.food)
    visited_food = set(world.food)
    count = 0
    while stack:
        cur = stack.pop()
        for s in world.lattice.nbr[cur]:
            o = world.occ[s]
            if o >= 0 and o not in seen:
                seen.add(o)
                count += 1
                stack.append(world.pos[o])
            elif s in world.food and s not in visited_food:
                visited_food.add(s)
                stack.append(s)
    return count == n


def all_dispersion(world):
    return all(s == 0 for s in world.states)


def spiral_complete(world):
    n = world.n_particles
    if not all(sp.is_comp(s) for s in world.states):
        return False
    for spir in sp.find_spirals(world):
        if len(spir.particles) == n:
            return True
    return False


TERMINALS = {
    "gathered": gathered,
    "all_dispersion": all_dispersion,
    "spiral_complete": spiral_complete,
}


# ---------------------------------------------------------------------------
# engine

class Engine:
    def __init__(self, config, schedule=None, listener=None):
        self.config = config
        self.config0 = json.loads(json.dumps(config.to_dict()))  # pre-run copy
        self.params = config.param_obj()
        self.rng = random.Random(config.seed)
        self.step_no = 0
        self.events = []            # change log (activations + schedule events)
        self.metrics = []
        self.listener = listener    # optional move hook (compression only)
        self.schedule = sorted(schedule or [], key=lambda e: e.step)
        self._sched_pos = 0
        self._cum = None
        if config.rates:
            if len(config.rates) != config.n:
                raise ValueError("rates must have one weight per particle")
            tot = 0.0
            self._cum = []
            for r in config.rates:
                tot += r
                self._cum.append(tot)

        w = World(config.side)
        for c in config.food:
            w.place_food(c)
        free = [i for i in range(w.lattice.nsites) if w.occ[i] == -1]
        for idx in self.rng.sample(free, config.n):
            w.add_particle(w.lattice.coord(idx), 0)
        self.world = w

    # -- food / parameter events

    def apply_event(self, ev):
        """Apply a food or parameter event now; records it in the log."""
        w = self.world
        if ev.action == "place":
            w.place_food(ev.at)
        elif ev.action == "remove":
            w.remove_food(ev.at)
        elif ev.action == "move":
            w.move_food(ev.at, ev.to)
        elif ev.action == "set_param":
            params = dict(self.config.params)
            params[ev.name] = ev.value
            candidate = _params_from(self.config.algo, params)  # validates
            self.config.params = params
            self.params = candidate
        else:
            raise ValueError(f"unknown action {ev.action!r}")
        self.events.append(["ev", self.step_no, ev.to_dict()])

    def _due_events(self):
        while (
            self._sched_pos < len(self.schedule)
            and self.schedule[self._sched_pos].step <= self.step_no
        ):
            ev = self.schedule[self._sched_pos]
            self._sched_pos += 1
            self.apply_event(ev)

    def inject_event(self, ev):
        """Apply an externally issued event at the current step boundary and
        record it in the schedule, so the session stays replayable.  Any
        events already scheduled for this boundary fire first."""
        self._due_events()
        ev = Event(step=self.step_no, action=ev.action, at=ev.at, to=ev.to,
                   name=ev.name, value=ev.value)
        self.apply_event(ev)
        self.schedule.append(ev)
        self._sched_pos = len(self.schedule)
        return ev

    def _pick(self):
        if self._cum is None:
            return self.rng.randrange(self.config.n)
        r = self.rng.random() * self._cum[-1]
        return bisect.bisect_right(self._cum, r)

    def step(self):
        """Apply events due at this step boundary, then activate one
        uniformly random particle.  Returns the activation record
        (pid, event, aux, frm, to)."""
        self._due_events()
        pid = self._pick()
        if self.config.algo == "compression":
            ev, aux, frm, to = cp.activate(
                self.world, pid, self.params, self.rng, self.listener
            )
        else:
            ev, frm, to = sp.activate(self.world, pid, self.params, self.rng)
            aux = 0
        if ev != 0 or frm >= 0:
            self.events.append(["a", self.step_no, pid, ev, aux, frm, to])
        self.step_no += 1
        return pid, ev, aux, frm, to

    def state_hash(self):
        h = hashlib.sha256()
        w = self.world
        h.update(repr((sorted(w.food), w.pos, w.states, w.parent)).encode())
        return h.hexdigest()

    def sample_metrics(self):
        frame = analysis.compute_metrics(self.world, self.config.algo, self.step_no)
        self.metrics.append(frame)
        return frame

    def run(self):
        """Run to max_steps or until the configured terminal predicate
        holds; samples metrics at the cadence.  Returns a RunArtifact."""
        cfg = self.config
        every = cfg.metrics_every or cfg.n
        check_every = cfg.terminal_every or cfg.n
        terminal = TERMINALS.get(cfg.terminal) if cfg.terminal else None
        self.sample_metrics()
        reason = "max_steps"
        while self.step_no < cfg.max_steps:
            self.step()
            if self.step_no % every == 0:
                self.sample_metrics()
            if terminal and self.step_no % check_every == 0 and terminal(self.world):
                reason = "terminal"
                break
        # trailing events scheduled exactly at the final boundary
        self._due_events()
        if not self.metrics or self.metrics[-1].step != self.step_no:
            self.sample_metrics()
        return RunArtifact(self, reason)


# ---------------------------------------------------------------------------
# artifacts and replay

class RunArtifact:
    def __init__(self, engine, stop_reason):
        self.config = engine.config
        self.config0 = engine.config0
        self.schedule = engine.schedule
        self.events = engine.events
        self.metrics = engine.metrics
        self.world = engine.world
        self.stop_reason = stop_reason
        self.steps = engine.step_no
        self.final_hash = engine.state_hash()

    def snapshot_dict(self):
        w = self.world
        lat = w.lattice
        return {
            "format": FORMAT_TAG,
            "step": self.steps,
            "side": w.side,
            "algo": self.config.algo,
            "stop_reason": self.stop_reason,
            "food": [list(lat.coord(i)) for i in sorted(w.food)],
            "particles": [
                [*lat.coord(w.pos[p]), w.states[p], w.parent[p]]
                for p in range(w.n_particles)
            ],
            "metrics": self.metrics[-1].__dict__ if self.metrics else None,
        }

    def log_dict(self):
        return {
            "format": FORMAT_TAG,
            "config": self.config0,
            "schedule": [e.to_dict() for e in self.schedule],
            "steps": self.steps,
            "events": self.events,
            "final_hash": self.final_hash,
        }

    def write(self, outdir, events=False):
        import os

        os.makedirs(outdir, exist_ok=True)
        with open(os.path.join(outdir, "metrics.csv"), "w") as fh:
            fh.write(",".join(analysis.CSV_COLUMNS) + "\n")
            for m in self.metrics:
                fh.write(m.csv_row() + "\n")
        with open(os.path.join(outdir, "metrics.jsonl"), "w") as fh:
            for m in self.metrics:
                fh.write(m.to_json() + "\n")
        with open(os.path.join(outdir, "snapshot.json"), "w") as fh:
            json.dump(self.snapshot_dict(), fh)
        if events:
            with open(os.path.join(outdir, "run.events"), "w") as fh:
                json.dump(self.log_dict(), fh)


def replay_and_verify(log, check_state_invariant=False):
    """Re-run a logged session and compare its change events and final
    hash.  Returns (ok, message).  Optionally re-checks the compression
    state invariant after every configuration-changing activation."""
    cfg = RunConfig.from_dict(log["config"])
    schedule = [Event.from_dict(d) for d in log["schedule"]]
    eng = Engine(cfg, schedule)
    want = log["events"]
    got_pos = 0
    while eng.step_no < log["steps"]:
        before = len(eng.events)
        eng.step()
        for rec in eng.events[before:]:
            if got_pos >= len(want):
                return False, f"extra event at step {rec[1]}: {rec}"
            if rec != want[got_pos] and list(rec) != list(want[got_pos]):
                return False, (
                    f"event mismatch at index {got_pos}: got {rec}, "
                    f"logged {want[got_pos]}"
                )
            got_pos += 1
        if check_state_invariant and cfg.algo == "compression" and len(eng.events) > before:
            ok, bad = analysis.check_state_invariant(eng.world)
            if not ok:
                return False, f"state invariant violated at step {eng.step_no}"
    eng._due_events()
    for rec in eng.events[got_pos:]:
        if got_pos >= len(want) or list(rec) != list(want[got_pos]):
            return False, f"trailing event mismatch at index {got_pos}"
        got_pos += 1
    if got_pos != len(want):
        return False, f"log has {len(want)} events, replay produced {got_pos}"
    if eng.state_hash() != log["final_hash"]:
        return False, "final state hash mismatch"
    return True, "ok"
