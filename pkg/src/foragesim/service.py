"""Live steering service: streams snapshots over a WebSocket and accepts
commands that are applied at step boundaries, keeping every interactive
session replayable.

Wire format: one JSON document per text frame, all carrying {"v": 1}.
Server messages: hello, snapshot (full), delta (changed cells only), ack,
error, log.  Client commands: place_food, move_food, remove_food, pause,
resume, step, set_speed, set_param, get_log, snapshot.  Every command may
carry an "id" echoed in the ack/error.

The simulation advances inside the event loop in small batches sized by
the current speed; commands queue up and are applied between batches,
which are step boundaries.
"""

from __future__ import annotations

import asyncio
import json

from .engine import Engine, Event

PROTOCOL_VERSION = 1


def _msg(type_, **kw):
    kw["v"] = PROTOCOL_VERSION
    kw["type"] = type_
    return json.dumps(kw)


class Service:
    def __init__(self, config, schedule=None, speed=2000.0, snapshot_every=None,
                 start_paused=False):
        self.engine = Engine(config, schedule)
        self.speed = float(speed)          # steps per second
        self.snapshot_every = snapshot_every or max(1, config.n)
        self.running = not start_paused
        self.clients = set()
        self.commands = asyncio.Queue()
        self._last_cells = self._cells()
        self._last_food = self._food()
        self._next_broadcast = self.engine.step_no + self.snapshot_every

    # -- state encoding ----------------------------------------------------

    def _cells(self):
        w = self.engine.world
        lat = w.lattice
        return {
            lat.coord(w.pos[p]): (w.states[p], w.parent[p])
            for p in range(w.n_particles)
        }

    def _food(self):
        w = self.engine.world
        return sorted(w.lattice.coord(i) for i in w.food)

    def _status(self):
        return {
            "running": self.running,
            "speed": self.speed,
            "params": self.engine.config.params,
        }

    def snapshot_msg(self):
        w = self.engine.world
        frame = self.engine.sample_metrics()
        return _msg(
            "snapshot",
            step=self.engine.step_no,
            side=w.side,
            algo=self.engine.config.algo,
            food=[list(c) for c in self._food()],
            particles=[
                [c[0], c[1], sc[0], sc[1]] for c, sc in sorted(self._cells().items())
            ],
            metrics=frame.__dict__,
            **self._status(),
        )

    def delta_msg(self):
        cells = self._cells()
        changes = []
        for c, sc in cells.items():
            if self._last_cells.get(c) != sc:
                changes.append([c[0], c[1], sc[0], sc[1]])
        for c in self._last_cells:
            if c not in cells:
                changes.append([c[0], c[1], -1, -1])
        food = self._food()
        frame = self.engine.sample_metrics()
        msg = _msg(
            "delta",
            step=self.engine.step_no,
            changes=changes,
            food=[list(c) for c in food],
            metrics=frame.__dict__,
            **self._status(),
        )
        self._last_cells = cells
        self._last_food = food
        return msg

    def session_log(self):
        eng = self.engine
        return {
            "format": "foragesim/1",
            "config": eng.config0,
            "schedule": [e.to_dict() for e in eng.schedule],
            "steps": eng.step_no,
            "events": eng.events,
            "final_hash": eng.state_hash(),
        }

    # -- command application (at step boundaries) ---------------------------

    def apply_command(self, cmd):
        """Returns (ok, payload).  Food/parameter commands are recorded in
        the schedule so the session replays identically."""
        t = cmd.get("type")
        eng = self.engine
        try:
            if t == "place_food":
                ev = Event(step=eng.step_no, action="place", at=tuple(cmd["at"]))
            elif t == "move_food":
                ev = Event(step=eng.step_no, action="move",
                           at=tuple(cmd["from"]), to=tuple(cmd["to"]))
            elif t == "remove_food":
                ev = Event(step=eng.step_no, action="remove", at=tuple(cmd["at"]))
            elif t == "set_param":
                ev = Event(step=eng.step_no, action="set_param",
                           name=str(cmd["name"]), value=float(cmd["value"]))
            elif t == "pause":
                self.running = False
                return True, {"step": eng.step_no}
            elif t == "resume":
                self.running = True
                return True, {"step": eng.step_no}
            elif t == "set_speed":
                sps = float(cmd["sps"])
                if not (0 < sps <= 1e6):
                    return False, "speed out of range"
                self.speed = sps
                return True, {"step": eng.step_no}
            elif t == "step":
                k = int(cmd.get("k", 1))
                if not (0 < k <= 1_000_000):
                    return False, "step count out of range"
                for _ in range(k):
                    eng.step()
                return True, {"step": eng.step_no}
            elif t == "get_log":
                return True, {"log": self.session_log()}
            elif t == "snapshot":
                return True, {"snapshot": True}
            else:
                return False, f"unknown command {t!r}"
        except (KeyError, TypeError, ValueError) as e:
            return False, str(e)
        # schedule-style events: validate and apply now, at a step boundary
        try:
            eng.inject_event(ev)
        except ValueError as e:
            return False, str(e)
        return True, {"step": eng.step_no}

    # -- asyncio plumbing ----------------------------------------------------

    async def _drain_commands(self):
        while not self.commands.empty():
            ws, cmd = await self.commands.get()
            ok, payload = self.apply_command(cmd)
            cid = cmd.get("id")
            if not ok:
                await self._safe_send(ws, _msg("error", id=cid, reason=payload))
            elif isinstance(payload, dict) and "log" in payload:
                await self._safe_send(ws, _msg("log", id=cid, log=payload["log"]))
            elif isinstance(payload, dict) and payload.get("snapshot"):
                await self._safe_send(ws, self.snapshot_msg())
            else:
                await self._safe_send(ws, _msg("ack", id=cid, cmd=cmd.get("type"),
                                               **payload))

    async def _safe_send(self, ws, msg):
        try:
            await ws.send(msg)
        except Exception:
            self.clients.discard(ws)

    async def _broadcast(self, msg):
        for ws in list(self.clients):
            await self._safe_send(ws, msg)

    async def ticker(self):
        """Advance ~speed steps per second in cadence-aligned chunks.
        Every snapshot_every boundary is broadcast (no skipped frames) and
        commands are drained at step boundaries."""
        tick = 0.05
        while True:
            await self._drain_commands()
            if not self.running:
                if self.clients and self._dirty():
                    await self._broadcast(self.delta_msg())
                await asyncio.sleep(tick)
                continue
            budget = max(1, round(self.speed * tick))
            while budget > 0:
                room = self._next_broadcast - self.engine.step_no
                chunk = min(budget, max(room, 1))
                for _ in range(chunk):
                    self.engine.step()
                budget -= chunk
                if self.engine.step_no >= self._next_broadcast:
                    self._next_broadcast += self.snapshot_every
                    if self.clients:
                        await self._broadcast(self.delta_msg())
                await self._drain_commands()
                if not self.running:
                    break
            await asyncio.sleep(tick)

    def _dirty(self):
        return self._cells() != self._last_cells or self._food() != self._last_food

    async def handler(self, ws):
        self.clients.add(ws)
        try:
            await ws.send(_msg("hello", config=self.engine.config.to_dict(),
                               step=self.engine.step_no))
            await ws.send(self.snapshot_msg())
            async for raw in ws:
                try:
                    cmd = json.loads(raw)
                except json.JSONDecodeError:
                    await self._safe_send(ws, _msg("error", id=None,
                                                   reason="malformed JSON"))
                    continue
                await self.commands.put((ws, cmd))
        finally:
            self.clients.discard(ws)


async def serve_async(service, host, port, on_ready=None):
    import websockets

    async with websockets.serve(service.handler, host, port, max_size=2 ** 24):
        if on_ready is not None:
            on_ready()
        await service.ticker()


def serve(config, schedule=None, host="127.0.0.1", port=8765, speed=2000.0,
          snapshot_every=None, start_paused=False, log_path=None,
          on_ready=None):
    """Run the live service until interrupted; writes the session log to
    log_path (if given) on shutdown."""
    service = Service(config, schedule, speed=speed,
                      snapshot_every=snapshot_every, start_paused=start_paused)
    try:
        asyncio.run(serve_async(service, host, port, on_ready))
    except KeyboardInterrupt:
        pass
    finally:
        if log_path:
            with open(log_path, "w") as fh:
                json.dump(service.session_log(), fh)
    return service
