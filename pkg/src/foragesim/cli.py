"""Command-line entry points.

Subcommands:
  run         batch simulation -> metrics CSV + snapshot (+ event log)
  comb-check  randomized verification of the flatten-to-line oracle
  verify      replay an event log, asserting determinism and invariants
  serve       live WebSocket service for interactive steering

Config files are plain "key = value" lines mirroring the run flags; flags
given on the command line override file values.  The serve bind address
can also come from the FORAGESIM_BIND environment variable ("host:port").
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from .engine import Engine, RunConfig, load_schedule, replay_and_verify
from . import comb, compression as cp


def parse_config_file(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k] = v
    return out


def _coord(text):
    x, y = text.split(",")
    return (int(x), int(y))


def _build_config(args):
    file_vals = parse_config_file(args.config) if args.config else {}

    def pick(name, cast, default=None):
        flag = getattr(args, name.replace("-", "_"), None)
        if flag is not None:
            return flag
        if name in file_vals:
            return cast(file_vals[name])
        return default

    algo = pick("algo", str, "compression")
    params = {}
    if algo == "compression":
        params["p"] = pick("p", float, 0.1)
        params["lambda"] = pick("lambda", float, 4.0)
    else:
        params["rho"] = pick("rho", float, 0.25)
    food = list(args.food or [])
    if not food and "food" in file_vals:
        food = [_coord(c) for c in file_vals["food"].split()]
    return RunConfig(
        side=pick("side", int, 32),
        n=pick("n", int, 100),
        algo=algo,
        params=params,
        seed=pick("seed", int, 0),
        max_steps=pick("steps", int, 100_000),
        metrics_every=pick("metrics-every", int, 0),
        terminal=pick("terminal", str, None),
        food=food,
    )


def _add_run_flags(p):
    p.add_argument("--algo", choices=["compression", "spiral"])
    p.add_argument("--n", type=int)
    p.add_argument("--side", type=int)
    p.add_argument("--lambda", dest="lambda_", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--metrics-every", type=int)
    p.add_argument("--terminal", choices=["gathered", "all_dispersion", "spiral_complete"])
    p.add_argument("--food", action="append", type=_coord,
                   help="initial food site x,y (repeatable)")
    p.add_argument("--schedule", help="JSON food-event schedule file")
    p.add_argument("--config", help="key = value config file")


def cmd_run(args):
    cfg = _build_config(args)
    schedule = load_schedule(args.schedule) if args.schedule else []
    art = Engine(cfg, schedule).run()
    art.write(args.out, events=args.events)
    last = art.metrics[-1]
    print(f"ran {art.steps} steps ({art.stop_reason}); "
          f"phi={last.phi} stage={last.stage} residual={last.n_residual}")
    print(f"artifacts in {args.out}")
    return 0


def cmd_comb_check(args):
    rng = random.Random(args.seed)
    side = args.side
    flattened = 0
    invalid_moves = 0
    failures = []
    for case in range(args.cases):
        n = rng.randrange(1, args.n_max + 1)
        w = _random_connected_world(rng, n, side)
        try:
            moves = comb.flatten_to_line(w)
        except Exception as e:
            failures.append((case, f"{type(e).__name__}: {e}"))
            continue
        w2 = w.copy()
        ok = True
        for (a, b) in moves:
            fa, ta = w2.lattice.index(a), w2.lattice.index(b)
            if cp.move_verdict(w2, fa, ta) != cp.VALID:
                invalid_moves += 1
                ok = False
                break
            w2.move_particle(w2.occ[fa], ta)
        if ok:
            cl, _ = comb.cluster_from_world(w2, room_check=False)
            if comb.is_line(cl):
                flattened += 1
            else:
                failures.append((case, "did not end in a line"))
        else:
            failures.append((case, "emitted invalid move"))
    print(f"{flattened}/{args.cases} flattened, {invalid_moves} invalid moves")
    for case, why in failures[:10]:
        print(f"  case {case}: {why}", file=sys.stderr)
    return 0 if flattened == args.cases and invalid_moves == 0 else 1


def _random_connected_world(rng, n, side):
    from .lattice import World

    w = World(side)
    food = (side // 2, side // 2)
    w.place_food(food)
    lat = w.lattice
    frontier = [lat.index(food)]
    placed = set()
    while len(placed) < n:
        base = rng.choice(frontier)
        site = lat.nbr[base][rng.randrange(6)]
        if w.occ[site] == -1:
            w.add_particle(lat.coord(site), cp.C)
            placed.add(site)
            frontier.append(site)
    return w


def cmd_verify(args):
    with open(args.log) as fh:
        log = json.load(fh)
    ok, msg = replay_and_verify(log, check_state_invariant=args.invariants)
    print(("ok: " if ok else "FAIL: ") + msg)
    return 0 if ok else 1


def cmd_serve(args):
    from .service import serve

    cfg = _build_config(args)
    host, port = args.host, args.port
    bind = os.environ.get("FORAGESIM_BIND")
    if bind and args.host == "127.0.0.1" and args.port == 8765:
        host, port = bind.rsplit(":", 1)
        port = int(port)
    schedule = load_schedule(args.schedule) if args.schedule else []
    print(f"serving ws://{host}:{port} (algo={cfg.algo}, n={cfg.n}, side={cfg.side})",
          flush=True)
    serve(
        cfg, schedule, host=host, port=port, speed=args.speed,
        snapshot_every=args.snapshot_every, start_paused=args.paused,
        log_path=args.session_log,
        on_ready=lambda: print("listening", flush=True),
    )
    return 0


def main(argv=None):
    ap = argparse.ArgumentParser(prog="foragesim", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="batch simulation run")
    _add_run_flags(p)
    p.add_argument("--out", default="out", help="artifact directory")
    p.add_argument("--events", action="store_true", help="write replayable event log")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("comb-check", help="verify the flatten-to-line oracle")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--cases", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--side", type=int, default=48)
    p.set_defaults(fn=cmd_comb_check)

    p = sub.add_parser("verify", help="replay an event log and check it")
    p.add_argument("--log", required=True)
    p.add_argument("--invariants", action="store_true",
                   help="also re-check the state invariant while replaying")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("serve", help="live steering service")
    _add_run_flags(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--speed", type=float, default=2000.0, help="steps per second")
    p.add_argument("--snapshot-every", type=int, default=None,
                   help="snapshot cadence in steps (default: one sweep)")
    p.add_argument("--paused", action="store_true", help="start paused")
    p.add_argument("--session-log", default=None,
                   help="write the replayable session log here on shutdown")
    p.set_defaults(fn=cmd_serve)

    args = ap.parse_args(argv)
    # argparse stores --lambda under lambda_; normalize for _build_config
    if hasattr(args, "lambda_"):
        setattr(args, "lambda", args.lambda_)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
