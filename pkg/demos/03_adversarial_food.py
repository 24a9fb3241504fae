"""An adversarial food schedule: the food teleports twice and finally
vanishes.  The colony re-targets each time; the metrics CSV printed at the
end shows the potential rising and collapsing with each phase change.
"""

import io

from foragesim.engine import Engine, RunConfig, load_schedule
from foragesim import analysis

schedule = load_schedule([
    {"step": 0, "action": "place", "at": [5, 5]},
    {"step": 250_000, "action": "move", "at": [5, 5], "to": [20, 20]},
    {"step": 500_000, "action": "move", "at": [20, 20], "to": [5, 20]},
    {"step": 750_000, "action": "remove", "at": [5, 20]},
])

cfg = RunConfig(
    side=26, n=60, algo="compression", params={"p": 0.1, "lambda": 4.0},
    seed=3, max_steps=1_000_000, metrics_every=20_000,
)
art = Engine(cfg, schedule).run()

buf = io.StringIO()
buf.write(",".join(analysis.CSV_COLUMNS) + "\n")
for frame in art.metrics:
    buf.write(frame.csv_row() + "\n")
print(buf.getvalue())

last = art.metrics[-1]
print(f"final: phi={last.phi} residual={last.n_residual} "
      f"(all back to searching: {last.phi == 0})")
