"""The twelve generic normal forms reduced to planar constrained systems.

Prints the reduction and the nature of the origin for each entry and writes
one SVG portrait per normal form to ``demos/out/``.
"""

# %%
from pathlib import Path

from impasse_lab.cli import main
from impasse_lab.reduction import TAKENS_NAMES, takens_catalog
from impasse_lab.report import catastrophe_report

OUT = Path(__file__).with_name("out")
OUT.mkdir(exist_ok=True)

# %%
for name in TAKENS_NAMES:
    r = catastrophe_report(takens_catalog(name))
    origin = r["origin"]
    where = "on impasse" if origin["on_impasse"] else "no impasse at origin"
    print(f"{name:15s} {r['reduction']['text']:32s} origin: {origin['label']} ({where})")

# %% Portraits through the command-line entry point.
for name in TAKENS_NAMES:
    main(["catastrophe", name, "--svg", str(OUT / f"{name}.svg"), "--grid", "5x5"])
print("wrote", len(TAKENS_NAMES), "portraits to", OUT)
