"""Write SVG figures: tilings, Green's function heatmap, sectors and a γ = 1/3 circle pattern."""

from __future__ import annotations

import argparse
from pathlib import Path

from dcomplex import tilings
from dcomplex.document import TilingDocument
from dcomplex.labeling import Realization, labeling_from_realization, sector_decomposition
from dcomplex.nonlinear import circle_pattern_extract
from dcomplex.special import PowerParameters, greens_function, power_on_quadgraph
from dcomplex.svg import render_svg


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="figures")
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for kind, radius in (("square", 6), ("dual-kagome", 5), ("penrose", 8)):
        t = tilings.generate(kind, radius=radius, seed=args.seed)
        (out / f"{kind}.svg").write_text(render_svg(TilingDocument.from_tiling(t), "tiling"))

    t = tilings.generate("square", radius=20)
    doc = TilingDocument.from_tiling(t)
    doc.functions["green"] = dict(greens_function(t.quadgraph, t.slopes, t.base))
    (out / "green_square.svg").write_text(render_svg(doc, "heatmap", "green"))

    t = tilings.generate("dual-kagome", radius=5)
    d = t.quadgraph
    alpha = labeling_from_realization(d, Realization(d.positions))
    U = sector_decomposition(d, alpha, t.slopes, t.base)
    doc = TilingDocument.from_tiling(t)
    doc.covering = {"face_sectors": [next((m for m in sorted(U) if all(v in U[m] for v in f)), None)
                                     for f in d.faces]}
    (out / "sectors_kagome.svg").write_text(render_svg(doc, "sectors"))

    t = tilings.generate("square", radius=10)
    d = t.quadgraph
    alpha = labeling_from_realization(d, Realization(d.positions))
    sub, _, z, _ = power_on_quadgraph(d, t.slopes, t.base, 1, PowerParameters(1 / 3), alpha)
    pat = circle_pattern_extract(z, sub, labeling_from_realization(sub, Realization(sub.positions)))
    doc = TilingDocument.from_quadgraph(sub, t.slopes, "square", t.base)
    doc.pattern = pat.to_json()
    (out / "power_pattern.svg").write_text(render_svg(doc, "pattern"))
    print(f"figures written to {out}/")


if __name__ == "__main__":
    main()
