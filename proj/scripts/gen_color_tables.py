"""Regenerates src/colormaps.inc and src/css_colors.inc from matplotlib."""
import pathlib

import matplotlib
from matplotlib import colormaps
from matplotlib.colors import CSS4_COLORS, to_rgb

root = pathlib.Path(__file__).resolve().parent.parent / "src"

names = sorted(n for n in colormaps if not n.endswith("_r"))
lines = [f"// Generated by scripts/gen_color_tables.py from matplotlib {matplotlib.__version__}.", ""]
for name in names:
    cmap = colormaps[name].resampled(256)
    values = []
    for i in range(256):
        r, g, b, _ = cmap(i)
        values.extend(int(round(c * 255)) for c in (r, g, b))
    body = ",".join(str(v) for v in values)
    lines.append(f'{{"{name}", {{{body}}}}},')
(root / "colormaps.inc").write_text("\n".join(lines) + "\n")

lines = ["// CSS named colors, generated by scripts/gen_color_tables.py.", ""]
for name in sorted(CSS4_COLORS):
    r, g, b = (int(round(c * 255)) for c in to_rgb(CSS4_COLORS[name]))
    lines.append(f'{{"{name}", {{{r}, {g}, {b}}}}},')
(root / "css_colors.inc").write_text("\n".join(lines) + "\n")
print(len(names), "colormaps;", len(CSS4_COLORS), "css colors")
