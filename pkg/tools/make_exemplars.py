"""Regenerate the bundled exemplar SVGs in src/curvesynth/data/exemplars."""

import math
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "src/curvesynth/data/exemplars"


def svg(paths, size=(250, 250)):
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size[0]} {size[1]}">',
    ]
    for d in paths:
        lines.append(f'  <path d="{d}" fill="none" stroke="black"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def stripes():
    return svg([f"M{x} 0 L{x} 250" for x in range(25, 250, 50)])


def grid():
    paths = [f"M{x} 10 L{x} 240" for x in range(45, 250, 80)]
    paths += [f"M10 {y} L240 {y}" for y in range(45, 250, 80)]
    return svg(paths)


def waves():
    # Half-period 80 keeps ~2 samples per half-wave even at the coarsest
    # sampling distance, so hierarchical resampling preserves the shape.
    paths = []
    for y in range(60, 300, 90):
        parts = [f"M0 {y}"]
        for x in range(0, 320, 160):
            parts.append(f"Q{x + 40} {y - 65} {x + 80} {y}")
            parts.append(f"Q{x + 120} {y + 65} {x + 160} {y}")
        paths.append(" ".join(parts))
    return svg(paths, size=(320, 300))


def scales():
    # Wide shallow arcs meeting at sharp corners; arc chord 110 so the
    # coarsest sampling still captures each arc with several samples.
    paths = []
    for row in range(4):
        y = 90 + row * 80
        shift = 55 if row % 2 else 0
        parts = [f"M{-55 + shift} {y}"]
        for i in range(4):
            x = -55 + shift + i * 110
            parts.append(f"Q{x + 55} {y - 65} {x + 110} {y}")
        paths.append(" ".join(parts))
    return svg(paths, size=(330, 340))


def tree():
    lines = [
        ((125, 250), (125, 160)),
        ((125, 160), (75, 95)),
        ((125, 160), (175, 95)),
        ((75, 95), (45, 30)),
        ((75, 95), (105, 30)),
        ((175, 95), (145, 30)),
        ((175, 95), (205, 30)),
    ]
    return svg([f"M{a[0]} {a[1]} L{b[0]} {b[1]}" for a, b in lines])


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, fn in [
        ("stripes", stripes),
        ("grid", grid),
        ("waves", waves),
        ("scales", scales),
        ("tree", tree),
    ]:
        (OUT / f"{name}.svg").write_text(fn())
        print(f"wrote {name}.svg")


if __name__ == "__main__":
    main()
