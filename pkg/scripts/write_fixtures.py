#!/usr/bin/env python3
"""Write the bundled fixtures as JSON files usable by the CLI."""

import argparse
import json
from pathlib import Path

from plcontrol import fixtures, save_complex, save_map


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="fixtures_data", help="output directory")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    save_complex(fixtures.d1(), out / "d1.json")
    save_complex(fixtures.d2(), out / "d2.json", positions=fixtures.D2_POSITIONS)
    save_complex(fixtures.bd2(), out / "bd2.json")
    save_complex(fixtures.cone_bd2(), out / "cone_bd2.json")
    save_complex(fixtures.sphere2(), out / "sphere2.json")
    save_complex(fixtures.proj_X(), out / "proj_x.json")
    save_complex(fixtures.proj_Y(), out / "proj_y.json", positions=fixtures.PROJ_Y_POSITIONS)

    save_map(fixtures.map_collapse(), out / "map_collapse.json", "d2.json", "d1.json")
    save_map(fixtures.map_bad(), out / "map_bad.json", "bd2.json", "d1.json")
    save_map(fixtures.proj_map(), out / "proj_map.json", "proj_x.json", "proj_y.json")

    track = {
        "times": [0.0, 1.0],
        "points": [
            {"simplex": ["a"], "coords": [1.0]},
            {"simplex": ["b"], "coords": [1.0]},
        ],
    }
    (out / "track_ab.json").write_text(json.dumps(track, indent=1) + "\n")
    print(f"wrote fixtures to {out}/")


if __name__ == "__main__":
    main()
