#!/usr/bin/env python3
"""Writes data/household_vectors.txt.

Each word gets its category's base direction plus isotropic noise, so words
in one category sit close in cosine distance and categories are roughly
orthogonal. Deterministic for a given seed.
"""
import argparse

import numpy as np

CATEGORIES = {
    "food": [
        "carrot", "banana", "apple", "lemon", "orange", "pear", "tomato", "corn", "bread",
        "cheese", "egg", "pepper", "onion", "potato", "cookie", "snack", "snack_packet",
        "beans", "ketchup", "milk", "butter", "coffee_pod", "pod", "lettuce", "grapes",
        "strawberry", "chocolate", "cereal", "cucumber", "eggplant", "peach", "lime",
        "mustard", "sauce", "cracker", "chips", "sandwich", "donut", "muffin", "rice",
    ],
    "container": [
        "cup", "mug", "bowl", "plate", "teapot", "kettle", "pot", "pan", "bottle", "can",
        "jar", "glass", "tray", "box", "basket", "bin", "lid", "container", "dish",
        "pitcher", "vase", "bucket", "tin", "carton", "thermos", "saucepan", "colander",
        "tupperware", "crate", "tumbler",
    ],
    "fixture": [
        "drawer", "top_drawer", "microwave", "microwave_door", "stove", "oven", "toaster_oven",
        "oven_tray", "cabinet", "shelf", "coffee_machine", "sink", "fridge", "table",
        "counter", "dishwasher", "door", "toaster", "burner", "faucet", "cupboard", "rack",
        "countertop", "desk", "dresser", "stovetop", "knob", "handle", "switch", "button",
    ],
    "tool": [
        "marker", "pen", "pencil", "screwdriver", "spoon", "fork", "knife", "spatula",
        "scissors", "hammer", "brush", "stapler", "ladle", "whisk", "tongs", "wrench",
        "pliers", "tape", "ruler", "eraser", "highlighter", "chopsticks", "screw", "nail",
    ],
    "cloth": [
        "towel", "cloth", "cloth_towel", "sponge", "rag", "napkin", "dishcloth",
        "tissue", "glove", "sock", "shirt", "blanket", "scarf", "hat", "mitt",
    ],
    "toy": [
        "block", "cube", "ball", "toy", "duck", "doll", "car", "puzzle", "lego", "dice",
        "figurine", "teddy_bear", "rubber_duck",
    ],
    "misc": [
        "board", "whiteboard", "mark", "paper", "book", "remote", "phone", "notebook",
        "laptop", "keyboard", "mouse", "cable", "charger", "wallet", "keys", "lamp",
        "plant", "candle", "clock", "frame", "battery", "card", "envelope", "folder",
        "stain", "spill", "crumbs", "dust", "water", "coffee",
    ],
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/household_vectors.txt")
    ap.add_argument("--dims", type=int, default=24)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    lines = []
    for words in CATEGORIES.values():
        base = rng.normal(size=args.dims)
        base /= np.linalg.norm(base)
        for w in words:
            noise = rng.normal(size=args.dims) / np.sqrt(args.dims)
            v = base + args.alpha * noise
            lines.append(w + " " + " ".join(f"{x:.6f}" for x in v))
    with open(args.out, "w") as f:
        f.write(f"# {len(lines)} words, {args.dims} dims, alpha {args.alpha}, seed {args.seed}\n")
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
