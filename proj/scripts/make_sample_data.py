#!/usr/bin/env python3
"""Regenerates the checked-in sample project and preset library.

Outputs indexed PNG masks whose palette indices are taxonomy class ids,
an RGB drawing rendered from the sample mask, a rig, a 30-frame motion
clip, and a phoneme track.
"""

import math
import os

import numpy as np
from PIL import Image

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")

# class ids, matching data/taxonomy.txt
BG, HEAD, HAIR, EAR, NECK, UTORSO, LTORSO = 0, 1, 2, 3, 4, 5, 6
UARM, LARM, HAND, FINGER, ULEG, LLEG, FOOT = 7, 8, 9, 10, 11, 12, 13
ACCESSORY, EYE, EYEBROW, EYELASH, PUPIL, NOSE = 14, 15, 16, 17, 18, 19
MOUTH, TEETH, TONGUE, FACIAL_HAIR, CHEEK, GLASSES = 20, 21, 22, 23, 24, 25
N_CLASSES = 26

PALETTE = [
    (255, 255, 255), (244, 204, 161), (90, 56, 37), (232, 180, 130),
    (240, 196, 150), (66, 120, 200), (50, 90, 160), (244, 204, 161),
    (236, 188, 140), (248, 212, 170), (250, 220, 180), (120, 80, 60),
    (140, 95, 70), (40, 40, 45), (200, 60, 60), (250, 250, 250),
    (70, 45, 30), (60, 40, 30), (30, 30, 35), (220, 160, 120),
    (150, 40, 50), (245, 245, 235), (210, 90, 100), (80, 55, 40),
    (235, 150, 140), (60, 60, 70),
]


def save_indexed(mask, path):
    img = Image.fromarray(mask.astype(np.uint8), mode="P")
    flat = []
    for rgb in PALETTE:
        flat.extend(rgb)
    img.putpalette(flat)
    img.save(path, optimize=False)


def fill_ellipse(mask, cx, cy, rx, ry, cls):
    h, w = mask.shape
    for y in range(max(0, cy - ry), min(h, cy + ry + 1)):
        for x in range(max(0, cx - rx), min(w, cx + rx + 1)):
            if ((x - cx) / rx) ** 2 + ((y - cy) / ry) ** 2 <= 1.0:
                mask[y, x] = cls


def fill_rect(mask, x0, y0, x1, y1, cls):
    mask[y0:y1 + 1, x0:x1 + 1] = cls


# ---------------------------------------------------------------- presets

def make_presets():
    out = os.path.join(DATA, "presets")
    os.makedirs(out, exist_ok=True)
    manifest = []

    def patch(name, category, draw):
        m = np.zeros((24, 40), dtype=np.uint8)
        draw(m)
        save_indexed(m, os.path.join(out, name + ".png"))
        manifest.append(f"preset {name} {category} {name}.png")

    patch("neutral", "mouth", lambda m: fill_rect(m, 9, 11, 30, 12, MOUTH))
    patch("MBP", "mouth", lambda m: fill_rect(m, 7, 11, 32, 13, MOUTH))
    patch("AI", "mouth", lambda m: fill_ellipse(m, 20, 12, 12, 9, MOUTH))
    patch("E", "mouth", lambda m: fill_ellipse(m, 20, 12, 14, 5, MOUTH))
    patch("O", "mouth", lambda m: fill_ellipse(m, 20, 12, 8, 8, MOUTH))
    patch("U", "mouth", lambda m: fill_ellipse(m, 20, 12, 5, 5, MOUTH))
    patch("WQ", "mouth", lambda m: fill_ellipse(m, 20, 12, 6, 4, MOUTH))
    patch("etc", "mouth", lambda m: fill_ellipse(m, 20, 12, 10, 3, MOUTH))

    def fv(m):
        fill_ellipse(m, 20, 12, 12, 5, MOUTH)
        fill_rect(m, 14, 10, 26, 11, TEETH)

    def ll(m):
        fill_ellipse(m, 20, 12, 10, 8, MOUTH)
        fill_ellipse(m, 20, 16, 5, 3, TONGUE)

    patch("FV", "mouth", fv)
    patch("L", "mouth", ll)

    def eye_open(m):
        fill_ellipse(m, 20, 12, 7, 7, EYE)
        fill_ellipse(m, 20, 12, 2, 2, PUPIL)

    patch("eye_open", "eye", eye_open)
    patch("eye_closed", "eye", lambda m: fill_rect(m, 13, 11, 27, 12, EYE))

    with open(os.path.join(out, "manifest.txt"), "w") as f:
        f.write("# preset name category file\n")
        f.write("\n".join(manifest) + "\n")


# ----------------------------------------------------------- sample figure

W, H = 200, 260


def make_sample_mask():
    m = np.zeros((H, W), dtype=np.uint8)

    # torso and limbs first, head last so it wins overlaps
    fill_rect(m, 75, 97, 125, 140, UTORSO)
    fill_rect(m, 78, 140, 122, 165, LTORSO)
    fill_rect(m, 94, 85, 106, 98, NECK)

    # arms, horizontal
    fill_rect(m, 45, 102, 75, 114, UARM)
    fill_rect(m, 20, 102, 45, 114, LARM)
    fill_rect(m, 10, 100, 20, 116, HAND)
    fill_rect(m, 125, 102, 155, 114, UARM)
    fill_rect(m, 155, 102, 180, 114, LARM)
    fill_rect(m, 180, 100, 190, 116, HAND)

    # legs; both feet point to the viewer's right
    fill_rect(m, 82, 165, 96, 195, ULEG)
    fill_rect(m, 84, 195, 94, 225, LLEG)
    fill_rect(m, 84, 225, 104, 237, FOOT)
    fill_rect(m, 106, 165, 120, 195, ULEG)
    fill_rect(m, 108, 195, 118, 225, LLEG)
    fill_rect(m, 108, 225, 134, 237, FOOT)

    # head and face
    fill_ellipse(m, 100, 55, 32, 32, HEAD)
    fill_ellipse(m, 88, 48, 4, 4, EYE)
    fill_ellipse(m, 112, 48, 4, 4, EYE)
    fill_ellipse(m, 100, 58, 2, 2, NOSE)
    fill_ellipse(m, 100, 71, 10, 4, MOUTH)
    return m


def make_drawing(mask):
    img = np.full((H, W, 3), 255, dtype=np.uint8)
    for cls in range(1, N_CLASSES):
        img[mask == cls] = PALETTE[cls]

    # crayon-style dark outline where neighboring classes differ
    outline = np.zeros((H, W), dtype=bool)
    for dy, dx in ((0, 1), (0, -1), (1, 0), (-1, 0)):
        shifted = np.roll(mask, (dy, dx), axis=(0, 1))
        outline |= (mask != 0) & (mask != shifted)
    img[outline] = (45, 30, 25)
    return img


JOINTS = {
    "head": (100, 55),
    "chest": (100, 110),
    "pelvis": (100, 152),
    "shoulder_l": (72, 108), "elbow_l": (45, 108), "wrist_l": (22, 108),
    "shoulder_r": (128, 108), "elbow_r": (155, 108), "wrist_r": (178, 108),
    "hip_l": (89, 170), "knee_l": (89, 197), "ankle_l": (89, 222),
    "hip_r": (113, 170), "knee_r": (113, 197), "ankle_r": (113, 222),
}

BONES = [
    ("chest", "head"), ("chest", "pelvis"),
    ("chest", "shoulder_l"), ("shoulder_l", "elbow_l"), ("elbow_l", "wrist_l"),
    ("chest", "shoulder_r"), ("shoulder_r", "elbow_r"), ("elbow_r", "wrist_r"),
    ("pelvis", "hip_l"), ("hip_l", "knee_l"), ("knee_l", "ankle_l"),
    ("pelvis", "hip_r"), ("hip_r", "knee_r"), ("knee_r", "ankle_r"),
]


def write_rig(path):
    with open(path, "w") as f:
        for name, (x, y) in JOINTS.items():
            f.write(f"joint {name} {x} {y}\n")
        for parent, child in BONES:
            f.write(f"bone {parent} {child}\n")


def rotate_about(pivot, point, theta):
    px, py = pivot
    x, y = point[0] - px, point[1] - py
    c, s = math.cos(theta), math.sin(theta)
    return (px + c * x - s * y, py + s * x + c * y)


def write_motion(path, n_frames=30, fps=15.0):
    names = list(JOINTS.keys())
    with open(path, "w") as f:
        f.write(f"fps {fps}\n")
        f.write("joints " + " ".join(names) + "\n")
        for frame in range(n_frames):
            t = frame / n_frames
            bob = 1.0 * math.sin(2 * math.pi * t)
            arm = 0.35 * math.sin(2 * math.pi * t)
            sway = 3.0 * math.sin(2 * math.pi * t)
            pose = {}
            for name, (x, y) in JOINTS.items():
                pose[name] = (float(x), float(y))
            # wave both arms about the shoulders
            for side, sign in (("l", 1.0), ("r", -1.0)):
                pivot = JOINTS[f"shoulder_{side}"]
                for j in (f"elbow_{side}", f"wrist_{side}"):
                    pose[j] = rotate_about(pivot, JOINTS[j], sign * arm)
            # legs keep a slight rightward knee bend; ankles sway gently
            for side in ("l", "r"):
                hx, hy = JOINTS[f"hip_{side}"]
                pose[f"knee_{side}"] = (hx + 2.0, JOINTS[f"knee_{side}"][1])
                pose[f"ankle_{side}"] = (hx + sway * 0.5, JOINTS[f"ankle_{side}"][1])
            row = []
            for name in names:
                x, y = pose[name]
                row.append(f"{x + 0.0:.4f} {y + bob:.4f}")
            f.write(" ".join(row) + "\n")


PHONEMES = """\
0.10 0.25 HH
0.25 0.40 EH
0.40 0.55 L
0.55 0.75 OW
0.90 1.05 W
1.05 1.20 ER
1.20 1.35 L
1.35 1.50 D
"""

CONFIG = """\
# sample project
image = drawing.png
mask = mask.png
taxonomy = ../taxonomy.txt
rig = rig.txt
motion = motion.txt
presets = ../presets
phonemes = phonemes.txt
visemes = ../visemes.txt
output = out

mesh_spacing = 10
arap_tolerance = 1e-4
arap_max_iterations = 100
fps = 12
t_shadow = 0.25
t_highlight = 0.8
shade_strength = 1.0
light = 0.75, 0.25, 1.0
"""


def main():
    make_presets()
    sample = os.path.join(DATA, "sample")
    os.makedirs(sample, exist_ok=True)

    mask = make_sample_mask()
    save_indexed(mask, os.path.join(sample, "mask.png"))
    Image.fromarray(make_drawing(mask)).save(os.path.join(sample, "drawing.png"))
    write_rig(os.path.join(sample, "rig.txt"))
    write_motion(os.path.join(sample, "motion.txt"))
    with open(os.path.join(sample, "phonemes.txt"), "w") as f:
        f.write(PHONEMES)
    with open(os.path.join(sample, "config.txt"), "w") as f:
        f.write(CONFIG)
    print("sample data written under", os.path.abspath(DATA))


if __name__ == "__main__":
    main()
