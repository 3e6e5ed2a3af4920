"""Procedural human-scale hand asset for tests, demos, and the CLI.

A box palm plus five articulated three-segment fingers, roughly 0.18 m from
wrist to middle fingertip. The flat hand lies in the xz-plane with the palm
facing -y, fingers pointing +z, and the thumb off the +x side near the
wrist. Segment boxes leave sub-millimeter gaps so the union stays closed
and consistently oriented, which the inside tests rely on. The thumb is
long and rooted close to the wrist so that the opened pre-grasp tilts the
hand's heading well below the finger plane; that keeps the standard
standoff collision-free on palm-sized objects.
"""

from __future__ import annotations

import numpy as np

from .asset import NUM_ANGLES, NUM_JOINTS, NUM_POSE_COEFFS, HandAsset

# Skeleton dimensions (meters).
_PALM_HALF_WIDTH = 0.042
_PALM_HALF_THICK = 0.012
_PALM_LENGTH = 0.072
_SEGMENT_GAP = 0.0005  # keeps adjacent segment boxes disjoint
_FINGER_HALF = {
    "thumb": (0.009, 0.008),
    "index": (0.008, 0.0055),
    "finger": (0.008, 0.007),
    "pinky": (0.007, 0.006),
}
# Contact support lives on the distal pads only (see the segment builder):
# vertices that cannot all reach an object surface would only drag the hand
# into it under a squared-distance contact objective.

_THUMB_AXIS = np.array([1.0, 0.0, 1.0]) / np.sqrt(2.0)
# Rotating about this axis moves the thumb tip toward -y (palm side).
_THUMB_FLEX = np.array([1.0, 0.0, -1.0]) / np.sqrt(2.0)
_X = np.array([1.0, 0.0, 0.0])
_Y = np.array([0.0, 1.0, 0.0])

# joint ids: 0 wrist; thumb 1-3; index 4-6; middle 7-9; ring 10-12; pinky 13-15
_PARENTS = np.array([-1, 0, 1, 2, 0, 4, 5, 0, 7, 8, 0, 10, 11, 0, 13, 14], dtype=np.int64)
_FINGER_JOINTS = {
    "thumb": (1, 2, 3),
    "index": (4, 5, 6),
    "middle": (7, 8, 9),
    "ring": (10, 11, 12),
    "pinky": (13, 14, 15),
}
_BASES = {
    "thumb": np.array([0.042, -0.0015, 0.028]),
    "index": np.array([0.033, 0.0015, 0.078]),
    "middle": np.array([0.011, 0.0, 0.080]),
    "ring": np.array([-0.011, 0.0, 0.076]),
    "pinky": np.array([-0.033, 0.0, 0.070]),
}
_SEGMENT_LENGTHS = {
    "thumb": (0.048, 0.038, 0.030),
    "index": (0.035, 0.030, 0.027),
    "middle": (0.037, 0.033, 0.030),
    "ring": (0.035, 0.031, 0.028),
    "pinky": (0.029, 0.025, 0.022),
}
_AXES = {name: (np.array([0.0, 0.0, 1.0]) if name != "thumb" else _THUMB_AXIS) for name in _BASES}


def _grid_box(lo, hi, segments):
    """Raw axis-aligned grid box: (verts, tris) with outward winding."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    segs = tuple(max(1, int(s)) for s in segments)
    verts: list = []
    tris: list = []
    for axis in range(3):
        for sign in (+1, -1):
            u_axis, v_axis = [(1, 2), (0, 2), (0, 1)][axis]
            nu, nv = segs[u_axis], segs[v_axis]
            base = len(verts)
            for i in range(nu + 1):
                for j in range(nv + 1):
                    p = np.empty(3)
                    p[axis] = hi[axis] if sign > 0 else lo[axis]
                    p[u_axis] = lo[u_axis] + (hi[u_axis] - lo[u_axis]) * i / nu
                    p[v_axis] = lo[v_axis] + (hi[v_axis] - lo[v_axis]) * j / nv
                    verts.append(p)
            for i in range(nu):
                for j in range(nv):
                    a = base + i * (nv + 1) + j
                    b = a + (nv + 1)
                    quad = (a, b, b + 1, a + 1)
                    if (sign < 0) ^ (axis == 1):
                        quad = quad[::-1]
                    tris.append((quad[0], quad[1], quad[2]))
                    tris.append((quad[0], quad[2], quad[3]))
    return np.array(verts), np.array(tris, dtype=np.int64)


def _weld(verts: np.ndarray, tris: np.ndarray):
    """Merge exactly coincident vertices (grid seams within one box)."""
    quant = np.round(verts * 1e9).astype(np.int64)
    _, first, inverse = np.unique(quant, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first)
    remap = np.empty(len(first), dtype=np.int64)
    remap[order] = np.arange(len(first))
    return verts[first[order]], remap[inverse[tris]]


def _segment_frame(axis: np.ndarray):
    width_dir = np.cross(_Y, axis)
    width_dir = width_dir / np.linalg.norm(width_dir)
    return width_dir, _Y


def build_test_asset() -> HandAsset:
    """Deterministic 16-joint procedural hand satisfying the asset invariants."""
    rest = np.zeros((NUM_JOINTS, 3))
    for name, (j0, j1, j2) in _FINGER_JOINTS.items():
        axis = _AXES[name]
        l0, l1, _ = _SEGMENT_LENGTHS[name]
        rest[j0] = _BASES[name]
        rest[j1] = rest[j0] + axis * l0
        rest[j2] = rest[j1] + axis * l1

    all_verts: list = []
    all_tris: list = []
    part_tags: list = []

    def add_part(verts, tris, tag):
        base = sum(len(v) for v in all_verts)
        all_verts.append(verts)
        all_tris.append(tris + base)
        part_tags.extend([tag] * len(verts))
        return base

    palm_v, palm_t = _grid_box(
        (-_PALM_HALF_WIDTH, -_PALM_HALF_THICK, 0.0),
        (_PALM_HALF_WIDTH, _PALM_HALF_THICK, _PALM_LENGTH),
        (8, 2, 8),
    )
    palm_v, palm_t = _weld(palm_v, palm_t)
    add_part(palm_v, palm_t, ("palm", 0, 0, 0.0))

    segment_axial: list = [None] * len(palm_v)
    fingertip_ids = {}
    contact_ids: list = []
    for name, joints in _FINGER_JOINTS.items():
        axis = _AXES[name]
        width_dir, thick_dir = _segment_frame(axis)
        kind = name if name in _FINGER_HALF else "finger"
        half_w, half_t = _FINGER_HALF[kind]
        lengths = _SEGMENT_LENGTHS[name]
        for seg in range(3):
            joint = joints[seg]
            start = rest[joint]
            length = lengths[seg]
            lv, lt = _grid_box(
                (_SEGMENT_GAP, -half_w, -half_t),
                (length - _SEGMENT_GAP, half_w, half_t),
                (4, 4, 2),
            )
            lv, lt = _weld(lv, lt)
            # Elliptical chamfer: pull the long-edge corners in so contact
            # happens on faces, never on sharp box corners.
            r = np.hypot(lv[:, 1] / half_w, lv[:, 2] / half_t)
            shrink = np.where(r > 1.0, 1.0 / np.maximum(r, 1.0), 1.0)
            lv[:, 1] *= shrink
            lv[:, 2] *= shrink
            if seg == 2:
                # Taper the fingertip so the tip region stays rounded too.
                u = lv[:, 0] / length
                s = 1.0 - 0.65 * np.clip((u - 0.55) / 0.45, 0.0, 1.0)
                lv[:, 1] *= s
                lv[:, 2] *= s
            # Local axes: (axis, width, thickness) form a frame.
            frame = np.stack([axis, width_dir, thick_dir], axis=1)
            world = start + lv @ frame.T
            parent = int(_PARENTS[joint])
            base = add_part(world, lt, ("seg", joint, parent, length, seg))
            segment_axial.extend(list(lv[:, 0]))
            if seg == 2:
                if name in ("index", "middle", "ring"):
                    # Contact support: the nearly flat palmar pads of the
                    # fingers that reliably land. The thumb and pinky carry
                    # no contact pull; their pads often cannot lay flat on
                    # curved flanks, and a residual squared-distance pull
                    # would drive them into the object. They are positioned
                    # by the penetration and fingertip terms instead.
                    pad = (
                        (lv[:, 2] < -0.85 * half_t)
                        & (lv[:, 0] > 0.08 * length)
                        & (lv[:, 0] < 0.60 * length)
                    )
                    contact_ids.extend((base + np.where(pad)[0]).tolist())
                tip_nominal = start + axis * (length - _SEGMENT_GAP)
                local_id = np.argmin(np.linalg.norm(world - tip_nominal, axis=1))
                fingertip_ids[name] = base + int(local_id)

    vertices = np.concatenate(all_verts)
    faces = np.concatenate(all_tris)

    weights = np.zeros((len(vertices), NUM_JOINTS))
    for i, tag in enumerate(part_tags):
        if tag[0] == "palm":
            weights[i, 0] = 1.0
            continue
        _, joint, parent, length, _ = tag
        # Blend toward the parent joint near the segment root so the skin
        # bends smoothly instead of shearing at the gap.
        axial = segment_axial[i]
        frac = np.clip(axial / (0.35 * length), 0.0, 1.0)
        w_parent = 0.45 * (1.0 - frac)
        weights[i, parent] = w_parent
        weights[i, joint] = 1.0 - w_parent

    contact = np.array(sorted(contact_ids), dtype=np.int64)

    basis = np.zeros((NUM_ANGLES, NUM_POSE_COEFFS))

    def put(col, joint, vec):
        basis[3 * (joint - 1) : 3 * joint, col] += np.asarray(vec, dtype=float)

    fingers4 = ("index", "middle", "ring", "pinky")
    # c0: coordinated four-finger curl
    for name in fingers4:
        j0, j1, j2 = _FINGER_JOINTS[name]
        put(0, j0, 0.55 * _X)
        put(0, j1, 0.50 * _X)
        put(0, j2, 0.40 * _X)
    # c1: thumb opposition, almost entirely at the base so the thumb swings
    # as a stiff lever and lands pad-first instead of hooking through. The
    # four fingers lift slightly with it, widening the mouth like a real
    # pre-grasp synergy.
    put(1, 1, 1.15 * _THUMB_FLEX)
    put(1, 2, 0.10 * _THUMB_FLEX)
    for name, lift in zip(fingers4, (0.29, 0.14, 0.08, 0.08)):
        put(1, _FINGER_JOINTS[name][0], -lift * _X)
    # c2: finger spread
    put(2, 4, 0.30 * _Y)
    put(2, 7, 0.05 * _Y)
    put(2, 10, -0.20 * _Y)
    put(2, 13, -0.45 * _Y)
    put(2, 1, 0.20 * _Y)
    # c3: gentle thumb curl
    put(3, 1, 0.28 * _THUMB_FLEX)
    put(3, 2, 0.22 * _THUMB_FLEX)
    put(3, 3, 0.12 * _THUMB_FLEX)
    # c4..c7: per-finger curls
    for col, name in zip((4, 5, 6, 7), fingers4):
        j0, j1, j2 = _FINGER_JOINTS[name]
        put(col, j0, 0.55 * _X)
        put(col, j1, 0.55 * _X)
        put(col, j2, 0.45 * _X)
    # c8..c11: per-finger distal curls
    for col, name in zip((8, 9, 10, 11), fingers4):
        _, j1, j2 = _FINGER_JOINTS[name]
        put(col, j1, 0.35 * _X)
        put(col, j2, 0.55 * _X)
    # c12: thumb swing across the palm
    put(12, 1, -0.55 * _Y)
    put(12, 2, -0.25 * _Y)
    # c13: ulnar cup
    put(13, 10, 0.30 * _X - 0.15 * _Y)
    put(13, 13, 0.35 * _X - 0.25 * _Y)
    # c14: index extension against middle curl
    put(14, 4, -0.35 * _X)
    put(14, 5, -0.30 * _X)
    put(14, 6, -0.25 * _X)
    put(14, 7, 0.15 * _X)

    theta_flat = np.zeros(NUM_POSE_COEFFS)
    theta_flat[0] = -0.20
    theta_flat[1] = 0.10
    theta_flat[3] = 0.06
    theta_flat[8] = -0.04
    theta_flat[12] = 0.03
    # With mean = -basis @ theta_flat the flat coefficients produce exactly
    # zero joint rotations, so theta=0 is a slightly curled pose.
    mean = -basis @ theta_flat

    asset = HandAsset(
        template=vertices,
        faces=faces,
        parents=_PARENTS.copy(),
        rest_joints=rest,
        weights=weights,
        pose_mean=mean,
        pose_basis=basis,
        theta_flat=theta_flat,
        fingertip_vertices=np.array(
            [fingertip_ids[n] for n in ("thumb", "index", "middle", "ring", "pinky")],
            dtype=np.int64,
        ),
        contact_vertices=contact,
        chirality="right",
    )
    asset.validate()
    return asset
