"""Smoke test for the foldnet Python module.

Build and install first:

    pip install --no-build-isolation -e crates/python
    python3 python/smoke_test.py
"""

import math
import os
import sys
import tempfile

import foldnet


def icosphere(subdivisions):
    t = (1 + 5 ** 0.5) / 2
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
             (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
             (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    verts = [tuple(c / math.sqrt(sum(x * x for x in v)) for c in v) for v in verts]
    tris = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
            (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
            (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
            (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    for _ in range(subdivisions):
        mid = {}

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in mid:
                p = [(x + y) / 2 for x, y in zip(verts[a], verts[b])]
                n = math.sqrt(sum(x * x for x in p))
                verts.append(tuple(x / n for x in p))
                mid[key] = len(verts) - 1
            return mid[key]

        out = []
        for a, b, c in tris:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            out += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        tris = out
    return verts, tris


def dist(p, q):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))


def check_isometry(mesh, net):
    verts = mesh.vertices()
    for tri, flat in zip(mesh.triangles(), net.triangles()):
        for i in range(3):
            j = (i + 1) % 3
            l3 = dist(verts[tri[i]], verts[tri[j]])
            l2 = dist(flat[i], flat[j])
            assert abs(l3 - l2) <= 1e-9 * l3, (l3, l2)


def main():
    verts, tris = icosphere(2)
    mesh = foldnet.Mesh(verts, tris)
    assert (mesh.vertex_count, mesh.face_count, mesh.genus) == (162, 320, 0), mesh

    net = foldnet.unfold(mesh, seed=1)
    assert net.status == "success", net
    assert net.remaining_uncollapses == 0
    assert len(net.triangles()) == 320
    check_isometry(net.mesh, net)
    assert 0 < net.coverage_percent <= 100
    assert net.aspect_ratio >= 1
    assert net.hausdorff_percent is None
    assert net.stats()["input_faces"] == 320
    svg = net.svg(scale=20.0)
    assert svg.startswith("<?xml") or svg.startswith("<svg")
    assert svg.count("<polygon") == 320

    again = foldnet.unfold(mesh, seed=1)
    assert again.triangles() == net.triangles()

    coarse = foldnet.unfold(mesh, seed=2, step_budget=0)
    assert coarse.status == "approximative", coarse
    assert coarse.remaining_uncollapses > 0
    assert coarse.hausdorff_percent is not None
    check_isometry(coarse.mesh, coarse)

    direct = foldnet.unfold(mesh, seed=3, direct=True)
    assert direct.status == "success"

    small = mesh.decimate(40, strategy="se/mp")
    assert small.face_count <= 40 and small.genus == 0

    try:
        foldnet.unfold(mesh, strategy="x/y")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown strategy accepted")
    try:
        foldnet.Mesh([(0, 0, 0), (1, 0, 0), (0, 1, 0)], [(0, 1, 1)])
    except ValueError:
        pass
    else:
        raise AssertionError("degenerate face accepted")
    try:
        foldnet.unfold(foldnet.Mesh([(0, 0, 0), (1, 0, 0), (0, 1, 0)], [(0, 1, 2)]))
    except ValueError:
        pass
    else:
        raise AssertionError("open mesh accepted by default")

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "sphere.obj")
        with open(path, "w") as f:
            f.writelines(f"v {x} {y} {z}\n" for x, y, z in verts)
            f.writelines(f"f {a + 1} {b + 1} {c + 1}\n" for a, b, c in tris)
        assert foldnet.Mesh.load(path).face_count == 320
        try:
            foldnet.Mesh.load(os.path.join(d, "missing.obj"))
        except OSError:
            pass
        else:
            raise AssertionError("missing file loaded")

    print("python smoke test passed:", net)
    return 0


if __name__ == "__main__":
    sys.exit(main())
