"""Mesh assembly and deterministic OBJ/PLY output.

OBJ carries geometry only (17 significant digits, so floats round-trip
exactly); per-vertex scalar channels go to a sidecar ASCII PLY.  Quad
winding follows the grid orientation, which by construction matches the
surface normal.  The angular seam at phi = +/-pi is sampled twice (both
cut edges are grid columns), so single-valued surfaces close up
geometrically without any stitched faces across the cut.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bendneutral import bending_drilling_field
from .errors import InvalidInputError
from .weierstrass import WeierstrassSurface


@dataclass(frozen=True)
class MeshArtifact:
    """Grid mesh with named per-vertex attribute channels.

    Attributes are keyed by channel name; vector channels have shape
    (n_vertices, 3), scalar ones (n_vertices,).
    """

    vertices: np.ndarray
    faces: np.ndarray
    attributes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise InvalidInputError("vertices must have shape (N, 3)")
        if self.faces.size and (self.faces.min() < 0
                                or self.faces.max() >= len(self.vertices)):
            raise InvalidInputError("face indices out of range")


def mesh_from_surface(surface: WeierstrassSurface) -> MeshArtifact:
    """Quad mesh of the sampled immersion with analysis channels.

    Channels: ``normal`` (the shared normal map), ``gauss_curvature``,
    ``stretch`` (conformal factor of the flat-to-surface map), ``drill``
    (its drilling angle about e3, nan on pi-turn loci) and
    ``bending_norm`` (magnitude 1/rho of the universal bending content).
    """
    ns, nt = surface.grid.shape
    vertices = surface.r.reshape(-1, 3)
    idx = np.arange(ns * nt).reshape(ns, nt)
    faces = np.stack([
        idx[:-1, :-1].ravel(),
        idx[1:, :-1].ravel(),
        idx[1:, 1:].ravel(),
        idx[:-1, 1:].ravel(),
    ], axis=1)

    content = bending_drilling_field(surface)
    with np.errstate(invalid="ignore"):
        drill = np.where(content.valid_d,
                         2.0 * np.arctan(content.d[..., 2]), np.nan)
    attributes = {
        "normal": surface.nu.reshape(-1, 3),
        "gauss_curvature": surface.curvature.K.ravel(),
        "stretch": surface.conformal_factor.ravel(),
        "drill": drill.ravel(),
        "bending_norm": np.linalg.norm(content.b, axis=-1).ravel(),
    }
    return MeshArtifact(vertices, faces, attributes)


def face_normal_alignment(mesh: MeshArtifact) -> float:
    """Min dot product between face normals and the vertex-normal channel."""
    v = mesh.vertices
    f = mesh.faces
    d1 = v[f[:, 1]] - v[f[:, 0]]
    d2 = v[f[:, 3]] - v[f[:, 0]]
    n = np.cross(d1, d2)
    norms = np.linalg.norm(n, axis=-1, keepdims=True)
    n = n / np.where(norms > 0, norms, 1.0)
    nu_face = mesh.attributes["normal"][f].mean(axis=1)
    return float(np.einsum("ij,ij->i", n, nu_face).min())


def write_obj(mesh: MeshArtifact, path):
    lines = [f"# minsurf mesh: {len(mesh.vertices)} vertices, {len(mesh.faces)} faces"]
    lines += [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in mesh.vertices]
    lines += ["f " + " ".join(str(i + 1) for i in quad) for quad in mesh.faces]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_obj(path):
    """Read back vertices and (0-based) faces written by :func:`write_obj`."""
    vertices, faces = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                vertices.append([float(p) for p in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(p.split("/")[0]) - 1 for p in parts[1:]])
    return np.asarray(vertices, dtype=float), np.asarray(faces, dtype=int)


def write_ply(mesh: MeshArtifact, path):
    """ASCII PLY with the scalar/vector channels as vertex properties."""
    scalar_names = [k for k, a in mesh.attributes.items() if a.ndim == 1]
    header = [
        "ply", "format ascii 1.0",
        f"element vertex {len(mesh.vertices)}",
        "property double x", "property double y", "property double z",
    ]
    if "normal" in mesh.attributes:
        header += ["property double nx", "property double ny", "property double nz"]
    header += [f"property double {name}" for name in scalar_names]
    header += [f"element face {len(mesh.faces)}",
               "property list uchar int vertex_indices", "end_header"]

    cols = [mesh.vertices]
    if "normal" in mesh.attributes:
        cols.append(mesh.attributes["normal"])
    cols += [mesh.attributes[name][:, None] for name in scalar_names]
    table = np.hstack(cols)

    lines = header
    lines += [" ".join(f"{val:.17g}" for val in row) for row in table]
    lines += ["4 " + " ".join(str(i) for i in quad) for quad in mesh.faces]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
