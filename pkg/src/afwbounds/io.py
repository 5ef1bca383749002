"""File formats: matrices as JSON, spectra as CSV, Hamiltonian spectra as JSON."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .gibbs import HamiltonianSpectrum, spectrum_from_dict
from .operators import ValidationError


def matrix_to_dict(A) -> dict:
    """``{dim, re, im}`` with row-major nested lists."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {A.shape}")
    return {"dim": int(A.shape[0]), "re": A.real.tolist(), "im": A.imag.tolist()}


def matrix_from_dict(d: dict) -> np.ndarray:
    try:
        dim = int(d["dim"])
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d.get("im", np.zeros((dim, dim))), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix record: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValidationError(f"matrix entries do not match dim={dim}")
    return re + 1j * im


def save_matrix(path, A) -> None:
    Path(path).write_text(json.dumps(matrix_to_dict(A)))


def load_matrix(path) -> np.ndarray:
    try:
        return matrix_from_dict(json.loads(Path(path).read_text()))
    except OSError as exc:
        raise ValidationError(f"cannot read matrix file {path}: {exc}") from exc


def save_spectrum_csv(path, eigenvalues) -> None:
    """Write ``index,eigenvalue`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "eigenvalue"])
        for i, v in enumerate(np.asarray(eigenvalues, dtype=float)):
            w.writerow([i, repr(float(v))])


def load_spectrum_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["eigenvalue"]) for r in sorted(rows, key=lambda r: int(r["index"]))])


def load_hamiltonian(path) -> HamiltonianSpectrum:
    """Spectrum file: ``{"family": "oscillator" | "linear" | "explicit", ...}``."""
    try:
        return spectrum_from_dict(json.loads(Path(path).read_text()))
    except OSError as exc:
        raise ValidationError(f"cannot read spectrum file {path}: {exc}") from exc


def save_hamiltonian(path, spec: HamiltonianSpectrum) -> None:
    Path(path).write_text(json.dumps(spec.to_dict()))
