"""Filters for randomly drawn instances whose rank decisions are clear.

Every rank decision compares a relative quantity against a cutoff: eigenvalues
against ``rank_rtol = 1e-10`` and singular values of ``T^{1/2} y`` (or
principal-angle sines) against ``sqrt(rank_rtol) = 1e-5``. Instances whose
quantities fall near a cutoff have no tolerance-independent answer, so the
property tests draw instances where they stay at least two orders of
magnitude away from it.
"""

import numpy as np

from shortdecomp.linalg import null_basis, psd_factor, psd_sqrt


def _clear(values, cut, margin=100.0):
    values = np.asarray(values, dtype=float)
    return bool(np.all((values <= cut / margin) | (values >= cut * margin)))


def clear_spectrum(A) -> bool:
    w = np.linalg.eigvalsh(A)
    top = max(w[-1], 0.0)
    return top == 0 or _clear(np.abs(w) / top, 1e-10, 1e4)


def clear_directions(A, Y) -> bool:
    """Singular values of ``A^{1/2} Y`` relative to ``|A^{1/2}|``."""
    if Y.shape[1] == 0:
        return True
    top = np.sqrt(max(np.linalg.eigvalsh(A)[-1], 0.0))
    if top == 0:
        return True
    s = np.linalg.svd(psd_sqrt(A) @ Y, compute_uv=False)
    return _clear(s / top, 1e-5)


def clear_angles(A, B) -> bool:
    VA, VB = psd_factor(A), psd_factor(B)
    if VA.shape[1] == 0 or VB.shape[1] == 0:
        return True
    QA, _ = np.linalg.qr(VA)
    QB, _ = np.linalg.qr(VB)
    cos = np.clip(np.linalg.svd(QA.conj().T @ QB, compute_uv=False), 0, 1)
    return _clear(np.sqrt(1 - cos ** 2), 1e-5)


def clear_pair(A, B) -> bool:
    return (clear_spectrum(A) and clear_spectrum(B) and clear_angles(A, B)
            and clear_directions(A, null_basis(B).basis)
            and clear_directions(B, null_basis(A).basis))
