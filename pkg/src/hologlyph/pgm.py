"""Binary PGM (P5) image I/O.

All grayscale images in this toolkit travel as 8-bit binary portable graymaps.
Float values in [0, 1] map to bytes by round(255 * v) and back by v = byte/255.
"""

import numpy as np


class PgmFormatError(ValueError):
    pass


def write_pgm(image: np.ndarray, path) -> None:
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise PgmFormatError("P5 images must be 2D")
    if img.min() < 0.0 or img.max() > 1.0:
        raise PgmFormatError("P5 images must have values in [0, 1]")
    raw = np.rint(img * 255.0).astype(np.uint8)
    h, w = raw.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(raw.tobytes())


def _read_token(fh) -> bytes:
    # Tokens are separated by whitespace; '#' starts a comment to end of line.
    tok = b""
    while True:
        ch = fh.read(1)
        if ch == b"":
            if tok:
                return tok
            raise PgmFormatError("unexpected end of file in header")
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = fh.read(1)
            continue
        if ch.isspace():
            if tok:
                return tok
            continue
        tok += ch


def read_pgm(path) -> np.ndarray:
    """Read a P5 file into a float64 image in [0, 1]."""
    with open(path, "rb") as fh:
        if _read_token(fh) != b"P5":
            raise PgmFormatError(f"{path}: not a binary PGM (P5) file")
        try:
            w = int(_read_token(fh))
            h = int(_read_token(fh))
            maxval = int(_read_token(fh))
        except ValueError as exc:
            raise PgmFormatError(f"{path}: malformed header") from exc
        if maxval != 255:
            raise PgmFormatError(f"{path}: only maxval 255 is supported, got {maxval}")
        raw = fh.read(w * h)
        if len(raw) != w * h:
            raise PgmFormatError(f"{path}: truncated pixel data")
    return np.frombuffer(raw, dtype=np.uint8).reshape(h, w).astype(np.float64) / 255.0
