"""Dataset ingestion, grayscale image I/O, patch extraction, splitting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .rng import RngStream


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix with binary 0/1 labels."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: Optional[tuple[str, ...]] = None
    indices: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=int).ravel()
        if features.ndim != 2 or features.shape[0] == 0:
            raise ValueError("features must be a non-empty matrix")
        if features.shape[0] != labels.size:
            raise ValueError("feature and label counts differ")
        if not np.all(np.isfinite(features)):
            raise ValueError("features contain non-finite values")
        if not np.all(np.isin(labels, (0, 1))):
            raise ValueError("labels must be 0 or 1")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def class_counts(self) -> tuple[int, int]:
        """(negatives, positives) as read from the data itself."""
        return int(np.sum(self.labels == 0)), int(np.sum(self.labels == 1))


IONOSPHERE_FEATURES = 34


def load_ionosphere(path) -> LabeledDataset:
    """Radar-returns CSV: 34 numeric columns plus a final g/b label.

    'g' (good) maps to 1 and 'b' (bad) to 0. Malformed rows fail with their
    line number.
    """
    rows: list[list[float]] = []
    labels: list[int] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != IONOSPHERE_FEATURES + 1:
                raise ValueError(
                    f"{path}:{lineno}: expected {IONOSPHERE_FEATURES} feature columns "
                    f"plus a label, got {len(parts) - 1}"
                )
            try:
                values = [float(v) for v in parts[:-1]]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed numeric value") from exc
            if not all(np.isfinite(values)):
                raise ValueError(f"{path}:{lineno}: non-finite feature value")
            label = parts[-1].strip().lower()
            if label == "g":
                labels.append(1)
            elif label == "b":
                labels.append(0)
            else:
                raise ValueError(f"{path}:{lineno}: unknown label {parts[-1]!r}")
            rows.append(values)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return LabeledDataset(np.array(rows), np.array(labels))


@dataclass(frozen=True)
class SplitSpec:
    """Train/test split request; ``train_fraction`` is the training share."""

    train_fraction: float
    stratified: bool = True
    seed: int = 0


def _round_half_up(value: float) -> int:
    return int(np.floor(value + 0.5))


def split(dataset: LabeledDataset, spec: SplitSpec) -> tuple[LabeledDataset, LabeledDataset]:
    """Disjoint train/test partition, deterministic per seed.

    Train size is round(N * train_fraction); stratified mode keeps each class
    within one sample of its overall proportion.
    """
    if not 0.0 < spec.train_fraction < 1.0:
        raise ValueError("train_fraction must be strictly between 0 and 1")
    n = len(dataset)
    n_train = _round_half_up(n * spec.train_fraction)
    if n_train == 0 or n_train == n:
        raise ValueError("degenerate fraction: one side of the split is empty")
    gen = RngStream(spec.seed).generator()

    if spec.stratified:
        neg, pos = dataset.class_counts
        if neg == 0 or pos == 0:
            raise ValueError("stratified split needs both classes present")
        take = {}
        fractional = {}
        for cls, count in ((0, neg), (1, pos)):
            exact = count * spec.train_fraction
            take[cls] = _round_half_up(exact)
            fractional[cls] = exact - np.floor(exact)
        # reconcile per-class rounding with the overall train size
        while sum(take.values()) > n_train:
            cls = min(fractional, key=lambda c: (fractional[c], c))
            take[cls] -= 1
        while sum(take.values()) < n_train:
            cls = max(fractional, key=lambda c: (fractional[c], -c))
            take[cls] += 1
        train_idx = []
        for cls in (0, 1):
            members = np.flatnonzero(dataset.labels == cls)
            order = gen.permutation(members.size)
            train_idx.append(members[order[: take[cls]]])
        train_indices = np.sort(np.concatenate(train_idx))
    else:
        order = gen.permutation(n)
        train_indices = np.sort(order[:n_train])

    mask = np.zeros(n, dtype=bool)
    mask[train_indices] = True
    test_indices = np.flatnonzero(~mask)

    def subset(idx: np.ndarray) -> LabeledDataset:
        return LabeledDataset(
            dataset.features[idx],
            dataset.labels[idx],
            feature_names=dataset.feature_names,
            indices=idx,
        )

    return subset(train_indices), subset(test_indices)


@dataclass(frozen=True)
class GrayImage:
    """Grayscale image with pixels clamped to [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        pixels = np.clip(np.asarray(self.pixels, dtype=float), 0.0, 1.0)
        if pixels.ndim != 2 or pixels.size == 0:
            raise ValueError("pixels must be a non-empty 2-D array")
        object.__setattr__(self, "pixels", pixels)

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])


def _read_pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """First ``count`` whitespace-separated header tokens, skipping comments."""
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(data):
            raise ValueError("truncated file: incomplete header")
        ch = data[pos : pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        else:
            end = pos
            while end < len(data) and not data[end : end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    return tokens, pos


def load_pgm(path) -> GrayImage:
    """P2 (ASCII) or P5 (binary) grayscale image, normalized to [0, 1]."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, pos = _read_pgm_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"bad magic {magic!r}: expected P2 or P5")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ValueError("malformed header dimensions") from exc
    if width <= 0 or height <= 0 or not 0 < maxval <= 65535:
        raise ValueError("invalid dimensions or maxval")

    if magic == b"P5":
        pos += 1  # exactly one whitespace byte after maxval
        bytes_per = 1 if maxval < 256 else 2
        needed = width * height * bytes_per
        raw = data[pos : pos + needed]
        if len(raw) < needed:
            raise ValueError("truncated file: missing pixel data")
        dtype = np.uint8 if bytes_per == 1 else ">u2"
        values = np.frombuffer(raw, dtype=dtype).astype(float)
    else:
        body = b"\n".join(
            line.split(b"#", 1)[0] for line in data[pos:].split(b"\n")
        )
        fields = body.split()
        if len(fields) < width * height:
            raise ValueError("truncated file: missing pixel data")
        values = np.array(fields[: width * height], dtype=float)
    return GrayImage(values.reshape(height, width) / maxval)


def save_pgm(image: GrayImage, path, maxval: int = 255) -> None:
    """Binary P5 writer; quantization error is at most 1/(2*maxval)."""
    if not 0 < maxval <= 65535:
        raise ValueError("maxval must be in (0, 65535]")
    quantized = np.rint(image.pixels * maxval).astype(np.uint32)
    header = f"P5\n{image.width} {image.height}\n{maxval}\n".encode()
    if maxval < 256:
        payload = quantized.astype(np.uint8).tobytes()
    else:
        payload = quantized.astype(">u2").tobytes()
    with open(path, "wb") as fh:
        fh.write(header + payload)


def add_gaussian_noise(image: GrayImage, sd: float, rng: RngStream) -> GrayImage:
    """Pixelwise additive zero-mean noise, clamped back into [0, 1]."""
    if sd < 0:
        raise ValueError("sd must be non-negative")
    if sd == 0.0:
        return GrayImage(image.pixels.copy())
    noise = rng.generator().normal(0.0, sd, size=image.pixels.shape)
    return GrayImage(image.pixels + noise)


def extract_patches(
    image: GrayImage, patch_size: int, stride: int = 1
) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Flattened square neighborhoods around pixel centers.

    Borders are padded by symmetric reflection so every pixel can be a
    center; ``centers`` lists the (row, col) of each feature row.
    """
    if patch_size < 3 or patch_size % 2 == 0:
        raise ValueError("patch_size must be an odd integer >= 3")
    if stride < 1:
        raise ValueError("stride must be positive")
    if image.height < patch_size or image.width < patch_size:
        raise ValueError("image smaller than the patch")
    half = patch_size // 2
    padded = np.pad(image.pixels, half, mode="symmetric")
    windows = np.lib.stride_tricks.sliding_window_view(padded, (patch_size, patch_size))
    rows = np.arange(0, image.height, stride)
    cols = np.arange(0, image.width, stride)
    features = windows[np.ix_(rows, cols)].reshape(rows.size * cols.size, patch_size**2)
    centers = [(int(r), int(c)) for r in rows for c in cols]
    return np.ascontiguousarray(features), centers
